#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include <pred/word256.hpp>
#include <pred/word_ops.hpp>

using namespace pred;
using boost::multiprecision::uint256_t;

namespace {

constexpr int N = 100'000;

int naive_msb(uint64_t x) {
    for(int p = 63; p >= 0; --p) {
        if((x >> p) & 1) return p;
    }
    return -1;
}

int naive_tz(uint64_t x) {
    int c = 0;
    while(c < 64 && !((x >> c) & 1)) ++c;
    return c;
}

int naive_select(uint64_t x, unsigned h) {
    for(int p = 0; p < 64; ++p) {
        if((x >> p) & 1 && --h == 0) return p;
    }
    return -1;
}

uint64_t naive_extract(uint64_t x, uint64_t m) {
    uint64_t r = 0;
    unsigned k = 0;
    for(unsigned p = 0; p < 64; ++p) {
        if((m >> p) & 1) r |= ((x >> p) & 1) << k++;
    }
    return r;
}

// random word with a random density of set bits
uint64_t sparse(std::mt19937_64& rng) {
    uint64_t x = rng();
    for(unsigned i = unsigned(rng() % 4); i > 0; --i) x &= rng();
    if(rng() % 4 == 0) x |= rng();
    return x;
}

uint256_t to_big(const Word256& w) {
    uint256_t r = 0;
    for(int i = 3; i >= 0; --i) r = (r << 64) | w.limbs[i];
    return r;
}

Word256 random_word(std::mt19937_64& rng) { return Word256(rng(), rng(), rng(), rng()); }

} // namespace

TEST(WordOps, Examples) {
    EXPECT_EQ(bits::msb0(1), 0);
    EXPECT_EQ(bits::msb0(6), 2);
    EXPECT_EQ(bits::msb0(uint64_t(1) << 40), 40);
    EXPECT_EQ(bits::msb0(0), -1);
    EXPECT_EQ(bits::tzcnt(0), 64);
    EXPECT_EQ(bits::tzcnt(8), 3);
    EXPECT_EQ(bits::tzcnt(25), 0);
    EXPECT_EQ(bits::count_trailing_ones(0), 0);
    EXPECT_EQ(bits::count_trailing_ones(0b0111), 3);
    EXPECT_EQ(bits::count_trailing_ones(~uint64_t(0)), 64);
    EXPECT_EQ(bits::select1(1, 1), 0);
    EXPECT_EQ(bits::select1(0b11001, 2), 3);
    EXPECT_EQ(bits::select1(0b11001, 3), 4);
    EXPECT_EQ(bits::select1(0b11001, 4), -1);
    EXPECT_EQ(bits::select1(0b11001, 0), -1);
    EXPECT_EQ(bits::extract_bits(0b11011, 0b11001), 0b111u);
    EXPECT_EQ(bits::extract_bits(0b01100, 0b11001), 0b010u);
    EXPECT_EQ(bits::extract_bits(0xDEADBEEF, 0), 0u);
}

TEST(WordOps, PackedRankExamples) {
    const std::array<uint8_t, 8> lanes{0, 1, 2, 7, 9, 11, 200, 255};
    uint64_t X = 0;
    for(unsigned i = 0; i < 8; ++i) X |= uint64_t(lanes[i]) << (8 * i);
    EXPECT_EQ(bits::packed_rank8(X, 5), 3u);
    EXPECT_EQ(bits::packed_rank8(0x0303030303030303ULL, 0), 0u);
    EXPECT_EQ(bits::packed_rank8(0, 255), 8u);

    Word256 W;
    for(unsigned i = 0; i < 16; ++i) W.set_lane16(i, uint16_t(i));
    EXPECT_EQ(bits::packed_rank16(W, 7), 8u);
    EXPECT_EQ(bits::packed_rank16(Word256::broadcast16(5), 4), 0u);
    EXPECT_EQ(bits::packed_rank16(W, 0xFFFF), 16u);
}

TEST(WordOps, PortableMatchesNaive) {
    std::mt19937_64 rng(11);
    for(int i = 0; i < N; ++i) {
        const uint64_t x = sparse(rng), m = sparse(rng);
        ASSERT_EQ(bits::portable::msb0(x), naive_msb(x));
        ASSERT_EQ(bits::portable::tzcnt(x), naive_tz(x));
        ASSERT_EQ(bits::portable::count_trailing_ones(x), naive_tz(~x));
        ASSERT_EQ(bits::portable::popcount(x), __builtin_popcountll(x));
        const unsigned h = unsigned(rng() % 66);
        ASSERT_EQ(bits::portable::select1(x, h), h == 0 ? -1 : naive_select(x, h)) << x << " " << h;
        ASSERT_EQ(bits::portable::extract_bits(x, m), naive_extract(x, m));
    }
}

TEST(WordOps, PackedRankMatchesLaneLoop) {
    std::mt19937_64 rng(12);
    for(int i = 0; i < N; ++i) {
        std::array<uint8_t, 8> l8;
        for(auto& v : l8) v = uint8_t(rng());
        std::sort(l8.begin(), l8.end());
        uint64_t X = 0;
        for(unsigned j = 0; j < 8; ++j) X |= uint64_t(l8[j]) << (8 * j);
        const uint8_t y = rng() % 3 == 0 ? l8[rng() % 8] : uint8_t(rng());
        ASSERT_EQ(bits::portable::packed_rank8(X, y), unsigned(std::count_if(l8.begin(), l8.end(), [&](uint8_t v) { return v <= y; })));

        std::array<uint16_t, 16> l16;
        for(auto& v : l16) v = uint16_t(rng());
        std::sort(l16.begin(), l16.end());
        Word256 W;
        for(unsigned j = 0; j < 16; ++j) W.set_lane16(j, l16[j]);
        const uint16_t z = rng() % 3 == 0 ? l16[rng() % 16] : uint16_t(rng());
        ASSERT_EQ(bits::portable::packed_rank16(W, z),
                  unsigned(std::count_if(l16.begin(), l16.end(), [&](uint16_t v) { return v <= z; })));
    }
}

TEST(WordOps, HardwareMatchesPortable) {
    if(!bits::hw_supported()) GTEST_SKIP() << "CPU lacks BMI2/AVX2";
    std::mt19937_64 rng(13);
    for(int i = 0; i < N; ++i) {
        const uint64_t x = sparse(rng), m = sparse(rng);
        const unsigned h = unsigned(rng() % 66);
        ASSERT_EQ(bits::hw::msb0(x), bits::portable::msb0(x));
        ASSERT_EQ(bits::hw::tzcnt(x), bits::portable::tzcnt(x));
        ASSERT_EQ(bits::hw::count_trailing_ones(x), bits::portable::count_trailing_ones(x));
        ASSERT_EQ(bits::hw::popcount(x), bits::portable::popcount(x));
        ASSERT_EQ(bits::hw::select1(x, h), bits::portable::select1(x, h));
        ASSERT_EQ(bits::hw::extract_bits(x, m), bits::portable::extract_bits(x, m));
        const uint8_t y8 = uint8_t(rng());
        ASSERT_EQ(bits::hw::packed_rank8(x, y8), bits::portable::packed_rank8(x, y8));
        const Word256 W = random_word(rng);
        const uint16_t y16 = uint16_t(rng());
        ASSERT_EQ(bits::hw::packed_rank16(W, y16), bits::portable::packed_rank16(W, y16));
    }
}

TEST(WordOps, DispatchFollowsEnvironment) {
    const char* env = std::getenv("PREDBENCH_NO_INTRINSICS");
    const bool disabled = env != nullptr && std::string(env) == "1";
    EXPECT_EQ(bits::intrinsics_enabled(), bits::hw_supported() && !disabled);

    const bool before = bits::intrinsics_enabled();
    bits::set_intrinsics_enabled(false);
    EXPECT_FALSE(bits::intrinsics_enabled());
    EXPECT_EQ(bits::extract_bits(0b11011, 0b11001), 0b111u);
    bits::set_intrinsics_enabled(before);
}

TEST(Word256, MatchesBigInteger) {
    std::mt19937_64 rng(14);
    const uint256_t all = ~uint256_t(0);
    for(int i = 0; i < 10'000; ++i) {
        const Word256 a = random_word(rng), b = random_word(rng);
        const uint256_t A = to_big(a), B = to_big(b);
        const unsigned s = unsigned(rng() % 260);
        ASSERT_EQ(to_big(a & b), A & B);
        ASSERT_EQ(to_big(a | b), A | B);
        ASSERT_EQ(to_big(a ^ b), A ^ B);
        ASSERT_EQ(to_big(~a), A ^ all);
        ASSERT_EQ(to_big(a << s), s >= 256 ? uint256_t(0) : uint256_t((A << s) & all));
        ASSERT_EQ(to_big(a >> s), s >= 256 ? uint256_t(0) : uint256_t(A >> s));
        ASSERT_EQ(a < b, A < B);
        ASSERT_EQ(a == b, A == B);
        ASSERT_EQ(a.popcount(), unsigned(__builtin_popcountll(a.limbs[0]) + __builtin_popcountll(a.limbs[1]) +
                                         __builtin_popcountll(a.limbs[2]) + __builtin_popcountll(a.limbs[3])));
        const unsigned m = unsigned(rng() % 257);
        ASSERT_EQ(to_big(Word256::low_mask(m)), m >= 256 ? all : uint256_t((uint256_t(1) << m) - 1));
    }
}

TEST(Word256, Lanes) {
    Word256 w;
    for(unsigned i = 0; i < 16; ++i) w.set_lane16(i, uint16_t(1000 + i));
    for(unsigned i = 0; i < 16; ++i) EXPECT_EQ(w.lane16(i), 1000 + i);
    EXPECT_EQ(Word256::broadcast16(0xABCD).lane16(13), 0xABCD);
    EXPECT_TRUE(Word256().is_zero());
    EXPECT_TRUE(Word256(0, 0, 1u << 5, 0).bit(128 + 5));
}
