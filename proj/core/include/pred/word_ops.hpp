#pragma once

#include <bit>
#include <cstdint>

#include "word256.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PRED_X86_64 1
#include <immintrin.h>
#endif

/// \file
/// Constant-time word operations. Every operation exists twice: a portable
/// implementation in \ref pred::bits::portable and an instruction-backed one in
/// \ref pred::bits::hw. The unqualified functions in \ref pred::bits dispatch
/// on a process-wide switch that is initialised from CPU feature detection and
/// the environment variable PREDBENCH_NO_INTRINSICS. Both paths are bit-exact.
///
/// Bit positions are counted from the least significant bit.

namespace pred::bits {

namespace portable {

/// Position of the most significant set bit, or -1 for x = 0.
constexpr int msb0(uint64_t x) {
    if(x == 0) return -1;
    int p = 0;
    if(x >> 32) { x >>= 32; p += 32; }
    if(x >> 16) { x >>= 16; p += 16; }
    if(x >> 8)  { x >>= 8;  p += 8; }
    if(x >> 4)  { x >>= 4;  p += 4; }
    if(x >> 2)  { x >>= 2;  p += 2; }
    if(x >> 1)  { p += 1; }
    return p;
}

constexpr int popcount(uint64_t x) {
    x = x - ((x >> 1) & 0x5555555555555555ULL);
    x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
    return int((x * 0x0101010101010101ULL) >> 56);
}

constexpr int tzcnt(uint64_t x) {
    if(x == 0) return 64;
    return popcount((x & (~x + 1)) - 1);
}

constexpr int count_trailing_ones(uint64_t x) { return tzcnt(~x); }

/// Position of the h-th set bit (h >= 1), or -1 if x has fewer than h set bits.
constexpr int select1(uint64_t x, unsigned h) {
    if(h == 0 || unsigned(popcount(x)) < h) return -1;
    int base = 0;
    // skip whole bytes guided by their popcount
    for(;;) {
        const unsigned c = unsigned(popcount(x & 0xFF));
        if(c >= h) break;
        h -= c;
        x >>= 8;
        base += 8;
    }
    for(int i = 0; i < 8; ++i) {
        if((x >> i) & 1) {
            if(--h == 0) return base + i;
        }
    }
    return -1; // unreachable
}

/// Parallel bits extract: the bits of x at the set positions of m, packed to the low end.
constexpr uint64_t extract_bits(uint64_t x, uint64_t m) {
    uint64_t r = 0;
    unsigned k = 0;
    while(m) {
        const uint64_t low = m & (~m + 1);
        if(x & low) r |= uint64_t(1) << k;
        ++k;
        m ^= low;
    }
    return r;
}

/// Number of 8-bit lanes of X that are <= y (SWAR).
constexpr unsigned packed_rank8(uint64_t X, uint8_t y) {
    constexpr uint64_t H = 0x8080808080808080ULL;
    constexpr uint64_t L = 0x0101010101010101ULL;
    const uint64_t Y = uint64_t(y) * L;
    const uint64_t gt_low = ((X | H) - ((Y & ~H) + L)) & H;
    const uint64_t gt = ((X & ~Y) | (~(X ^ Y) & gt_low)) & H;
    return 8u - unsigned(popcount(gt));
}

constexpr unsigned packed_rank16_limb(uint64_t X, uint16_t y) {
    constexpr uint64_t H = 0x8000800080008000ULL;
    constexpr uint64_t L = 0x0001000100010001ULL;
    const uint64_t Y = uint64_t(y) * L;
    const uint64_t gt_low = ((X | H) - ((Y & ~H) + L)) & H;
    const uint64_t gt = ((X & ~Y) | (~(X ^ Y) & gt_low)) & H;
    return 4u - unsigned(popcount(gt));
}

/// Number of 16-bit lanes of X that are <= y; combines the four limb results.
constexpr unsigned packed_rank16(const Word256& X, uint16_t y) {
    return packed_rank16_limb(X.limbs[0], y) + packed_rank16_limb(X.limbs[1], y) +
           packed_rank16_limb(X.limbs[2], y) + packed_rank16_limb(X.limbs[3], y);
}

} // namespace portable

namespace hw {

inline int msb0(uint64_t x) { return x == 0 ? -1 : 63 - std::countl_zero(x); }
inline int popcount(uint64_t x) { return std::popcount(x); }
inline int tzcnt(uint64_t x) { return std::countr_zero(x); }
inline int count_trailing_ones(uint64_t x) { return std::countr_one(x); }

#ifdef PRED_X86_64

__attribute__((target("bmi2"))) inline uint64_t extract_bits(uint64_t x, uint64_t m) {
    return _pext_u64(x, m);
}

__attribute__((target("bmi2"))) inline int select1(uint64_t x, unsigned h) {
    if(h == 0 || unsigned(std::popcount(x)) < h) return -1;
    return std::countr_zero(_pdep_u64(uint64_t(1) << (h - 1), x));
}

inline unsigned packed_rank8(uint64_t X, uint8_t y) {
    const __m128i flip = _mm_set1_epi8(char(0x80));
    const __m128i a = _mm_xor_si128(_mm_cvtsi64_si128(int64_t(X)), flip);
    const __m128i b = _mm_xor_si128(_mm_set1_epi8(char(y)), flip);
    const unsigned gt = unsigned(_mm_movemask_epi8(_mm_cmpgt_epi8(a, b))) & 0xFFu;
    return 8u - unsigned(std::popcount(gt));
}

__attribute__((target("avx2"))) inline unsigned packed_rank16(const Word256& X, uint16_t y) {
    const __m256i flip = _mm256_set1_epi16(short(0x8000));
    const __m256i a = _mm256_xor_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(X.limbs.data())), flip);
    const __m256i b = _mm256_xor_si256(_mm256_set1_epi16(short(y)), flip);
    const unsigned gt = unsigned(_mm256_movemask_epi8(_mm256_cmpgt_epi16(a, b)));
    return 16u - unsigned(std::popcount(gt)) / 2;
}

#else

inline uint64_t extract_bits(uint64_t x, uint64_t m) { return portable::extract_bits(x, m); }
inline int select1(uint64_t x, unsigned h) { return portable::select1(x, h); }
inline unsigned packed_rank8(uint64_t X, uint8_t y) { return portable::packed_rank8(X, y); }
inline unsigned packed_rank16(const Word256& X, uint16_t y) { return portable::packed_rank16(X, y); }

#endif

} // namespace hw

/// Whether this CPU provides the instructions behind \ref hw (BMI2 and AVX2 on x86-64).
bool hw_supported();

/// Whether the unqualified operations currently dispatch to \ref hw.
bool intrinsics_enabled();

/// Selects the dispatch path. Requests for the hardware path are ignored if
/// \ref hw_supported is false. Not thread-safe; call before use.
void set_intrinsics_enabled(bool enabled);

namespace detail {
extern bool g_use_hw;
}

inline int msb0(uint64_t x) { return detail::g_use_hw ? hw::msb0(x) : portable::msb0(x); }
inline int popcount(uint64_t x) { return detail::g_use_hw ? hw::popcount(x) : portable::popcount(x); }
inline int tzcnt(uint64_t x) { return detail::g_use_hw ? hw::tzcnt(x) : portable::tzcnt(x); }
inline int count_trailing_ones(uint64_t x) {
    return detail::g_use_hw ? hw::count_trailing_ones(x) : portable::count_trailing_ones(x);
}
inline int select1(uint64_t x, unsigned h) { return detail::g_use_hw ? hw::select1(x, h) : portable::select1(x, h); }
inline uint64_t extract_bits(uint64_t x, uint64_t m) {
    return detail::g_use_hw ? hw::extract_bits(x, m) : portable::extract_bits(x, m);
}
inline unsigned packed_rank8(uint64_t X, uint8_t y) {
    return detail::g_use_hw ? hw::packed_rank8(X, y) : portable::packed_rank8(X, y);
}
inline unsigned packed_rank16(const Word256& X, uint16_t y) {
    return detail::g_use_hw ? hw::packed_rank16(X, y) : portable::packed_rank16(X, y);
}

/// 2^bits - 1 for bits in [0, 64].
constexpr uint64_t low_mask(unsigned bits) {
    return bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
}

} // namespace pred::bits
