#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace pred {

/// \brief A 256-bit word simulated by four 64-bit limbs.
///
/// Limb 0 is the least significant. Only the operations needed by the wide
/// fusion node are provided: bitwise logic, shifts, comparison and access to
/// 16-bit lanes.
struct Word256 {
    std::array<uint64_t, 4> limbs{};

    constexpr Word256() = default;
    constexpr explicit Word256(uint64_t lo) : limbs{lo, 0, 0, 0} {}
    constexpr Word256(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t l3) : limbs{l0, l1, l2, l3} {}

    static constexpr Word256 ones() {
        return Word256(~uint64_t(0), ~uint64_t(0), ~uint64_t(0), ~uint64_t(0));
    }

    /// Word with value 2^bits - 1, for bits in [0, 256].
    static constexpr Word256 low_mask(unsigned bits) {
        Word256 r;
        for(unsigned i = 0; i < 4; ++i) {
            const unsigned lo = 64 * i;
            if(bits >= lo + 64) r.limbs[i] = ~uint64_t(0);
            else if(bits > lo) r.limbs[i] = (uint64_t(1) << (bits - lo)) - 1;
        }
        return r;
    }

    /// Copies of a 16-bit value in all sixteen lanes.
    static constexpr Word256 broadcast16(uint16_t v) {
        const uint64_t l = uint64_t(v) * 0x0001000100010001ULL;
        return Word256(l, l, l, l);
    }

    constexpr uint16_t lane16(unsigned i) const {
        return uint16_t(limbs[i >> 2] >> (16 * (i & 3)));
    }

    constexpr void set_lane16(unsigned i, uint16_t v) {
        const unsigned s = 16 * (i & 3);
        uint64_t& l = limbs[i >> 2];
        l = (l & ~(uint64_t(0xFFFF) << s)) | (uint64_t(v) << s);
    }

    constexpr bool bit(unsigned i) const { return (limbs[i >> 6] >> (i & 63)) & 1; }

    constexpr bool is_zero() const { return (limbs[0] | limbs[1] | limbs[2] | limbs[3]) == 0; }

    constexpr unsigned popcount() const {
        return std::popcount(limbs[0]) + std::popcount(limbs[1]) + std::popcount(limbs[2]) + std::popcount(limbs[3]);
    }

    friend constexpr Word256 operator&(const Word256& a, const Word256& b) {
        return Word256(a.limbs[0] & b.limbs[0], a.limbs[1] & b.limbs[1], a.limbs[2] & b.limbs[2], a.limbs[3] & b.limbs[3]);
    }
    friend constexpr Word256 operator|(const Word256& a, const Word256& b) {
        return Word256(a.limbs[0] | b.limbs[0], a.limbs[1] | b.limbs[1], a.limbs[2] | b.limbs[2], a.limbs[3] | b.limbs[3]);
    }
    friend constexpr Word256 operator^(const Word256& a, const Word256& b) {
        return Word256(a.limbs[0] ^ b.limbs[0], a.limbs[1] ^ b.limbs[1], a.limbs[2] ^ b.limbs[2], a.limbs[3] ^ b.limbs[3]);
    }
    friend constexpr Word256 operator~(const Word256& a) {
        return Word256(~a.limbs[0], ~a.limbs[1], ~a.limbs[2], ~a.limbs[3]);
    }
    constexpr Word256& operator&=(const Word256& o) { return *this = *this & o; }
    constexpr Word256& operator|=(const Word256& o) { return *this = *this | o; }
    constexpr Word256& operator^=(const Word256& o) { return *this = *this ^ o; }

    friend constexpr Word256 operator<<(const Word256& a, unsigned s) {
        if(s >= 256) return Word256();
        Word256 r;
        const unsigned q = s >> 6, b = s & 63;
        for(int i = 3; i >= int(q); --i) {
            uint64_t v = a.limbs[i - q] << b;
            if(b != 0 && i - int(q) - 1 >= 0) v |= a.limbs[i - q - 1] >> (64 - b);
            r.limbs[i] = v;
        }
        return r;
    }

    friend constexpr Word256 operator>>(const Word256& a, unsigned s) {
        if(s >= 256) return Word256();
        Word256 r;
        const unsigned q = s >> 6, b = s & 63;
        for(unsigned i = 0; i + q < 4; ++i) {
            uint64_t v = a.limbs[i + q] >> b;
            if(b != 0 && i + q + 1 < 4) v |= a.limbs[i + q + 1] << (64 - b);
            r.limbs[i] = v;
        }
        return r;
    }

    friend constexpr bool operator==(const Word256&, const Word256&) = default;

    friend constexpr bool operator<(const Word256& a, const Word256& b) {
        for(int i = 3; i >= 0; --i) {
            if(a.limbs[i] != b.limbs[i]) return a.limbs[i] < b.limbs[i];
        }
        return false;
    }
};

} // namespace pred
