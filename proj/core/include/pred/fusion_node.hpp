#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "predecessor_set.hpp"
#include "word256.hpp"
#include "word_ops.hpp"

namespace pred {

/// How a fusion node ranks a compressed key among its rows.
enum class RankSearch {
    packed, ///< one word-parallel lane comparison
    linear, ///< scan rows until the first greater one
};

namespace detail {

/// Row-packed k x k bit matrices: row i occupies lane i of the word.
template<unsigned K>
struct FusionRows;

template<>
struct FusionRows<8> {
    using Word = uint64_t;
    using Lane = uint8_t;
    static constexpr unsigned LANE_BITS = 8;

    static constexpr Word rep(Lane v) { return Word(v) * 0x0101010101010101ULL; }
    static constexpr Word lift(Lane v) { return Word(v); }
    static constexpr Lane get(Word m, unsigned i) { return Lane(m >> (LANE_BITS * i)); }
    static constexpr Word rows_below(unsigned n) { return bits::low_mask(LANE_BITS * n); }
    static unsigned rank(Word completed, Lane x) { return bits::packed_rank8(completed, x); }
};

template<>
struct FusionRows<16> {
    using Word = Word256;
    using Lane = uint16_t;
    static constexpr unsigned LANE_BITS = 16;

    static constexpr Word rep(Lane v) { return Word256::broadcast16(v); }
    static constexpr Word lift(Lane v) { return Word256(v); }
    static constexpr Lane get(const Word& m, unsigned i) { return m.lane16(i); }
    static constexpr Word rows_below(unsigned n) { return Word256::low_mask(LANE_BITS * n); }
    static unsigned rank(const Word& completed, Lane x) { return bits::packed_rank16(completed, x); }
};

} // namespace detail

/// \brief Dynamic fusion node for up to K keys (K = 8 or 16).
///
/// Keys are kept in ascending order. Each key is represented by its compressed
/// key over the distinguishing positions M of the compact binary trie of the
/// node's keys, where positions at which the key's own trie path does not
/// branch are don't cares. The matrix of compressed keys with don't cares is
/// stored as two row-packed words: \c branch holds the concrete bits and
/// \c free marks don't cares. Rows at index >= size() are padding with all
/// bits of \c branch set, so they never rank below a compressed query.
///
/// The state after any sequence of insertions and deletions is identical to
/// \ref rebuild of the current key set.
template<unsigned K>
class FusionNode {
    static_assert(K == 8 || K == 16, "fusion nodes support 8 or 16 keys");

public:
    using Rows = detail::FusionRows<K>;
    using Word = typename Rows::Word;
    using Lane = typename Rows::Lane;

    static constexpr unsigned capacity() { return K; }

private:
    std::array<Key, K> m_keys{};
    Word m_branch = ~Word(0);
    Word m_free = Word(0);
    uint64_t m_mask = 0;
    uint8_t m_size = 0;

    // true iff a and b agree on all bits above position p
    static constexpr bool same_above(Key a, Key b, unsigned p) { return ((a ^ b) >> p) >> 1 == 0; }

    void repad() {
        const Word real = Rows::rows_below(m_size);
        m_branch = (m_branch & real) | ~real;
        m_free = m_free & real;
    }

    static Word insert_row(const Word& m, unsigned r, Lane v) {
        const Word low = m & Rows::rows_below(r);
        const Word high = m & ~Rows::rows_below(r);
        return low | (high << Rows::LANE_BITS) | (Rows::lift(v) << (Rows::LANE_BITS * r));
    }

    static Word remove_row(const Word& m, unsigned r) {
        const Word low = m & Rows::rows_below(r);
        const Word high = (m >> Rows::LANE_BITS) & ~Rows::rows_below(r);
        return low | high;
    }

    // inserts a zero column at index c in every row
    static Word insert_column(const Word& m, unsigned c) {
        const Word lo = Rows::rep(Lane(bits::low_mask(c)));
        return (m & lo) | ((m & ~lo) << 1);
    }

    // removes column c from every row
    static Word remove_column(const Word& m, unsigned c) {
        const Word lo = Rows::rep(Lane(bits::low_mask(c)));
        const Word upper = Rows::rep(Lane(bits::low_mask(Rows::LANE_BITS - 1) & ~bits::low_mask(c)));
        return (m & lo) | ((m >> 1) & upper);
    }

    // row mask covering rows [i0, i1)
    static Word row_range(unsigned i0, unsigned i1) { return Rows::rows_below(i1) & ~Rows::rows_below(i0); }

    unsigned match_compressed(Lane xh, RankSearch search) const {
        const Word completed = m_branch | (m_free & Rows::rep(xh));
        if(search == RankSearch::packed) return Rows::rank(completed, xh);
        unsigned i = 0;
        while(i < m_size && Rows::get(completed, i) <= xh) ++i;
        return i;
    }

public:
    FusionNode() = default;

    /// \brief Builds the canonical node state for the given ascending keys.
    ///
    /// M is the set of branching levels of the compact trie, i.e. the
    /// positions msb(keys[i] XOR keys[i+1]). A key's bit at a distinguishing
    /// position p is concrete iff some other key first differs from it at p.
    static FusionNode rebuild(std::span<const Key> keys) {
        if(keys.size() > K) throw std::length_error("fusion node: too many keys");
        for(size_t i = 1; i < keys.size(); ++i) {
            if(keys[i - 1] >= keys[i]) throw std::invalid_argument("fusion node: keys must be strictly ascending");
        }

        FusionNode node;
        node.m_size = uint8_t(keys.size());
        for(size_t i = 0; i < keys.size(); ++i) node.m_keys[i] = keys[i];
        for(size_t i = 1; i < keys.size(); ++i) node.m_mask |= uint64_t(1) << bits::msb0(keys[i - 1] ^ keys[i]);

        const uint64_t cols = bits::low_mask(unsigned(bits::popcount(node.m_mask)));
        node.m_branch = Word(0);
        for(size_t i = 0; i < keys.size(); ++i) {
            uint64_t levels = 0;
            for(size_t j = 0; j < keys.size(); ++j) {
                if(j != i) levels |= uint64_t(1) << bits::msb0(keys[i] ^ keys[j]);
            }
            const Lane free = Lane(cols & ~bits::extract_bits(levels, node.m_mask));
            const Lane branch = Lane(bits::extract_bits(keys[i], node.m_mask) & ~uint64_t(free));
            node.m_branch |= Rows::lift(branch) << (Rows::LANE_BITS * i);
            node.m_free |= Rows::lift(free) << (Rows::LANE_BITS * i);
        }
        node.repad();
        return node;
    }

    size_t size() const { return m_size; }
    bool empty() const { return m_size == 0; }
    bool full() const { return m_size == K; }

    Key key(size_t i) const { return m_keys[i]; }
    std::span<const Key> keys() const { return {m_keys.data(), m_size}; }

    uint64_t mask() const { return m_mask; }
    const Word& branch() const { return m_branch; }
    const Word& free() const { return m_free; }
    Lane branch_row(unsigned i) const { return Rows::get(m_branch, i); }
    Lane free_row(unsigned i) const { return Rows::get(m_free, i); }

    /// Compressed key of x: its bits at the distinguishing positions.
    Lane compress(Key x) const { return Lane(bits::extract_bits(x, m_mask)); }

    /// \brief Number of rows whose compressed key, with don't cares filled
    /// from x's compressed key, is at most that compressed key.
    ///
    /// For x in the node this is its 1-based rank. Requires size() >= 1.
    unsigned match(Key x, RankSearch search = RankSearch::packed) const {
        return match_compressed(compress(x), search);
    }

    /// Number of keys <= x, i.e. the 1-based rank of x's predecessor (0 if none).
    unsigned rank(Key x, RankSearch search = RankSearch::packed) const {
        if(m_size == 0) return 0;
        const unsigned i = match(x, search);
        if(i > 0 && m_keys[i - 1] == x) return i;
        const Key y = m_keys[i > 0 ? i - 1 : 0];
        if(y == x) return 1;

        // x left the trie path of y at the level of their first differing bit
        const unsigned j = unsigned(bits::msb0(x ^ y)) + 1;
        if(x < y) {
            const unsigned m = match(x & ~bits::low_mask(j), search);
            return m == 0 ? 0 : m - 1;
        }
        return match(x | bits::low_mask(j), search);
    }

    PredResult predecessor(Key x, RankSearch search = RankSearch::packed) const {
        const unsigned r = rank(x, search);
        if(r == 0) return std::nullopt;
        return m_keys[r - 1];
    }

    /// \brief Inserts x. Returns false if x is already contained.
    /// \throws std::length_error if the node is full
    bool insert(Key x, RankSearch search = RankSearch::packed) {
        if(m_size == 0) {
            m_keys[0] = x;
            m_mask = 0;
            m_branch = Word(0);
            m_free = Word(0);
            m_size = 1;
            repad();
            return true;
        }

        const unsigned r = rank(x, search);
        if(r > 0 && m_keys[r - 1] == x) return false;
        if(m_size == K) throw std::length_error("fusion node: insert into full node");

        // the neighbour sharing the longest prefix with x determines the new branching node
        unsigned nb = r > 0 ? r - 1 : r;
        unsigned p = unsigned(bits::msb0(x ^ m_keys[nb]));
        if(r > 0 && r < m_size) {
            const unsigned q = unsigned(bits::msb0(x ^ m_keys[r]));
            if(q < p) {
                p = q;
                nb = r;
            }
        }

        const uint64_t pbit = uint64_t(1) << p;
        const unsigned c = unsigned(bits::popcount(m_mask & (pbit - 1)));
        const Word real = Rows::rows_below(m_size);
        const Word colbit = Rows::rep(Lane(Lane(1) << c));
        if(!(m_mask & pbit)) {
            // new distinguishing position: a don't care for every existing row
            m_branch = insert_column(m_branch & real, c);
            m_free = insert_column(m_free, c) | (colbit & real);
            m_mask |= pbit;
        }

        // the subtrie that x joins becomes branching at p: its rows get concrete bits there
        unsigned i0 = nb, i1 = nb + 1;
        while(i0 > 0 && same_above(m_keys[i0 - 1], x, p)) --i0;
        while(i1 < m_size && same_above(m_keys[i1], x, p)) ++i1;
        const Word sub = row_range(i0, i1) & colbit;
        m_free = m_free & ~sub;
        if(!(x & pbit)) m_branch = m_branch | sub; // siblings have the opposite bit

        const Lane above = Lane(~bits::low_mask(c + 1));
        const Lane free = Lane((Rows::get(m_free, nb) & above) | Lane(bits::low_mask(c)));
        const Lane branch = Lane(compress(x) & ~free);

        m_branch = insert_row(m_branch & Rows::rows_below(m_size), r, branch);
        m_free = insert_row(m_free, r, free);
        for(unsigned i = m_size; i > r; --i) m_keys[i] = m_keys[i - 1];
        m_keys[r] = x;
        ++m_size;
        repad();
        return true;
    }

    /// Deletes x. Returns false if x is not contained.
    bool erase(Key x, RankSearch search = RankSearch::packed) {
        const unsigned r = rank(x, search);
        if(r == 0 || m_keys[r - 1] != x) return false;
        const unsigned i = r - 1;

        if(m_size == 1) {
            m_size = 0;
            m_mask = 0;
            m_branch = Word(0);
            m_free = Word(0);
            repad();
            return true;
        }

        // lowest concrete column of x's row: the level of its deepest branching ancestor
        const unsigned h = unsigned(bits::count_trailing_ones(uint64_t(free_row(i)))) + 1;
        const unsigned j = unsigned(bits::select1(m_mask, h));
        const unsigned c = h - 1;

        m_branch = remove_row(m_branch & Rows::rows_below(m_size), i);
        m_free = remove_row(m_free, i);
        for(unsigned t = i; t + 1 < m_size; ++t) m_keys[t] = m_keys[t + 1];
        --m_size;

        const Word real = Rows::rows_below(m_size);
        const Word colbit = Rows::rep(Lane(Lane(1) << c));
        const Word concrete = ~m_free & real & colbit;
        const Word ones = m_branch & concrete;
        if(ones == Word(0) || ones == concrete) {
            // no branch left on level j
            m_branch = remove_column(m_branch, c);
            m_free = remove_column(m_free, c);
            m_mask &= ~(uint64_t(1) << j);
        } else {
            // the node at level j on x's path became unary: its subtrie turns to don't cares
            unsigned i0 = i, i1 = i;
            while(i0 > 0 && same_above(m_keys[i0 - 1], x, j)) --i0;
            while(i1 < m_size && same_above(m_keys[i1], x, j)) ++i1;
            const Word sub = row_range(i0, i1) & colbit;
            m_branch = m_branch & ~sub;
            m_free = m_free | sub;
        }
        repad();
        return true;
    }

    // B-tree key policy

    void insert_at(size_t, Key x, RankSearch search) { insert(x, search); }
    void erase_at(size_t i, RankSearch search) { erase(m_keys[i], search); }
    void assign(std::span<const Key> keys) { *this = rebuild(keys); }

    /// Equality of the full node state.
    friend bool operator==(const FusionNode& a, const FusionNode& b) {
        if(a.m_size != b.m_size || a.m_mask != b.m_mask) return false;
        if(!(a.m_branch == b.m_branch) || !(a.m_free == b.m_free)) return false;
        for(unsigned i = 0; i < a.m_size; ++i) {
            if(a.m_keys[i] != b.m_keys[i]) return false;
        }
        return true;
    }
};

} // namespace pred
