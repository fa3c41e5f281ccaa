#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>

#include "btree_core.hpp"
#include "predecessor_set.hpp"

namespace pred {

/// Strategy for locating a key among the splitters of a B-tree node.
enum class NodeSearch {
    linear,
    binary,
};

/// \brief Sorted inline key array of a B-tree node.
template<unsigned N>
class SortedKeys {
private:
    std::array<Key, N> m_keys;
    uint16_t m_size = 0;

public:
    size_t size() const { return m_size; }
    Key key(size_t i) const { return m_keys[i]; }
    std::span<const Key> keys() const { return {m_keys.data(), m_size}; }

    /// Number of keys <= x.
    size_t rank(Key x, NodeSearch search) const {
        if(search == NodeSearch::linear) {
            size_t i = 0;
            while(i < m_size && m_keys[i] <= x) ++i;
            return i;
        }
        return size_t(std::upper_bound(m_keys.begin(), m_keys.begin() + m_size, x) - m_keys.begin());
    }

    void insert_at(size_t i, Key x, NodeSearch) {
        std::copy_backward(m_keys.begin() + i, m_keys.begin() + m_size, m_keys.begin() + m_size + 1);
        m_keys[i] = x;
        ++m_size;
    }

    void erase_at(size_t i, NodeSearch) {
        std::copy(m_keys.begin() + i + 1, m_keys.begin() + m_size, m_keys.begin() + i);
        --m_size;
    }

    void assign(std::span<const Key> keys) {
        std::copy(keys.begin(), keys.end(), m_keys.begin());
        m_size = uint16_t(keys.size());
    }

    bool canonical() const { return true; }
};

/// \brief In-memory B-tree ordered set with at most B children per node.
///
/// Each node stores up to B-1 splitter keys in a fixed-capacity inline array,
/// searched linearly or by binary search.
template<unsigned B>
class BTree : public detail::BTreeCore<SortedKeys<B - 1>, B, NodeSearch> {
    using Base = detail::BTreeCore<SortedKeys<B - 1>, B, NodeSearch>;

public:
    explicit BTree(NodeSearch search = NodeSearch::linear) : Base(search) {}
};

static_assert(PredecessorSet<BTree<8>>);

} // namespace pred
