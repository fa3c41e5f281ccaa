#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "predecessor_set.hpp"

namespace pred {

/// \brief Reference predecessor set backed by a sorted array.
///
/// Used as the ground truth in differential tests and by the harness to
/// check query checksums.
class OracleSet {
public:
    OracleSet() = default;

    bool insert(Key x) {
        auto it = std::lower_bound(m_keys.begin(), m_keys.end(), x);
        if(it != m_keys.end() && *it == x) return false;
        m_keys.insert(it, x);
        return true;
    }

    bool erase(Key x) {
        auto it = std::lower_bound(m_keys.begin(), m_keys.end(), x);
        if(it == m_keys.end() || *it != x) return false;
        m_keys.erase(it);
        return true;
    }

    PredResult predecessor(Key x) const {
        auto it = std::upper_bound(m_keys.begin(), m_keys.end(), x);
        if(it == m_keys.begin()) return std::nullopt;
        return *(it - 1);
    }

    bool contains(Key x) const { return std::binary_search(m_keys.begin(), m_keys.end(), x); }

    size_t size() const { return m_keys.size(); }
    bool empty() const { return m_keys.empty(); }

    std::span<const Key> keys() const { return m_keys; }

private:
    std::vector<Key> m_keys;
};

static_assert(PredecessorSet<OracleSet>);

} // namespace pred
