#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "predecessor_set.hpp"

namespace pred {

enum class TopKind {
    array, ///< one link per bucket number between the leftmost and rightmost active bucket
    hash,  ///< hash table over active bucket numbers, probed downward
};

enum class BucketKind {
    bitvector, ///< b bits
    list,      ///< unsorted list of truncated keys
    hybrid,    ///< list up to theta_max keys, bit vector above; back to a list below theta_min
};

/// Parameters of universe sampling. The bucket size is b = 2^k_b.
struct USConfig {
    unsigned k_b = 10;
    TopKind top = TopKind::array;
    BucketKind bucket = BucketKind::list;
    size_t theta_min = 512;
    size_t theta_max = 1024;
};

/// Read-only snapshot of an active bucket.
struct USBucketInfo {
    uint64_t index;
    size_t count;
    Key min_t;
    Key max_t;
    bool bitvector;
    size_t storage_bytes; ///< heap bytes of the bit vector or list
    std::vector<Key> keys; ///< truncated keys, ascending
};

/// \brief Two-level universe sampling.
///
/// The universe is cut into buckets of b consecutive keys. Bucket i holds the
/// low k_b bits ("truncated keys") of the keys in [i*b, (i+1)*b). A top level
/// finds the rightmost active bucket at or before a given bucket number.
///
/// Widths of 64 bits are rejected.
class UniverseSampling {
public:
    struct Impl;

    UniverseSampling(Universe universe, USConfig config = {});
    ~UniverseSampling();
    UniverseSampling(UniverseSampling&&) noexcept;
    UniverseSampling& operator=(UniverseSampling&&) noexcept;

    bool insert(Key x);
    bool erase(Key x);
    PredResult predecessor(Key x) const;
    size_t size() const;

    const USConfig& config() const { return m_config; }
    const Universe& universe() const { return m_universe; }

    uint64_t bucket_of(Key x) const { return x >> m_config.k_b; }
    Key truncated(Key x) const { return x & ((Key(1) << m_config.k_b) - 1); }

    /// Number of the rightmost active bucket with number <= i.
    std::optional<uint64_t> top_locate(uint64_t i) const;

    /// Predecessor of xt among the truncated keys of active bucket i.
    PredResult bucket_pred(uint64_t i, Key xt) const;

    std::optional<USBucketInfo> bucket(uint64_t i) const;
    size_t active_buckets() const;
    std::optional<uint64_t> i_min() const;
    std::optional<uint64_t> i_max() const;

    /// Heap bytes held by the structure (top level and buckets).
    size_t heap_bytes() const;

    /// \brief Checks bucket contents against their cached counts and extremes,
    /// the storage representation against the thresholds, and every top-level
    /// entry against a full scan. \throws std::logic_error on a violation
    void check_invariants() const;

private:
    Universe m_universe;
    USConfig m_config;
    std::unique_ptr<Impl> m_impl;
};

static_assert(PredecessorSet<UniverseSampling>);

} // namespace pred
