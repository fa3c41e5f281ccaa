#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "int_hash_map.hpp"
#include "predecessor_set.hpp"

namespace pred {

/// Parameters of the y-fast trie. Buckets hold between gamma*t and c*t keys.
struct YFastConfig {
    unsigned t = 128;     ///< target bucket size
    double c = 2.0;       ///< split factor
    double gamma = 0.25;  ///< merge factor
    bool sorted = false;  ///< keep bucket contents sorted (binary search) instead of unsorted (linear scan)
};

/// \brief Y-fast trie: an x-fast trie over bucket representatives, with
/// buckets of keys stored as plain (sorted or unsorted) arrays.
///
/// The x-fast trie is kept in a level-search structure (LSS) of one hash map
/// per level, keyed by the node's path prefix. Only nodes that are a branching
/// node or an ancestor of one are stored; the unary tails below them are
/// implied by the descendant links. A vertical binary search for a key's
/// bucket is limited to the levels between the bottommost complete level
/// (ell_top) and the level below the deepest branching node (ell_bot).
///
/// A bucket keeps its representative when that key is deleted ("dead"
/// representative). A special bucket with representative minus infinity
/// precedes all others; it may become empty and is never merged away.
class YFastTrie {
public:
    struct BucketSpec {
        Key rep;
        std::vector<Key> keys;
    };

    /// Snapshot of a bucket for inspection.
    struct BucketView {
        bool minus_infinity;
        Key rep;
        bool rep_dead;
        std::vector<Key> keys; ///< ascending
        friend bool operator==(const BucketView&, const BucketView&) = default;
    };

private:
    struct Bucket {
        Key rep = 0;
        bool rep_dead = false;
        bool minus_inf = false;
        std::vector<Key> keys;
        Bucket* prev = nullptr;
        Bucket* next = nullptr;
    };

    struct LssNode {
        Bucket* desc_min = nullptr;
        Bucket* desc_max = nullptr;
        bool has_left = false;
        bool has_right = false;
    };

    Universe m_universe;
    YFastConfig m_config;
    size_t m_lower;
    size_t m_upper;

    Bucket m_head; // the minus infinity bucket
    size_t m_size = 0;
    size_t m_reps = 0;

    std::vector<IntHashMap<LssNode>> m_levels; // levels [0, w)
    std::vector<size_t> m_node_count;          // nodes per level [0, w], including implied ones
    std::vector<size_t> m_branch_count;        // branching nodes per level [0, w)
    unsigned m_top = 0;
    unsigned m_bot = 0;

    unsigned w() const { return m_universe.bits(); }
    Key prefix(Key x, unsigned level) const { return level == 0 ? 0 : x >> (w() - level); }
    bool bit_at(Key x, unsigned level) const { return (x >> (w() - 1 - level)) & 1; }
    unsigned branch_level(Key a, Key b) const;

    void refresh_levels();
    void insert_rep(Bucket* b);
    void remove_rep(Bucket* b);

    Bucket* locate(Key x) const;
    void split(Bucket* b);
    void merge(Bucket* b);

    bool bucket_contains(const Bucket* b, Key x) const;
    PredResult bucket_pred(const Bucket* b, Key x) const;
    static Key bucket_max(const Bucket* b);

    static BucketView view(const Bucket* b);
    void release();

public:
    YFastTrie(Universe universe, YFastConfig config = {});
    ~YFastTrie();

    YFastTrie(const YFastTrie&) = delete;
    YFastTrie& operator=(const YFastTrie&) = delete;
    YFastTrie(YFastTrie&&) = delete;
    YFastTrie& operator=(YFastTrie&&) = delete;

    /// \brief Builds a trie from explicit buckets.
    ///
    /// \param minus_infinity keys of the minus infinity bucket
    /// \param buckets real buckets in ascending order; a bucket's rep may be
    ///   absent from its keys, in which case it is a dead representative
    void assemble(std::span<const Key> minus_infinity, const std::vector<BucketSpec>& buckets);

    bool insert(Key x);
    bool erase(Key x);
    PredResult predecessor(Key x) const;
    size_t size() const { return m_size; }

    const YFastConfig& config() const { return m_config; }
    const Universe& universe() const { return m_universe; }

    /// The bucket whose representative is the predecessor of x among all representatives.
    BucketView locate_bucket(Key x) const;

    /// All buckets in order, starting with the minus infinity bucket.
    std::vector<BucketView> buckets() const;

    unsigned ell_top() const { return m_top; }
    unsigned ell_bot() const { return m_bot; }
    size_t representative_count() const { return m_reps; }
    size_t lss_nodes(unsigned level) const { return level < m_levels.size() ? m_levels[level].size() : 0; }

    /// \brief Recomputes the LSS, level bounds and bucket bounds from the
    /// bucket list and compares them to the maintained state.
    /// \throws std::logic_error describing the first mismatch
    void check_invariants() const;
};

static_assert(PredecessorSet<YFastTrie>);

} // namespace pred
