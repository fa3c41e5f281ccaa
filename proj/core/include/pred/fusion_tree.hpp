#pragma once

#include "btree_core.hpp"
#include "fusion_node.hpp"

namespace pred {

namespace detail {

// fusion node adapted to the B-tree key policy
template<unsigned K>
class FusionKeys : public FusionNode<K> {
public:
    bool canonical() const { return *this == FusionNode<K>::rebuild(this->keys()); }
};

} // namespace detail

/// \brief Fusion tree: a B-tree of degree K whose nodes are dynamic fusion
/// nodes, so the splitter search in each node is a fusion node rank query.
template<unsigned K>
class FusionTree : public detail::BTreeCore<detail::FusionKeys<K>, K, RankSearch> {
    using Base = detail::BTreeCore<detail::FusionKeys<K>, K, RankSearch>;

public:
    explicit FusionTree(RankSearch search = RankSearch::packed) : Base(search) {}
};

static_assert(PredecessorSet<FusionTree<8>>);

} // namespace pred
