#pragma once

#include "qtenc/cu.hpp"
#include "qtenc/intra.hpp"

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace qtenc {

// Legal split modes for a CU under the simplified QTMT grammar:
//   QT  iff square, width >= 16, and no BT/TT occurred above
//   BT  iff the halved side stays >= 4
//   TT  iff the split-direction side is >= 16 (quarter parts >= 4)
// Empty at depth 6 or for 4x4 CUs.
std::vector<PartitionMode> legal_splits(const CuNode& cu);

// Children of `cu` under `mode`, in coding order. Asserts legality is the
// caller's concern only in that `mode` must be geometrically applicable.
std::vector<CuNode> split_children(const CuNode& cu, PartitionMode mode);

struct PartitionTree {
    CuNode cu;
    PartitionMode mode = PartitionMode::NONE;
    IntraMode intra_mode = IntraMode::DC; // leaves only
    RdCost cost;                          // subtree total
    std::vector<PartitionTree> children;

    bool is_leaf() const { return mode == PartitionMode::NONE; }
};

// Pluggable acceleration hooks. With all hooks disabled the search is
// exhaustive.
struct SearchHooks {
    // Maximum depth allowed for this CU's area; splits are tried only while
    // cu.depth < cap.
    std::function<std::optional<int>(const CuNode&)> depth_cap;
    // Ordering over candidate split modes; nullptr means canonical order.
    std::function<std::vector<PartitionMode>(const CuNode&)> mode_order;
    // Terminate the split-mode loop once a tested mode costs more than the
    // best found so far.
    bool early_stop = false;
};

// Split-mode loop with optional early termination: candidates are tested in
// the given order; with early_stop, a candidate whose cost exceeds the current
// minimum ends the loop. j_none is the already-evaluated no-split cost
// (infinity when no-split is not allowed). Returns the winning mode (NONE when
// the leaf wins) and its cost.
struct SplitChoice {
    PartitionMode mode = PartitionMode::NONE;
    double j = 0.0;
    int tested = 0; // split modes actually evaluated
};
SplitChoice ppbe_loop(const std::vector<PartitionMode>& ordered, double j_none, bool early_stop,
                      const std::function<std::optional<double>(PartitionMode)>& evaluate);

// Recursive QTMT search over one CTU. CUs extending past the frame edge are
// never coded as leaves; fully-outside children are skipped. Leaf evaluations
// and subtree results are memoized, which is exact because leaf costs depend
// only on geometry.
class CtuSearch {
public:
    CtuSearch(const FramePlane& plane, QpLambda qp, SearchHooks hooks = {});

    PartitionTree search(const CuNode& cu);

    // Leaf-cost evaluations performed (cache misses), for benchmarking.
    std::size_t leaf_evals() const { return leaf_evals_; }

private:
    PartitionTree search_impl(const CuNode& cu);
    const LeafEval& leaf_cost(const CuNode& cu);

    const FramePlane& plane_;
    QpLambda qp_;
    SearchHooks hooks_;
    std::unordered_map<std::uint64_t, LeafEval> leaf_cache_;
    std::unordered_map<std::uint64_t, PartitionTree> tree_cache_;
    std::size_t leaf_evals_ = 0;
};

// Per-8x8-block depth of the covering leaf; sub-8x8 leaves contribute the
// maximum over the block. `grid` is bw x bh row-major over the frame, and only
// cells under in-frame leaves are written.
void depth_grid_of(const PartitionTree& tree, std::vector<int>& grid, int blocks_wide);

// Walks every node. `fn(node)` is called parents-first, children in coding
// order.
void visit_tree(const PartitionTree& tree, const std::function<void(const PartitionTree&)>& fn);

} // namespace qtenc
