#include "qtenc/qtmt.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtenc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t cu_key(const CuNode& cu) {
    auto lg = [](int v) { return std::uint64_t(std::bit_width(unsigned(v)) - 1); };
    return std::uint64_t(cu.x0) | (std::uint64_t(cu.y0) << 16) | (lg(cu.width) << 32) |
           (lg(cu.height) << 36) | (std::uint64_t(cu.depth) << 40) |
           (std::uint64_t(cu.mtt_started) << 44);
}

} // namespace

std::vector<PartitionMode> legal_splits(const CuNode& cu) {
    std::vector<PartitionMode> out;
    if (cu.depth >= kMaxDepth || (cu.width == 4 && cu.height == 4))
        return out;
    if (cu.width == cu.height && cu.width >= 16 && !cu.mtt_started)
        out.push_back(PartitionMode::QT);
    if (cu.height >= 8)
        out.push_back(PartitionMode::BTH);
    if (cu.width >= 8)
        out.push_back(PartitionMode::BTV);
    if (cu.height >= 16)
        out.push_back(PartitionMode::TTH);
    if (cu.width >= 16)
        out.push_back(PartitionMode::TTV);
    return out;
}

std::vector<CuNode> split_children(const CuNode& cu, PartitionMode mode) {
    int d = cu.depth + 1;
    std::vector<CuNode> out;
    switch (mode) {
    case PartitionMode::NONE:
        break;
    case PartitionMode::QT: {
        int w = cu.width / 2, h = cu.height / 2;
        out = {{cu.x0, cu.y0, w, h, d, cu.mtt_started},
               {cu.x0 + w, cu.y0, w, h, d, cu.mtt_started},
               {cu.x0, cu.y0 + h, w, h, d, cu.mtt_started},
               {cu.x0 + w, cu.y0 + h, w, h, d, cu.mtt_started}};
        break;
    }
    case PartitionMode::BTH: {
        int h = cu.height / 2;
        out = {{cu.x0, cu.y0, cu.width, h, d, true},
               {cu.x0, cu.y0 + h, cu.width, h, d, true}};
        break;
    }
    case PartitionMode::BTV: {
        int w = cu.width / 2;
        out = {{cu.x0, cu.y0, w, cu.height, d, true},
               {cu.x0 + w, cu.y0, w, cu.height, d, true}};
        break;
    }
    case PartitionMode::TTH: {
        int q = cu.height / 4;
        out = {{cu.x0, cu.y0, cu.width, q, d, true},
               {cu.x0, cu.y0 + q, cu.width, 2 * q, d, true},
               {cu.x0, cu.y0 + 3 * q, cu.width, q, d, true}};
        break;
    }
    case PartitionMode::TTV: {
        int q = cu.width / 4;
        out = {{cu.x0, cu.y0, q, cu.height, d, true},
               {cu.x0 + q, cu.y0, 2 * q, cu.height, d, true},
               {cu.x0 + 3 * q, cu.y0, q, cu.height, d, true}};
        break;
    }
    }
    return out;
}

SplitChoice ppbe_loop(const std::vector<PartitionMode>& ordered, double j_none, bool early_stop,
                      const std::function<std::optional<double>(PartitionMode)>& evaluate) {
    SplitChoice choice{PartitionMode::NONE, j_none, 0};
    double j_min = j_none;
    for (PartitionMode m : ordered) {
        std::optional<double> j_cur = evaluate(m);
        if (!j_cur)
            continue;
        ++choice.tested;
        if (*j_cur < j_min) {
            j_min = *j_cur;
            choice.mode = m;
            choice.j = j_min;
        } else if (early_stop && *j_cur > j_min) {
            break;
        }
    }
    return choice;
}

CtuSearch::CtuSearch(const FramePlane& plane, QpLambda qp, SearchHooks hooks)
    : plane_(plane), qp_(qp), hooks_(std::move(hooks)) {}

const LeafEval& CtuSearch::leaf_cost(const CuNode& cu) {
    std::uint64_t key = std::uint64_t(cu.x0) | (std::uint64_t(cu.y0) << 16) |
                        (std::uint64_t(cu.width) << 32) | (std::uint64_t(cu.height) << 48);
    auto it = leaf_cache_.find(key);
    if (it == leaf_cache_.end()) {
        ++leaf_evals_;
        it = leaf_cache_.emplace(key, cu_rd_cost(plane_, cu, qp_)).first;
    }
    return it->second;
}

PartitionTree CtuSearch::search(const CuNode& cu) {
    PartitionTree tree = search_impl(cu);
    if (!std::isfinite(tree.cost.j))
        throw std::logic_error("CtuSearch: no codable tree for CTU");
    return tree;
}

PartitionTree CtuSearch::search_impl(const CuNode& cu) {
    std::uint64_t key = cu_key(cu);
    if (auto it = tree_cache_.find(key); it != tree_cache_.end())
        return it->second;

    bool inside = cu.x0 + cu.width <= plane_.width && cu.y0 + cu.height <= plane_.height;
    bool none_allowed = inside && cu.depth >= 1;

    PartitionTree leaf;
    leaf.cu = cu;
    leaf.mode = PartitionMode::NONE;
    leaf.cost.j = kInf;
    if (none_allowed) {
        const LeafEval& eval = leaf_cost(cu);
        leaf.cost = eval.cost;
        leaf.intra_mode = eval.best_mode;
    }

    std::vector<PartitionMode> candidates = legal_splits(cu);
    if (inside) {
        if (hooks_.depth_cap) {
            std::optional<int> cap = hooks_.depth_cap(cu);
            if (cap && cu.depth >= *cap)
                candidates.clear();
        }
        if (!candidates.empty() && hooks_.mode_order) {
            std::vector<PartitionMode> ordered = hooks_.mode_order(cu);
            std::vector<PartitionMode> filtered;
            for (PartitionMode m : ordered)
                for (PartitionMode legal : candidates)
                    if (m == legal)
                        filtered.push_back(m);
            candidates = std::move(filtered);
        }
    }

    std::vector<PartitionTree> mode_trees(kSplitModes.size());
    auto evaluate = [&](PartitionMode mode) -> std::optional<double> {
        PartitionTree t;
        t.cu = cu;
        t.mode = mode;
        t.cost.rate_bits = kSplitSignalBits;
        t.cost.j = qp_.lambda * kSplitSignalBits;
        for (const CuNode& child : split_children(cu, mode)) {
            if (child.x0 >= plane_.width || child.y0 >= plane_.height)
                continue; // fully outside the frame, nothing to code
            PartitionTree sub = search_impl(child);
            t.cost.distortion += sub.cost.distortion;
            t.cost.rate_bits += sub.cost.rate_bits;
            t.cost.j += sub.cost.j;
            t.children.push_back(std::move(sub));
        }
        double j = t.cost.j;
        mode_trees[std::size_t(mode) - 1] = std::move(t);
        return j;
    };

    SplitChoice choice =
        ppbe_loop(candidates, leaf.cost.j, inside && hooks_.early_stop, evaluate);

    PartitionTree best = choice.mode == PartitionMode::NONE
                             ? std::move(leaf)
                             : std::move(mode_trees[std::size_t(choice.mode) - 1]);
    tree_cache_.emplace(key, best);
    return best;
}

void depth_grid_of(const PartitionTree& tree, std::vector<int>& grid, int blocks_wide) {
    if (tree.is_leaf()) {
        const CuNode& cu = tree.cu;
        for (int by = cu.y0 / 8; by <= (cu.y0 + cu.height - 1) / 8; ++by)
            for (int bx = cu.x0 / 8; bx <= (cu.x0 + cu.width - 1) / 8; ++bx) {
                int& cell = grid[std::size_t(by) * blocks_wide + bx];
                cell = std::max(cell, cu.depth);
            }
        return;
    }
    for (const PartitionTree& child : tree.children)
        depth_grid_of(child, grid, blocks_wide);
}

void visit_tree(const PartitionTree& tree, const std::function<void(const PartitionTree&)>& fn) {
    fn(tree);
    for (const PartitionTree& child : tree.children)
        visit_tree(child, fn);
}

} // namespace qtenc
