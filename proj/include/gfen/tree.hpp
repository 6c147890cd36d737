#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfen/graph.hpp"

namespace gfen {

// One binary split of the support: parent interval [lo, hi) divided at
// `split` into [lo, split) and [split, hi). Values equal to the split point
// belong to the right child. `left`/`right` are child split indices, -1 for a
// leaf. Addresses are the 0/1 path from the root (root = "").
struct TreeSplit {
    std::string address;
    int level = 1;
    double lo = 0, hi = 0, split = 0;
    int left = -1, right = -1;
};

struct LeafInterval {
    double lo = 0, hi = 0;
};

class DyadicTree {
  public:
    DyadicTree() = default;
    DyadicTree(double support_lo, double support_hi, std::vector<TreeSplit> splits);

    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }
    const std::vector<TreeSplit>& splits() const { return splits_; }
    const std::vector<LeafInterval>& leaves() const { return leaves_; }  // sorted by lo
    int n_splits() const { return static_cast<int>(splits_.size()); }
    int n_leaves() const { return static_cast<int>(leaves_.size()); }
    int merged_splits() const { return merged_; }
    void set_merged_splits(int m) { merged_ = m; }

    // Leaf containing y; values >= support_hi fall into the last leaf.
    // Throws for y < support_lo.
    int leaf_of(double y) const;
    // Leaf index reached through a split's side when that side is terminal.
    int leaf_left(int split) const { return leaf_left_[split]; }
    int leaf_right(int split) const { return leaf_right_[split]; }

    std::string to_json() const;
    static DyadicTree from_json(const std::string& text);

  private:
    void index_leaves();

    double support_lo_ = 0, support_hi_ = 0;
    std::vector<TreeSplit> splits_;
    std::vector<LeafInterval> leaves_;
    std::vector<int> leaf_left_, leaf_right_;  // -1 when the side is internal
    int merged_ = 0;
};

// Balanced tree of the given depth with split points at dyadic quantiles of
// the pooled sample, plus one left-tail split at 0.5*(min + q_{1/2^d}) and
// right-tail splits from 7 uniformly spaced points on [q_{1-1/2^d}, tail_cap]
// (endpoints removed, chained so each right child is the next parent).
// Degenerate split points are merged and counted in merged_splits().
DyadicTree build_quantile_tree(std::vector<double> pooled_samples, int depth, double tail_cap);

// Balanced quantile tree only, over an explicit support. Used by the
// simulation harness where tail resolution is not needed.
DyadicTree build_balanced_tree(std::vector<double> pooled_samples, int depth,
                               double support_lo, double support_hi);

// Interpolated (type-7) empirical quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p);

// Per-vertex binomial counts for every split: attempts = points in the parent
// interval, successes = points in the left child.
struct SplitCounts {
    VertexId n_vertices = 0;
    std::vector<std::vector<std::int64_t>> attempts;   // [split][vertex]
    std::vector<std::vector<std::int64_t>> successes;  // [split][vertex]
    std::int64_t clamped = 0;

    std::int64_t total_points() const;  // root attempts summed over vertices
};

// observations[v] lists the sample values at vertex v. Observations below the
// support are rejected (error identifies the vertex and index); observations
// at or above the support's upper end clamp into the last leaf and are
// counted in `clamped`.
SplitCounts bin_observations(const DyadicTree& tree, VertexId n_vertices,
                             const std::vector<std::vector<double>>& observations);

}  // namespace gfen
