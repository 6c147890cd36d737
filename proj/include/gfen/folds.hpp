#pragma once

#include <cstdint>
#include <vector>

#include "gfen/admm.hpp"
#include "gfen/graph.hpp"
#include "gfen/tree.hpp"

namespace gfen {

// Node-wise fold labels: held-out folds are entire vertices, treated as
// missing-data vertices during the fold fit.
struct FoldAssignment {
    int k = 0;
    std::vector<int> fold;  // per vertex, in 0..k-1

    std::vector<std::int64_t> fold_sizes() const;
};

// Uniform random partition; fold sizes differ by at most one. Deterministic
// under the seed.
FoldAssignment assign_folds(VertexId n_vertices, int k, std::uint64_t seed);

struct CvOptions {
    AdmmOptions admm;
    // ridge applied automatically when both l2 penalties are zero (the
    // l1-only objective is not strictly convex once vertices go missing)
    double l1_only_ridge = 1e-8;
};

struct CvResult {
    PenaltyConfig penalties;
    double mean_nll = 0;  // total held-out NLL / total data points
    std::vector<double> fold_nll;             // per-fold held-out NLL totals
    std::vector<std::int64_t> fold_points;    // held-out data points per fold
    std::vector<int> empty_folds;             // folds contributing no data
    bool all_converged = true;
};

// Out-of-sample negative log-likelihood of the held-out counts under the
// fitted splitting probabilities, averaged over folds with data-point
// weights. `split_data` carries one entry per tree split; pass a single
// entry to tune one split in isolation.
CvResult cv_loss(const std::vector<BinomialNodeData>& split_data, VertexId n_vertices,
                 const TrailDecomposition& trails, const PenaltyConfig& penalties,
                 const FoldAssignment& folds, const CvOptions& opts = {});

// Held-out NLL of one fitted field against held-out counts.
double heldout_nll(const BinomialNodeData& heldout, const SplitField& beta);

}  // namespace gfen
