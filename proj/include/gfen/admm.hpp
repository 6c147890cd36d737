#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gfen/density.hpp"
#include "gfen/graph.hpp"
#include "gfen/tree.hpp"

namespace gfen {

// The four penalty hyperparameters. The fitted objective is
//
//   sum_v loss_v(beta_v)
//     + sum_d lambda_{d,1} sum_{E_d} |beta_v - beta_w|
//     + sum_d (lambda_{d,2}/2) sum_{E_d} (beta_v - beta_w)^2
//
// with d ranging over spatial/temporal edges. The 1/2 on the quadratic term
// pairs with Gaussian node losses of the form 1/2 sum (y - beta)^2; this is
// the normalization under which the closed-form chain solutions take their
// usual shape (l1 shifts data points by exactly lambda_1, the pure-l2 fit of
// a missing middle vertex shrinks the gap by lambda_2/(1+lambda_2)).
struct PenaltyConfig {
    double lambda_s1 = 0, lambda_s2 = 0, lambda_t1 = 0, lambda_t2 = 0;

    double l1(EdgeKind d) const { return d == EdgeKind::spatial ? lambda_s1 : lambda_t1; }
    double l2(EdgeKind d) const { return d == EdgeKind::spatial ? lambda_s2 : lambda_t2; }
    bool valid() const {
        return lambda_s1 >= 0 && lambda_s2 >= 0 && lambda_t1 >= 0 && lambda_t2 >= 0;
    }
};

struct AdmmOptions {
    double rel_tol = 1e-6;
    int max_iters = 5000;
    double alpha0 = 1.0;
    // residual balancing (scale alpha when primal/dual residuals drift apart)
    double balance_ratio = 10.0;
    double balance_scale = 2.0;
    double alpha_min = 1e-4;
    double alpha_max = 1e4;
    double newton_step_cap = 4.0;   // max |delta beta| per update
    double ridge = 0.0;             // coefficient r of r*||beta||^2 added to the loss
    double beta_clamp = 30.0;       // hard bound on |beta|, keeps omega in (0,1)
    std::ostream* diagnostics = nullptr;  // per-iteration CSV when set
};

struct AdmmReport {
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0;  // relative, at exit
    double dual_residual = 0;
    double alpha = 0;
    double objective = 0;
    bool nonstrict_warning = false;  // l2 penalties all zero with missing-data vertices
};

// Binomial node data for one tree split.
struct BinomialNodeData {
    std::vector<std::int64_t> attempts;
    std::vector<std::int64_t> successes;

    static BinomialNodeData from_counts(const SplitCounts& counts, int split) {
        return {counts.attempts[split], counts.successes[split]};
    }
};

// Gaussian node data: per-vertex sample count / sum / sum of squares, node
// loss 1/2 sum_i (y_i - beta)^2.
struct GaussianNodeData {
    std::vector<std::int64_t> n;
    std::vector<double> sum;
    std::vector<double> sumsq;

    static GaussianNodeData from_observations(const std::vector<std::vector<double>>& obs);
};

// MAP estimate of one split field by ADMM over the trail decomposition.
// The beta update applies one guarded Newton step on the node loss plus the
// quadratic consensus terms; slack updates call the exact 1D solvers with the
// trail kind's penalties; step size adapts by residual balancing.
SplitField fit_map(const BinomialNodeData& data, VertexId n_vertices,
                   const TrailDecomposition& trails, const PenaltyConfig& penalties,
                   const AdmmOptions& opts = {}, AdmmReport* report = nullptr);

SplitField fit_map_gaussian(const GaussianNodeData& data, VertexId n_vertices,
                            const TrailDecomposition& trails, const PenaltyConfig& penalties,
                            const AdmmOptions& opts = {}, AdmmReport* report = nullptr);

// l1-only mode with the small ridge 1e-8*||beta||^2 that keeps the problem
// well posed under missing data, and l2-only mode. Used by the benchmark.
SplitField fit_gfl(const BinomialNodeData& data, VertexId n_vertices,
                   const TrailDecomposition& trails, double lambda_s, double lambda_t,
                   const AdmmOptions& opts = {}, AdmmReport* report = nullptr);
SplitField fit_gmrf(const BinomialNodeData& data, VertexId n_vertices,
                    const TrailDecomposition& trails, double lambda_s, double lambda_t,
                    const AdmmOptions& opts = {}, AdmmReport* report = nullptr);

double gfen_objective(const BinomialNodeData& data, const TrailDecomposition& trails,
                      const PenaltyConfig& penalties, const SplitField& beta, double ridge = 0.0);
double gfen_objective_gaussian(const GaussianNodeData& data, const TrailDecomposition& trails,
                               const PenaltyConfig& penalties, const SplitField& beta,
                               double ridge = 0.0);

}  // namespace gfen
