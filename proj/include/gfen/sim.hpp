#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gfen/admm.hpp"
#include "gfen/folds.hpp"
#include "gfen/graph.hpp"
#include "gfen/tree.hpp"

namespace gfen {

enum class EffectKind { pw_constant, pw_linear, mixed };

EffectKind effect_kind_from_string(const std::string& s);
std::string to_string(EffectKind k);

// Effect vector over N grid positions: anchor values drawn uniformly on
// [-1,1] at {0, N/3, 2N/3, N}; constant segments repeat the left anchor,
// linear segments interpolate between anchors, mixed assigns segment types at
// random with at least one of each.
std::vector<double> generate_effect(EffectKind kind, int n, std::mt19937_64& rng);

// Deterministic core: segment s spans [cut_s, cut_{s+1}) with cuts at
// {0, n/3, 2n/3, n}; linear[s] selects interpolation toward the next anchor.
std::vector<double> effect_from_anchors(const std::array<double, 4>& anchors,
                                        const std::array<bool, 3>& linear, int n);

// Density smoothing task on an N x N space-time grid: ground truth at vertex
// (s,t) is the two-component Gaussian mixture
//   f(s,t) = 1/2 N(nu1(s) mu1(t), sigma) + 1/2 N(nu2(s) mu2(t), sigma).
struct SimTask {
    int grid = 30;
    EffectKind spatial_kind = EffectKind::pw_constant;
    EffectKind temporal_kind = EffectKind::pw_constant;
    double sigma = 0.2;
    double missing_fraction = 0.1;
    int samples_per_vertex = 10;
    bool outliers = false;  // one 10-sigma draw at half of the observed vertices
    int eval_samples = 100;
    std::uint64_t seed = 0;

    std::string family_name() const;
};

struct SimData {
    std::vector<double> nu1, nu2;  // spatial effects, length N
    std::vector<double> mu1, mu2;  // temporal effects, length N
    std::vector<char> missing;     // per vertex
    std::vector<std::vector<double>> observations;  // per vertex training samples
    std::vector<std::vector<double>> eval;          // fresh ground-truth draws per vertex

    double true_mean1(VertexId v, int times) const {
        return nu1[v / times] * mu1[v % times];
    }
    double true_mean2(VertexId v, int times) const {
        return nu2[v / times] * mu2[v % times];
    }
};

// Grid graph for the task: N locations on a chain crossed with N time slots.
SpatioTemporalGraph sim_graph(int n);

SimData sample_task(const SimTask& task);

// Ground-truth log-density at a vertex.
double true_logdensity(const SimTask& task, const SimData& data, VertexId v, double y);

struct BenchmarkOptions {
    int n_lambda = 24;     // hyperparameter draws per method
    int folds = 5;
    int tree_depth = 3;
    double log10_lo = -2.0;
    double log10_hi = 7.0;
    AdmmOptions cv_admm;       // tolerances for fold fits
    AdmmOptions final_admm;    // tolerances for the selected refit
    std::uint64_t seed = 0;

    BenchmarkOptions() {
        cv_admm.rel_tol = 1e-4;
        cv_admm.max_iters = 2000;
        final_admm.rel_tol = 1e-5;
        final_admm.max_iters = 4000;
    }
};

struct BenchmarkRow {
    std::string method;  // gfl | gfen | gmrf
    PenaltyConfig selected;
    double cv_nll = 0;
    double eval_nll = 0;          // mean NLL of eval draws under the refit densities
    double eval_nll_missing = 0;  // restricted to missing vertices
    int discarded_draws = 0;
};

// One simulated dataset, all requested methods: draw shared log10-uniform
// penalty candidates, apply each method's norm restriction, select by
// node-wise CV, refit on all data, score the evaluation draws.
std::vector<BenchmarkRow> run_benchmark(const SimTask& task, const std::vector<std::string>& methods,
                                        const BenchmarkOptions& opts);

// Mean NLL of the evaluation draws under the pooled (graph-free) density and
// under the ground truth; baselines for the interpolation checks.
struct BaselineNll {
    double pooled = 0;
    double pooled_missing = 0;
    double truth = 0;
};
BaselineNll benchmark_baselines(const SimTask& task, const BenchmarkOptions& opts);

}  // namespace gfen
