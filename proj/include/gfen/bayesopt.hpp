#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gfen/admm.hpp"

namespace gfen {

// Gaussian-process surrogate over log10-penalty space with the radial kernel
// K_ij = exp(-a ||x_i - x_j||^2) plus observation noise sigma^2 on the
// diagonal. Losses are standardized before conditioning.
struct GpSurrogate {
    double kernel_a = 0.15;
    double noise_sigma = 0.1;

    // Posterior of the latent function given standardized observations z at
    // points X, evaluated at query points; dims beyond `dims` are ignored.
    static void posterior(const std::vector<std::array<double, 4>>& X, const std::vector<double>& z,
                          int dims, double a, double sigma,
                          const std::vector<std::array<double, 4>>& Xq, std::vector<double>& mean,
                          std::vector<double>& var);
};

// Bayesian-optimization search over the penalty hyperparameters for one
// objective (one tree split, or all splits when tuning a shared penalty).
// Points live in log10 space inside [box_lo, box_hi]; inactive dimensions are
// pinned to zero penalty (the GFL/GMRF restrictions).
struct BayesOptState {
    std::array<bool, 4> active{true, true, true, true};  // s1, s2, t1, t2
    double box_lo = -2.0;
    double box_hi = 7.0;
    double kernel_a = 0.15;
    double noise_sigma = 0.1;
    int candidate_pool = 512;
    std::uint64_t seed = 0;
    int generation = 0;

    std::vector<std::array<double, 4>> points;  // log10 lambda, inactive dims 0
    std::vector<double> losses;

    void record(const std::array<double, 4>& log_lambda, double loss);
    PenaltyConfig to_penalties(const std::array<double, 4>& log_lambda) const;

    // First generation falls back to uniform sampling of the box; afterwards
    // candidates are the lowest posterior samples over a uniform pool.
    std::vector<std::array<double, 4>> propose_candidates(int n);

    // Evaluated point with the lowest posterior mean (lower index on ties).
    std::array<double, 4> select_best() const;
};

}  // namespace gfen
