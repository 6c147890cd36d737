#pragma once

#include <vector>

namespace gfen {

// Exact solvers for the two 1D trail subproblems. Conventions:
//
//   tv1_prox(y, w):  argmin_z  1/2 ||z - y||^2 + sum_i w_i |z_{i+1} - z_i|
//   tv2_prox(y, w):  argmin_z  1/2 ||z - y||^2 + sum_i w_i (z_{i+1} - z_i)^2
//
// i.e. the quadratic data term always carries the 1/2 factor and the weight
// multiplies the edge-difference penalty as written. tv2 is the unique
// solution of the tridiagonal system (I + 2 L_w) z = y with L_w the weighted
// chain Laplacian; callers that think of the penalty as (lambda/2) * sum (.)^2
// pass lambda/2.

// Constant weight on all edges.
std::vector<double> tv1_prox(const std::vector<double>& y, double lambda);
std::vector<double> tv2_prox(const std::vector<double>& y, double lambda);

// Per-edge weights, weights.size() == y.size() - 1 (empty input allowed for
// length-1 signals). All weights must be >= 0.
std::vector<double> tv1_prox_weighted(const std::vector<double>& y, const std::vector<double>& weights);
std::vector<double> tv2_prox_weighted(const std::vector<double>& y, const std::vector<double>& weights);

// In-place variants over a raw span [z, z+n), used by the ADMM inner loop to
// avoid allocation. `scratch` must provide at least tv1: 6n doubles / tv2: 2n.
void tv1_prox_inplace(double* z, std::size_t n, double lambda, double* scratch);
void tv2_prox_inplace(double* z, std::size_t n, double lambda, double* scratch);

double tv1_penalty(const std::vector<double>& z);  // sum |z_{i+1} - z_i|
double tv2_penalty(const std::vector<double>& z);  // sum (z_{i+1} - z_i)^2

}  // namespace gfen
