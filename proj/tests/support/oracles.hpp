#pragma once

// Test-only oracles: independent brute-force solvers and closed forms used to
// freeze expected values. Nothing here may call into the solver paths under
// test (tv1_prox/tv2_prox/fit_map), except where a test explicitly compares
// the two routes.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace gfen::testing {

// 1D fused lasso by projected FISTA on the box-constrained dual followed by
// an exact segment polish verified against the KKT conditions.
std::vector<double> brute_force_tv1(const std::vector<double>& y, const std::vector<double>& weights);
std::vector<double> brute_force_tv1(const std::vector<double>& y, double lambda);

// Dense Gaussian elimination on (I + 2 L_w) z = y.
std::vector<double> brute_force_tv2(const std::vector<double>& y, const std::vector<double>& weights);
std::vector<double> brute_force_tv2(const std::vector<double>& y, double lambda);

double tv_objective1(const std::vector<double>& y, const std::vector<double>& z,
                     const std::vector<double>& weights);
double tv_objective2(const std::vector<double>& y, const std::vector<double>& z,
                     const std::vector<double>& weights);

// ---- closed forms for the 3-vertex chain with a missing middle vertex ----
//
// Gaussian node losses 1/2 (y_i - b_i)^2 at vertices 1 and 3, penalties
// lambda1 * sum |diff| + (lambda2/2) * sum diff^2 on the two chain edges.
// For lambda1 < (y3-y1)/2 the solution is
//   b1 = y1 + s,  b3 = y3 - s,  b2 = (b1+b3)/2,
//   s  = (lambda1 + lambda2 * (y3-y1)/2) / (1 + lambda2),
// and for lambda1 >= (y3-y1)/2 everything collapses to (y1+y3)/2. The pure-l1
// and pure-l2 specializations are the familiar chain solutions (shift by
// lambda1; shrink the gap by lambda2/(1+lambda2)). With both penalties active
// the l1 shift applies to the already-shrunken gap, so the combined shift
// carries a cross term; the specializations are unchanged.
struct Chain3Solution {
    double b1, b2, b3;
    bool fused;
    bool b2_free;  // pure-l1 with missing middle: any b2 in [b1, b3] is optimal
};

Chain3Solution chain3_gaussian(double y1, double y3, double lambda1, double lambda2);

// Binomial node losses -s log(w) - (m-s) log(1-w) at vertices 1 and 3,
// same penalties. Pure-l1 has the closed form w1 = (s1+lambda1)/m1,
// w3 = (s3-lambda1)/m3 with fusion at the pooled rate once
// lambda1 >= (m1 s3 - m3 s1)/(m1+m3). With any l2 weight the stationarity
// system is solved exactly by a damped 2D Newton iteration.
Chain3Solution chain3_binomial(std::int64_t m1, std::int64_t s1, std::int64_t m3, std::int64_t s3,
                               double lambda1, double lambda2);

double chain3_binomial_fusion_threshold(std::int64_t m1, std::int64_t s1, std::int64_t m3,
                                        std::int64_t s3);

// Optimality certificate for the 3-vertex objectives: the smallest analytic
// one-sided directional derivative over the sign-vector directions, which is
// >= 0 exactly at a global minimum (the nonsmooth terms are polyhedral, so
// those directions cover every cone of the subdivision).
double chain3_stationarity_gap_gaussian(double y1, double y3, double lambda1, double lambda2,
                                        const std::array<double, 3>& beta);
double chain3_stationarity_gap_binomial(std::int64_t m1, std::int64_t s1, std::int64_t m3,
                                        std::int64_t s3, double lambda1, double lambda2,
                                        const std::array<double, 3>& beta);

// Coarse-to-fine grid search over a convex trivariate function.
std::array<double, 3> grid_zoom3(const std::function<double(double, double, double)>& f,
                                 std::array<double, 3> lo, std::array<double, 3> hi,
                                 int levels = 48, int pts = 13);

// ---- scalar quadrature and distribution checks ----

// Posterior mean of exp(logdens) over [lo, hi] by Simpson's rule.
double quadrature_mean(const std::function<double(double)>& logdens, double lo, double hi,
                       int n = 200001);

// Kolmogorov-Smirnov statistic of draws against an analytic CDF.
double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf);

// One-sided paired t statistic for mean(a - b) > 0.
double paired_t_statistic(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gfen::testing
