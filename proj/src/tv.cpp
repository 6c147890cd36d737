#include "gfen/tv.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gfen {

namespace {

// Dynamic programming over the derivative of the Bellman value function
// V_i(b) = min over z_1..z_{i-1} with z_i = b. V_i' is continuous, piecewise
// linear and strictly increasing (every segment has slope >= 1), so the
// min-convolution with w|.| clips it to [-w, +w] between two thresholds.
// The thresholds are kept per edge for the backward pass:
//   z_n = root of V_n',   z_i = clamp(z_{i+1}, lo_i, hi_i).
//
// Knots live in a deque window over preallocated arrays; each knot stores the
// (slope, intercept) of the segment ABOVE it, and (base_a, base_b) covers
// everything below the first knot. Appending a data term adds (1, -y) to all
// segments, tracked lazily via a global offset. Scratch: 8n doubles.
template <class WeightAt>
void tv1_dp(double* z, std::size_t n, WeightAt w, double* scratch) {
    if (n <= 1) return;
    double* kx = scratch;
    double* ka = scratch + 2 * n;
    double* kb = scratch + 4 * n;
    double* tlo = scratch + 6 * n;
    double* thi = scratch + 7 * n;

    std::size_t lo = n - 1, hi = n - 1;  // window [lo, hi)
    double base_a = 1.0, base_b = -z[0];
    double ga = 0.0, gb = 0.0;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double lam = w(i);
        // left threshold: first x with V'(x) = -lam
        double ca = base_a, cb = base_b;
        while (lo < hi && (ca + ga) * kx[lo] + (cb + gb) < -lam) {
            ca = ka[lo];
            cb = kb[lo];
            ++lo;
        }
        const double t_lo = (-lam - (cb + gb)) / (ca + ga);
        --lo;
        kx[lo] = t_lo;
        ka[lo] = ca;
        kb[lo] = cb;
        base_a = -ga;
        base_b = -lam - gb;
        // right threshold: last x with V'(x) = +lam
        ca = ka[hi - 1];
        cb = kb[hi - 1];
        while (hi > lo + 1 && (ca + ga) * kx[hi - 1] + (cb + gb) > lam) {
            --hi;
            ca = hi > lo ? ka[hi - 1] : base_a;
            cb = hi > lo ? kb[hi - 1] : base_b;
        }
        const double t_hi = (lam - (cb + gb)) / (ca + ga);
        kx[hi] = t_hi;
        ka[hi] = -ga;
        kb[hi] = lam - gb;
        ++hi;
        tlo[i] = t_lo;
        thi[i] = t_hi;
        // absorb the next data term
        ga += 1.0;
        gb -= z[i + 1];
    }

    double ca = base_a, cb = base_b;
    std::size_t k = lo;
    while (k < hi && (ca + ga) * kx[k] + (cb + gb) < 0.0) {
        ca = ka[k];
        cb = kb[k];
        ++k;
    }
    z[n - 1] = -(cb + gb) / (ca + ga);
    for (std::size_t i = n - 1; i-- > 0;) z[i] = std::clamp(z[i + 1], tlo[i], thi[i]);
}

// Thomas elimination on (I + 2 L_w) z = y, L_w the weighted chain Laplacian.
// Scratch: 2n doubles.
template <class WeightAt>
void tv2_thomas(double* z, std::size_t n, WeightAt w, double* scratch) {
    if (n <= 1) return;
    double* c = scratch;      // modified super-diagonal
    double* d = scratch + n;  // modified rhs
    auto off = [&](std::size_t i) { return -2.0 * w(i); };
    auto diag = [&](std::size_t i) {
        double s = 1.0;
        if (i > 0) s += 2.0 * w(i - 1);
        if (i + 1 < n) s += 2.0 * w(i);
        return s;
    };
    c[0] = off(0) / diag(0);
    d[0] = z[0] / diag(0);
    for (std::size_t i = 1; i < n; ++i) {
        const double m = diag(i) - off(i - 1) * c[i - 1];
        c[i] = (i + 1 < n) ? off(i) / m : 0.0;
        d[i] = (z[i] - off(i - 1) * d[i - 1]) / m;
    }
    z[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) z[i] = d[i] - c[i] * z[i + 1];
}

void check_weights(std::size_t n, const std::vector<double>& weights, const char* who) {
    if (n > 1 && weights.size() != n - 1)
        throw std::invalid_argument(std::string(who) + ": need one weight per edge");
    for (double w : weights)
        if (!(w >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative weight");
}

}  // namespace

void tv1_prox_inplace(double* z, std::size_t n, double lambda, double* scratch) {
    tv1_dp(z, n, [lambda](std::size_t) { return lambda; }, scratch);
}

void tv2_prox_inplace(double* z, std::size_t n, double lambda, double* scratch) {
    tv2_thomas(z, n, [lambda](std::size_t) { return lambda; }, scratch);
}

std::vector<double> tv1_prox_weighted(const std::vector<double>& y, const std::vector<double>& weights) {
    check_weights(y.size(), weights, "tv1_prox_weighted");
    std::vector<double> z = y;
    if (y.size() <= 1) return z;
    std::vector<double> scratch(8 * y.size());
    tv1_dp(z.data(), z.size(), [&](std::size_t i) { return weights[i]; }, scratch.data());
    return z;
}

std::vector<double> tv1_prox(const std::vector<double>& y, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("tv1_prox: lambda must be >= 0");
    std::vector<double> z = y;
    if (y.size() <= 1) return z;
    std::vector<double> scratch(8 * y.size());
    tv1_prox_inplace(z.data(), z.size(), lambda, scratch.data());
    return z;
}

std::vector<double> tv2_prox_weighted(const std::vector<double>& y, const std::vector<double>& weights) {
    check_weights(y.size(), weights, "tv2_prox_weighted");
    std::vector<double> z = y;
    if (y.size() <= 1) return z;
    std::vector<double> scratch(2 * y.size());
    tv2_thomas(z.data(), z.size(), [&](std::size_t i) { return weights[i]; }, scratch.data());
    return z;
}

std::vector<double> tv2_prox(const std::vector<double>& y, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("tv2_prox: lambda must be >= 0");
    std::vector<double> z = y;
    if (y.size() <= 1) return z;
    std::vector<double> scratch(2 * y.size());
    tv2_prox_inplace(z.data(), z.size(), lambda, scratch.data());
    return z;
}

double tv1_penalty(const std::vector<double>& z) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) s += std::abs(z[i + 1] - z[i]);
    return s;
}

double tv2_penalty(const std::vector<double>& z) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) s += (z[i + 1] - z[i]) * (z[i + 1] - z[i]);
    return s;
}

}  // namespace gfen
