#pragma once

#include <functional>
#include <random>

namespace gfen {

struct ArsOptions {
    int max_widen = 64;        // geometric widenings allowed per bound
    int max_rejections = 10000;
    double widen_start = 1.0;  // initial perturbation added beyond each bound
};

// Adaptive rejection sampling for a log-concave density on the real line
// (Gilks & Wild style, tangent upper hull, hull refined on rejection).
// `logdens`/`dlogdens` evaluate the unnormalized log-density and a
// (sub)derivative. init_lo/init_hi must bracket the mode; the slope
// condition dlogdens(lo) > 0 > dlogdens(hi) is established by geometric
// widening and failure to establish it throws.
double ars_sample(const std::function<double(double)>& logdens,
                  const std::function<double(double)>& dlogdens, double init_lo, double init_hi,
                  std::mt19937_64& rng, const ArsOptions& opts = {});

}  // namespace gfen
