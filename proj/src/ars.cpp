#include "gfen/ars.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gfen {

namespace {

struct HullPoint {
    double x, h, dh;
};

// log of int_a^b exp(v0 + s*(x-a)) dx, with a=-inf / b=+inf allowed when the
// slope sign makes the integral finite. v0 is the tangent value at a (or at b
// for the a=-inf case).
double log_segment_mass(double a, double b, double va, double s) {
    if (std::isinf(a)) return va - std::log(s);    // requires s > 0, va at b
    if (std::isinf(b)) return va - std::log(-s);   // requires s < 0
    const double w = b - a;
    if (std::abs(s) < 1e-12) return va + std::log(w);
    // log((exp(s w) - 1)/s), stable for both signs
    if (s > 0) return va + s * w + std::log1p(-std::exp(-s * w)) - std::log(s);
    return va + std::log1p(-std::exp(s * w)) - std::log(-s);
}

}  // namespace

double ars_sample(const std::function<double(double)>& logdens,
                  const std::function<double(double)>& dlogdens, double init_lo, double init_hi,
                  std::mt19937_64& rng, const ArsOptions& opts) {
    if (!(init_lo < init_hi)) throw std::invalid_argument("ars_sample: empty init interval");

    double lo = init_lo, hi = init_hi;
    double pert = opts.widen_start;
    int widen = 0;
    while (dlogdens(lo) <= 0.0) {
        lo -= pert;
        pert *= 2.0;
        if (++widen > opts.max_widen)
            throw std::runtime_error("ars_sample: no positive slope found on the left");
    }
    pert = opts.widen_start;
    widen = 0;
    while (dlogdens(hi) >= 0.0) {
        hi += pert;
        pert *= 2.0;
        if (++widen > opts.max_widen)
            throw std::runtime_error("ars_sample: no negative slope found on the right");
    }

    std::vector<HullPoint> pts{{lo, logdens(lo), dlogdens(lo)}, {hi, logdens(hi), dlogdens(hi)}};
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int rejections = 0; rejections < opts.max_rejections; ++rejections) {
        // tangent intersections: z_i between point i and i+1
        const std::size_t k = pts.size();
        std::vector<double> z(k + 1);
        z[0] = -std::numeric_limits<double>::infinity();
        z[k] = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < k; ++i) {
            const auto& p = pts[i - 1];
            const auto& q = pts[i];
            const double denom = p.dh - q.dh;
            if (std::abs(denom) < 1e-14) {
                z[i] = 0.5 * (p.x + q.x);
            } else {
                z[i] = (q.h - p.h - q.x * q.dh + p.x * p.dh) / denom;
                z[i] = std::clamp(z[i], p.x, q.x);
            }
        }

        // segment i spans [z_i, z_{i+1}] under the tangent at pts[i]
        std::vector<double> logmass(k);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            const auto& p = pts[i];
            if (i == 0)
                logmass[i] = log_segment_mass(z[0], z[1], p.h + p.dh * (z[1] - p.x), p.dh);
            else
                logmass[i] = log_segment_mass(z[i], z[i + 1], p.h + p.dh * (z[i] - p.x), p.dh);
            mx = std::max(mx, logmass[i]);
        }
        double total = 0.0;
        for (double lm : logmass) total += std::exp(lm - mx);

        // pick a segment, then invert the exponential CDF within it
        double r = unif(rng) * total;
        std::size_t seg = k - 1;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = std::exp(logmass[i] - mx);
            if (r <= w) {
                seg = i;
                break;
            }
            r -= w;
        }
        const auto& p = pts[seg];
        const double a = z[seg], b = z[seg + 1];
        const double u = std::max(unif(rng), 1e-300);
        double x;
        if (std::isinf(a)) {
            x = b + std::log(u) / p.dh;  // dh > 0 on the first segment
        } else if (std::isinf(b)) {
            x = a + std::log1p(-u) / p.dh;  // dh < 0 on the last segment
        } else if (std::abs(p.dh) < 1e-12) {
            x = a + u * (b - a);
        } else {
            // inverse of (exp(s(x-a)) - 1)/(exp(s(b-a)) - 1) = u
            const double sw = p.dh * (b - a);
            if (sw > 0)
                x = a + (sw + std::log(u + (1.0 - u) * std::exp(-sw))) / p.dh;
            else
                x = a + std::log1p(u * std::expm1(sw)) / p.dh;
        }
        if (!std::isfinite(x)) continue;

        const double env = p.h + p.dh * (x - p.x);
        const double hx = logdens(x);
        if (std::log(std::max(unif(rng), 1e-300)) <= hx - env) return x;

        // refine the hull with the rejected abscissa
        HullPoint np{x, hx, dlogdens(x)};
        auto it = std::lower_bound(pts.begin(), pts.end(), np,
                                   [](const HullPoint& l, const HullPoint& r) { return l.x < r.x; });
        if (it == pts.end() || std::abs(it->x - x) > 1e-13) pts.insert(it, np);
    }
    throw std::runtime_error("ars_sample: rejection limit exceeded");
}

}  // namespace gfen
