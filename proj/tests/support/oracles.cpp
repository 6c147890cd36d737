#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gfen::testing {

namespace {

double sq(double x) { return x * x; }

std::vector<double> dual_to_primal(const std::vector<double>& y, const std::vector<double>& u) {
    const std::size_t n = y.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dtu = 0.0;
        if (i < n - 1) dtu -= u[i];
        if (i > 0) dtu += u[i - 1];
        z[i] = y[i] - dtu;
    }
    return z;
}

}  // namespace

double tv_objective1(const std::vector<double>& y, const std::vector<double>& z,
                     const std::vector<double>& w) {
    double obj = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) obj += 0.5 * sq(z[i] - y[i]);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) obj += w[i] * std::abs(z[i + 1] - z[i]);
    return obj;
}

double tv_objective2(const std::vector<double>& y, const std::vector<double>& z,
                     const std::vector<double>& w) {
    double obj = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) obj += 0.5 * sq(z[i] - y[i]);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) obj += w[i] * sq(z[i + 1] - z[i]);
    return obj;
}

namespace {

// Exact candidate from a proposed segmentation: closed-form segment means
// with +/-lambda boundary corrections, accepted only if the KKT conditions
// hold (jump signs as proposed, cumulative dual inside the box).
bool polish_tv1(const std::vector<double>& y, const std::vector<double>& w,
                const std::vector<double>& z, std::vector<double>& out) {
    const std::size_t n = y.size();
    std::vector<std::size_t> seg_start{0};
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(z[i + 1] - z[i]) > 1e-7) seg_start.push_back(i + 1);
    seg_start.push_back(n);
    const std::size_t K = seg_start.size() - 1;
    std::vector<double> val(K), sign(K + 1, 0.0);
    for (std::size_t k = 1; k < K; ++k)
        sign[k] = z[seg_start[k]] > z[seg_start[k] - 1] ? 1.0 : -1.0;
    out.assign(n, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t a = seg_start[k], b = seg_start[k + 1];
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += y[i];
        const double wl = k > 0 ? w[a - 1] : 0.0;
        const double wr = k + 1 < K ? w[b - 1] : 0.0;
        val[k] = (s - wl * sign[k] + wr * sign[k + 1]) / static_cast<double>(b - a);
        for (std::size_t i = a; i < b; ++i) out[i] = val[k];
    }
    for (std::size_t k = 1; k < K; ++k) {
        const double d = val[k] - val[k - 1];
        if (w[seg_start[k] - 1] > 0 && d * sign[k] <= 0) return false;  // jump collapsed or flipped
    }
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cum += y[i] - out[i];
        if (std::abs(cum) > w[i] + 1e-8) return false;
    }
    return true;
}

}  // namespace

std::vector<double> brute_force_tv1(const std::vector<double>& y, const std::vector<double>& w) {
    const std::size_t n = y.size();
    if (n <= 1) return y;
    const std::size_t m = n - 1;

    // projected FISTA on: min_u 1/2 ||y - D^T u||^2  s.t. |u_i| <= w_i,
    // in escalating rounds until the segment polish certifies optimality
    std::vector<double> u(m, 0.0), v(m, 0.0), uprev(m, 0.0), grad(m);
    std::vector<double> z, polished;
    double t = 1.0;
    const double step = 0.25;  // 1/L, L = lambda_max(D D^T) <= 4
    for (int round = 0; round < 4; ++round) {
        const int iters = 3000 << (2 * round);
        for (int it = 0; it < iters; ++it) {
            z = dual_to_primal(y, v);
            for (std::size_t i = 0; i < m; ++i) grad[i] = -(z[i + 1] - z[i]);
            uprev = u;
            for (std::size_t i = 0; i < m; ++i)
                u[i] = std::clamp(v[i] - step * grad[i], -w[i], w[i]);
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            for (std::size_t i = 0; i < m; ++i) v[i] = u[i] + ((t - 1.0) / tn) * (u[i] - uprev[i]);
            t = tn;
        }
        z = dual_to_primal(y, u);
        if (polish_tv1(y, w, z, polished)) return polished;
    }
    return z;
}

std::vector<double> brute_force_tv1(const std::vector<double>& y, double lambda) {
    if (y.size() <= 1) return y;
    return brute_force_tv1(y, std::vector<double>(y.size() - 1, lambda));
}

std::vector<double> brute_force_tv2(const std::vector<double>& y, const std::vector<double>& w) {
    const std::size_t n = y.size();
    if (n <= 1) return y;
    // dense (I + 2 L_w), Gaussian elimination with partial pivoting
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = 1.0;
        if (i > 0) {
            a[i][i] += 2.0 * w[i - 1];
            a[i][i - 1] -= 2.0 * w[i - 1];
        }
        if (i + 1 < n) {
            a[i][i] += 2.0 * w[i];
            a[i][i + 1] -= 2.0 * w[i];
        }
        a[i][n] = y[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i][n] / a[i][i];
    return z;
}

std::vector<double> brute_force_tv2(const std::vector<double>& y, double lambda) {
    if (y.size() <= 1) return y;
    return brute_force_tv2(y, std::vector<double>(y.size() - 1, lambda));
}

Chain3Solution chain3_gaussian(double y1, double y3, double lambda1, double lambda2) {
    const bool swapped = y1 > y3;
    if (swapped) std::swap(y1, y3);
    const double mid = 0.5 * (y1 + y3);
    Chain3Solution sol{};
    if (lambda1 >= 0.5 * (y3 - y1)) {
        sol.b1 = sol.b2 = sol.b3 = mid;
        sol.fused = true;
        sol.b2_free = false;
        return sol;
    }
    const double shift = (lambda1 + 0.5 * lambda2 * (y3 - y1)) / (1.0 + lambda2);
    sol.b1 = y1 + shift;
    sol.b3 = y3 - shift;
    sol.b2 = 0.5 * (sol.b1 + sol.b3);
    sol.fused = false;
    sol.b2_free = lambda2 == 0.0;
    if (swapped) std::swap(sol.b1, sol.b3);
    return sol;
}

double chain3_binomial_fusion_threshold(std::int64_t m1, std::int64_t s1, std::int64_t m3,
                                        std::int64_t s3) {
    return (static_cast<double>(m1) * s3 - static_cast<double>(m3) * s1) /
           static_cast<double>(m1 + m3);
}

Chain3Solution chain3_binomial(std::int64_t m1, std::int64_t s1, std::int64_t m3, std::int64_t s3,
                               double lambda1, double lambda2) {
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    const double b1 = logit(static_cast<double>(s1) / m1);
    const double b3 = logit(static_cast<double>(s3) / m3);
    const bool swapped = b1 > b3;
    if (swapped) {
        std::swap(m1, m3);
        std::swap(s1, s3);
    }
    Chain3Solution sol{};
    const double lam_star = chain3_binomial_fusion_threshold(m1, s1, m3, s3);
    if (lambda1 >= lam_star) {
        const double m = logit(static_cast<double>(s1 + s3) / static_cast<double>(m1 + m3));
        sol.b1 = sol.b2 = sol.b3 = m;
        sol.fused = true;
        return sol;
    }
    if (lambda2 == 0.0) {
        sol.b1 = logit((static_cast<double>(s1) + lambda1) / m1);
        sol.b3 = logit((static_cast<double>(s3) - lambda1) / m3);
        sol.b2 = 0.5 * (sol.b1 + sol.b3);
        sol.b2_free = true;
    } else {
        // damped Newton on the reduced stationarity system with b2 = midpoint:
        //   g1 = m1 w(b1) - s1 - lambda1 - (lambda2/2)(b3 - b1) = 0
        //   g3 = m3 w(b3) - s3 + lambda1 + (lambda2/2)(b3 - b1) = 0
        double x1 = logit(static_cast<double>(s1) / m1);
        double x3 = logit(static_cast<double>(s3) / m3);
        auto sig = [](double b) { return 1.0 / (1.0 + std::exp(-b)); };
        for (int it = 0; it < 200; ++it) {
            const double d = x3 - x1;
            const double g1 = m1 * sig(x1) - s1 - lambda1 - 0.5 * lambda2 * d;
            const double g3 = m3 * sig(x3) - s3 + lambda1 + 0.5 * lambda2 * d;
            const double j11 = m1 * sig(x1) * (1.0 - sig(x1)) + 0.5 * lambda2;
            const double j13 = -0.5 * lambda2;
            const double j31 = -0.5 * lambda2;
            const double j33 = m3 * sig(x3) * (1.0 - sig(x3)) + 0.5 * lambda2;
            const double det = j11 * j33 - j13 * j31;
            double dx1 = -(g1 * j33 - j13 * g3) / det;
            double dx3 = -(j11 * g3 - g1 * j31) / det;
            double scale = 1.0;
            const double norm = std::max(std::abs(dx1), std::abs(dx3));
            if (norm > 2.0) scale = 2.0 / norm;
            x1 += scale * dx1;
            x3 += scale * dx3;
            if (norm < 1e-14) break;
        }
        sol.b1 = x1;
        sol.b3 = x3;
        sol.b2 = 0.5 * (x1 + x3);
    }
    if (swapped) std::swap(sol.b1, sol.b3);
    return sol;
}

namespace {

// One-sided directional derivative of the chain objective along d:
// smooth parts contribute gradient . d, each |t| term contributes
// sign(t) * dt when t != 0 and |dt| at the kink.
double chain3_dirderiv(const std::array<double, 3>& g_smooth, double lambda1,
                       const std::array<double, 3>& beta, const std::array<double, 3>& d) {
    double val = 0.0;
    for (int i = 0; i < 3; ++i) val += g_smooth[i] * d[i];
    const double t12 = beta[1] - beta[0], d12 = d[1] - d[0];
    const double t23 = beta[2] - beta[1], d23 = d[2] - d[1];
    val += lambda1 * (t12 != 0.0 ? (t12 > 0 ? d12 : -d12) : std::abs(d12));
    val += lambda1 * (t23 != 0.0 ? (t23 > 0 ? d23 : -d23) : std::abs(d23));
    return val;
}

double chain3_gap(const std::array<double, 3>& g_smooth, double lambda1,
                  const std::array<double, 3>& beta) {
    double worst = std::numeric_limits<double>::infinity();
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                worst = std::min(worst, chain3_dirderiv(g_smooth, lambda1, beta,
                                                        {double(a), double(b), double(c)}));
            }
    return worst;
}

}  // namespace

double chain3_stationarity_gap_gaussian(double y1, double y3, double lambda1, double lambda2,
                                        const std::array<double, 3>& beta) {
    // smooth part: data terms + (lambda2/2) * squared differences
    std::array<double, 3> g{};
    g[0] = (beta[0] - y1) - lambda2 * (beta[1] - beta[0]);
    g[1] = lambda2 * (beta[1] - beta[0]) - lambda2 * (beta[2] - beta[1]);
    g[2] = (beta[2] - y3) + lambda2 * (beta[2] - beta[1]);
    return chain3_gap(g, lambda1, beta);
}

double chain3_stationarity_gap_binomial(std::int64_t m1, std::int64_t s1, std::int64_t m3,
                                        std::int64_t s3, double lambda1, double lambda2,
                                        const std::array<double, 3>& beta) {
    auto sig = [](double b) { return 1.0 / (1.0 + std::exp(-b)); };
    std::array<double, 3> g{};
    g[0] = m1 * sig(beta[0]) - s1 - lambda2 * (beta[1] - beta[0]);
    g[1] = lambda2 * (beta[1] - beta[0]) - lambda2 * (beta[2] - beta[1]);
    g[2] = m3 * sig(beta[2]) - s3 + lambda2 * (beta[2] - beta[1]);
    return chain3_gap(g, lambda1, beta);
}

std::array<double, 3> grid_zoom3(const std::function<double(double, double, double)>& f,
                                 std::array<double, 3> lo, std::array<double, 3> hi, int levels,
                                 int pts) {
    std::array<double, 3> best{};
    for (int lev = 0; lev < levels; ++lev) {
        double fbest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < pts; ++i)
            for (int j = 0; j < pts; ++j)
                for (int k = 0; k < pts; ++k) {
                    const double x = lo[0] + (hi[0] - lo[0]) * i / (pts - 1);
                    const double y = lo[1] + (hi[1] - lo[1]) * j / (pts - 1);
                    const double z = lo[2] + (hi[2] - lo[2]) * k / (pts - 1);
                    const double v = f(x, y, z);
                    if (v < fbest) {
                        fbest = v;
                        best = {x, y, z};
                    }
                }
        for (int d = 0; d < 3; ++d) {
            const double w = (hi[d] - lo[d]) / (pts - 1);
            lo[d] = best[d] - 2.0 * w;
            hi[d] = best[d] + 2.0 * w;
        }
    }
    return best;
}

double quadrature_mean(const std::function<double(double)>& logdens, double lo, double hi, int n) {
    if (n % 2 == 0) ++n;
    // stabilize with the max before exponentiating
    double mx = -std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) mx = std::max(mx, logdens(lo + i * h));
    double z = 0.0, zx = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * h;
        const double wsimp = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double dens = std::exp(logdens(x) - mx);
        z += wsimp * dens;
        zx += wsimp * dens * x;
    }
    return zx / z;
}

double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return ks;
}

double paired_t_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired_t: bad sizes");
    const double n = static_cast<double>(a.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) var += sq(a[i] - b[i] - mean);
    var /= (n - 1.0);
    return mean / std::sqrt(var / n);
}

}  // namespace gfen::testing
