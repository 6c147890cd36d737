#include "gfen/bayesopt.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gfen {

namespace {

double sq_dist(const std::array<double, 4>& a, const std::array<double, 4>& b, int dims) {
    double d = 0.0;
    for (int i = 0; i < dims; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

// Cholesky with escalating jitter; K is symmetric PSD by construction.
std::vector<double> cholesky(std::vector<double> K, int n) {
    for (double jitter : {0.0, 1e-8, 1e-6, 1e-4}) {
        std::vector<double> L = K;
        for (int i = 0; i < n; ++i) L[i * n + i] += jitter;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j <= i && ok; ++j) {
                double s = L[i * n + j];
                for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    L[i * n + i] = std::sqrt(s);
                } else {
                    L[i * n + j] = s / L[j * n + j];
                }
            }
        }
        if (ok) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) L[i * n + j] = 0.0;
            return L;
        }
    }
    throw std::runtime_error("gp: kernel matrix is not positive definite");
}

void forward_solve(const std::vector<double>& L, int n, std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= L[i * n + k] * x[k];
        x[i] = s / L[i * n + i];
    }
}

void backward_solve(const std::vector<double>& L, int n, std::vector<double>& x) {
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * x[k];
        x[i] = s / L[i * n + i];
    }
}

}  // namespace

void GpSurrogate::posterior(const std::vector<std::array<double, 4>>& X,
                            const std::vector<double>& z, int dims, double a, double sigma,
                            const std::vector<std::array<double, 4>>& Xq,
                            std::vector<double>& mean, std::vector<double>& var) {
    const int n = static_cast<int>(X.size());
    std::vector<double> K(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K[i * n + j] = std::exp(-a * sq_dist(X[i], X[j], dims));
            if (i == j) K[i * n + j] += sigma * sigma;
        }
    const auto L = cholesky(std::move(K), n);
    std::vector<double> alpha = z;
    forward_solve(L, n, alpha);
    backward_solve(L, n, alpha);

    mean.assign(Xq.size(), 0.0);
    var.assign(Xq.size(), 0.0);
    std::vector<double> k(n);
    for (std::size_t q = 0; q < Xq.size(); ++q) {
        for (int i = 0; i < n; ++i) k[i] = std::exp(-a * sq_dist(X[i], Xq[q], dims));
        for (int i = 0; i < n; ++i) mean[q] += k[i] * alpha[i];
        std::vector<double> w = k;
        forward_solve(L, n, w);
        double kk = 0.0;
        for (int i = 0; i < n; ++i) kk += w[i] * w[i];
        var[q] = std::max(1.0 - kk, 1e-12);
    }
}

void BayesOptState::record(const std::array<double, 4>& log_lambda, double loss) {
    points.push_back(log_lambda);
    losses.push_back(loss);
}

PenaltyConfig BayesOptState::to_penalties(const std::array<double, 4>& log_lambda) const {
    PenaltyConfig p;
    p.lambda_s1 = active[0] ? std::pow(10.0, log_lambda[0]) : 0.0;
    p.lambda_s2 = active[1] ? std::pow(10.0, log_lambda[1]) : 0.0;
    p.lambda_t1 = active[2] ? std::pow(10.0, log_lambda[2]) : 0.0;
    p.lambda_t2 = active[3] ? std::pow(10.0, log_lambda[3]) : 0.0;
    return p;
}

std::vector<std::array<double, 4>> BayesOptState::propose_candidates(int n) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(generation + 1));
    std::uniform_real_distribution<double> unif(box_lo, box_hi);
    auto draw_point = [&] {
        std::array<double, 4> x{0, 0, 0, 0};
        for (int d = 0; d < 4; ++d)
            if (active[d]) x[d] = unif(rng);
        return x;
    };
    ++generation;

    if (points.empty()) {
        std::vector<std::array<double, 4>> out;
        for (int i = 0; i < n; ++i) out.push_back(draw_point());
        return out;
    }

    // standardize observed losses
    const int m = static_cast<int>(losses.size());
    double mu = 0.0;
    for (double l : losses) mu += l;
    mu /= m;
    double sd = 0.0;
    for (double l : losses) sd += (l - mu) * (l - mu);
    sd = m > 1 ? std::sqrt(sd / (m - 1)) : 1.0;
    if (sd < 1e-12) sd = 1.0;
    std::vector<double> z(losses.size());
    for (int i = 0; i < m; ++i) z[i] = (losses[i] - mu) / sd;

    std::vector<std::array<double, 4>> pool;
    pool.reserve(candidate_pool);
    for (int i = 0; i < candidate_pool; ++i) pool.push_back(draw_point());

    std::vector<double> mean, var;
    GpSurrogate::posterior(points, z, 4, kernel_a, noise_sigma, pool, mean, var);

    // Thompson draws at the pool, keep the n lowest samples
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::pair<double, int>> scored;
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        scored.push_back({mean[i] + std::sqrt(var[i]) * gauss(rng), static_cast<int>(i)});
    std::sort(scored.begin(), scored.end());
    std::vector<std::array<double, 4>> out;
    for (int i = 0; i < n && i < static_cast<int>(scored.size()); ++i)
        out.push_back(pool[scored[i].second]);
    return out;
}

std::array<double, 4> BayesOptState::select_best() const {
    if (points.empty()) throw std::logic_error("select_best: nothing evaluated");
    const int m = static_cast<int>(losses.size());
    double mu = 0.0;
    for (double l : losses) mu += l;
    mu /= m;
    double sd = 0.0;
    for (double l : losses) sd += (l - mu) * (l - mu);
    sd = m > 1 ? std::sqrt(sd / (m - 1)) : 1.0;
    if (sd < 1e-12) sd = 1.0;
    std::vector<double> z(losses.size());
    for (int i = 0; i < m; ++i) z[i] = (losses[i] - mu) / sd;
    std::vector<double> mean, var;
    GpSurrogate::posterior(points, z, 4, kernel_a, noise_sigma, points, mean, var);
    int best = 0;
    for (int i = 1; i < m; ++i)
        if (mean[i] < mean[best]) best = i;
    return points[best];
}

}  // namespace gfen
