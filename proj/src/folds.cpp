#include "gfen/folds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gfen {

std::vector<std::int64_t> FoldAssignment::fold_sizes() const {
    std::vector<std::int64_t> sizes(k, 0);
    for (int f : fold) ++sizes[f];
    return sizes;
}

FoldAssignment assign_folds(VertexId n_vertices, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("assign_folds: k must be >= 2");
    if (static_cast<VertexId>(k) > n_vertices)
        throw std::invalid_argument("assign_folds: more folds than vertices");
    std::vector<VertexId> order(n_vertices);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    FoldAssignment fa;
    fa.k = k;
    fa.fold.assign(n_vertices, 0);
    for (VertexId i = 0; i < n_vertices; ++i) fa.fold[order[i]] = static_cast<int>(i % k);
    return fa;
}

double heldout_nll(const BinomialNodeData& heldout, const SplitField& beta) {
    double nll = 0.0;
    for (std::size_t v = 0; v < heldout.attempts.size(); ++v) {
        const double m = static_cast<double>(heldout.attempts[v]);
        if (m == 0) continue;
        const double s = static_cast<double>(heldout.successes[v]);
        const double b = beta[v];
        // -s log w - (m-s) log(1-w) in a softplus form that is safe for large |b|
        const double sp = std::max(b, 0.0) + std::log1p(std::exp(-std::abs(b)));
        nll += m * sp - s * b;
    }
    return nll;
}

CvResult cv_loss(const std::vector<BinomialNodeData>& split_data, VertexId n_vertices,
                 const TrailDecomposition& trails, const PenaltyConfig& penalties,
                 const FoldAssignment& folds, const CvOptions& opts) {
    if (split_data.empty()) throw std::invalid_argument("cv_loss: no splits");
    CvResult res;
    res.penalties = penalties;
    res.fold_nll.assign(folds.k, 0.0);
    res.fold_points.assign(folds.k, 0);

    AdmmOptions admm = opts.admm;
    if (penalties.lambda_s2 == 0 && penalties.lambda_t2 == 0 && admm.ridge == 0)
        admm.ridge = opts.l1_only_ridge;

    std::int64_t total_points = 0;
    for (VertexId v = 0; v < n_vertices; ++v) total_points += split_data[0].attempts[v];

    for (int j = 0; j < folds.k; ++j) {
        // held-out vertices become missing-data vertices
        for (const auto& full : split_data) {
            BinomialNodeData train = full;
            BinomialNodeData heldout{std::vector<std::int64_t>(n_vertices, 0),
                                     std::vector<std::int64_t>(n_vertices, 0)};
            for (VertexId v = 0; v < n_vertices; ++v) {
                if (folds.fold[v] == j) {
                    heldout.attempts[v] = train.attempts[v];
                    heldout.successes[v] = train.successes[v];
                    train.attempts[v] = 0;
                    train.successes[v] = 0;
                }
            }
            AdmmReport rep;
            const SplitField beta = fit_map(train, n_vertices, trails, penalties, admm, &rep);
            res.all_converged = res.all_converged && rep.converged;
            res.fold_nll[j] += heldout_nll(heldout, beta);
        }
        for (VertexId v = 0; v < n_vertices; ++v)
            if (folds.fold[v] == j) res.fold_points[j] += split_data[0].attempts[v];
        if (res.fold_points[j] == 0) res.empty_folds.push_back(j);
    }

    double total = 0.0;
    for (double x : res.fold_nll) total += x;
    res.mean_nll = total_points > 0 ? total / static_cast<double>(total_points) : 0.0;
    return res;
}

}  // namespace gfen
