#include "gfen/admm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gfen/tv.hpp"

namespace gfen {

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

struct BinomialLoss {
    const BinomialNodeData* d;
    static constexpr bool kClampBeta = true;  // keeps omega strictly inside (0,1)
    bool has_data(VertexId v) const { return d->attempts[v] > 0; }
    double init(VertexId v) const {
        if (d->attempts[v] == 0) return 0.0;
        const double m = static_cast<double>(d->attempts[v]);
        const double s = static_cast<double>(d->successes[v]);
        return std::log((s + 0.5) / (m - s + 0.5));
    }
    void grad_hess(VertexId v, double b, double& g, double& h) const {
        const double m = static_cast<double>(d->attempts[v]);
        if (m == 0) {
            g = h = 0;
            return;
        }
        const double w = sigmoid(b);
        g = m * w - static_cast<double>(d->successes[v]);
        h = m * w * (1.0 - w);
    }
    double value(VertexId v, double b) const {
        const double m = static_cast<double>(d->attempts[v]);
        if (m == 0) return 0.0;
        return m * softplus(b) - static_cast<double>(d->successes[v]) * b;
    }
};

struct GaussianLoss {
    const GaussianNodeData* d;
    static constexpr bool kClampBeta = false;  // beta lives on the data scale
    bool has_data(VertexId v) const { return d->n[v] > 0; }
    double init(VertexId v) const {
        return d->n[v] > 0 ? d->sum[v] / static_cast<double>(d->n[v]) : 0.0;
    }
    void grad_hess(VertexId v, double b, double& g, double& h) const {
        const double n = static_cast<double>(d->n[v]);
        g = n * b - d->sum[v];
        h = n;
    }
    double value(VertexId v, double b) const {
        const double n = static_cast<double>(d->n[v]);
        return 0.5 * (n * b * b - 2.0 * b * d->sum[v] + d->sumsq[v]);
    }
};

// Flattened slack structure: one block per (trail, norm) pair with a nonzero
// penalty. Slots map trail positions to vertices.
struct SlackBlock {
    std::size_t start = 0;  // offset into the slot arrays
    std::size_t len = 0;
    int norm = 1;
    double weight = 0;  // lambda_{d,1} or lambda_{d,2} for the trail's kind
};

template <class Loss>
class Solver {
  public:
    Solver(const Loss& loss, VertexId n_vertices, const TrailDecomposition& trails,
           const PenaltyConfig& penalties, const AdmmOptions& opts)
        : loss_(loss), n_(n_vertices), trails_(&trails), penalties_(penalties), opts_(opts) {
        if (!penalties.valid()) throw std::invalid_argument("fit_map: negative penalty");
        for (const auto& trail : trails.trails) {
            if (trail.vertices.size() < 2) continue;
            for (int p : {1, 2}) {
                const double w = p == 1 ? penalties.l1(trail.kind) : penalties.l2(trail.kind);
                if (w <= 0.0) continue;
                SlackBlock blk;
                blk.start = slot_vertex_.size();
                blk.len = trail.vertices.size();
                blk.norm = p;
                blk.weight = w;
                blocks_.push_back(blk);
                for (VertexId v : trail.vertices) {
                    if (v < 0 || v >= n_) throw std::invalid_argument("fit_map: trail vertex out of range");
                    slot_vertex_.push_back(v);
                }
            }
        }
        copies_.assign(n_, 0.0);
        for (VertexId v : slot_vertex_) copies_[v] += 1.0;
    }

    SplitField run(AdmmReport* report) {
        const std::size_t total = slot_vertex_.size();
        std::vector<double> beta(n_), z(total), u(total, 0.0), zv(total);
        std::vector<double> consensus(n_), dz(n_), au(n_);
        std::size_t max_len = 2;
        for (const auto& b : blocks_) max_len = std::max(max_len, b.len);
        std::vector<double> scratch(8 * max_len);

        for (VertexId v = 0; v < n_; ++v) beta[v] = loss_.init(v);
        for (std::size_t i = 0; i < total; ++i) z[i] = beta[slot_vertex_[i]];

        double alpha = opts_.alpha0;
        bool converged = false;
        double rel_p = 0, rel_d = 0;
        int iter = 0;
        const double eps = 1e-12;

        if (opts_.diagnostics) *opts_.diagnostics << "iter,alpha,primal_res,dual_res,objective\n";

        for (iter = 1; iter <= opts_.max_iters; ++iter) {
            // beta update: one guarded Newton step on loss + alpha * sum (beta - z + u)^2
            std::fill(consensus.begin(), consensus.end(), 0.0);
            for (std::size_t i = 0; i < total; ++i) consensus[slot_vertex_[i]] += z[i] - u[i];
            double max_step = 0.0;
            for (VertexId v = 0; v < n_; ++v) {
                double g, h;
                loss_.grad_hess(v, beta[v], g, h);
                g += 2.0 * opts_.ridge * beta[v] + 2.0 * alpha * (copies_[v] * beta[v] - consensus[v]);
                h += 2.0 * opts_.ridge + 2.0 * alpha * copies_[v];
                if (h <= 0.0) continue;  // isolated vertex with no data and no penalty
                double step = -g / h;
                step = std::clamp(step, -opts_.newton_step_cap, opts_.newton_step_cap);
                beta[v] += step;
                if constexpr (Loss::kClampBeta)
                    beta[v] = std::clamp(beta[v], -opts_.beta_clamp, opts_.beta_clamp);
                max_step = std::max(max_step, std::abs(step));
                if (!std::isfinite(beta[v])) throw std::runtime_error("fit_map: beta diverged (NaN)");
            }

            // slack updates: exact 1D solvers per trail, then dual ascent
            std::fill(dz.begin(), dz.end(), 0.0);
            double prim2 = 0, znorm2 = 0, abeta2 = 0;
            for (const auto& blk : blocks_) {
                for (std::size_t k = 0; k < blk.len; ++k)
                    zv[blk.start + k] = beta[slot_vertex_[blk.start + k]] + u[blk.start + k];
                double* zb = zv.data() + blk.start;
                if (blk.norm == 1)
                    tv1_prox_inplace(zb, blk.len, blk.weight / (2.0 * alpha), scratch.data());
                else
                    tv2_prox_inplace(zb, blk.len, blk.weight / (4.0 * alpha), scratch.data());
                for (std::size_t k = 0; k < blk.len; ++k) {
                    const std::size_t i = blk.start + k;
                    const double znew = zv[i];
                    dz[slot_vertex_[i]] += znew - z[i];
                    z[i] = znew;
                    const double b = beta[slot_vertex_[i]];
                    const double r = b - znew;
                    u[i] += r;
                    prim2 += r * r;
                    znorm2 += znew * znew;
                    abeta2 += b * b;
                }
            }

            if (total == 0) {
                // no active penalties: plain Newton on the node losses
                if (max_step < opts_.rel_tol) {
                    converged = true;
                    break;
                }
                continue;
            }

            std::fill(au.begin(), au.end(), 0.0);
            for (std::size_t i = 0; i < total; ++i) au[slot_vertex_[i]] += u[i];
            double dual2 = 0, aunorm2 = 0;
            for (VertexId v = 0; v < n_; ++v) {
                dual2 += dz[v] * dz[v];
                aunorm2 += au[v] * au[v];
            }
            rel_p = std::sqrt(prim2) / std::max(std::sqrt(std::max(znorm2, abeta2)), eps);
            rel_d = std::sqrt(dual2) / std::max(std::sqrt(aunorm2), eps);

            if (opts_.diagnostics) {
                *opts_.diagnostics << iter << ',' << alpha << ',' << rel_p << ',' << rel_d << ','
                                   << objective(beta) << '\n';
            }
            if (rel_p < opts_.rel_tol && rel_d < opts_.rel_tol) {
                converged = true;
                break;
            }

            // residual balancing, duals rescaled with alpha
            if (rel_p > opts_.balance_ratio * rel_d && alpha < opts_.alpha_max) {
                alpha = std::min(alpha * opts_.balance_scale, opts_.alpha_max);
                for (double& x : u) x /= opts_.balance_scale;
            } else if (rel_d > opts_.balance_ratio * rel_p && alpha > opts_.alpha_min) {
                alpha = std::max(alpha / opts_.balance_scale, opts_.alpha_min);
                for (double& x : u) x *= opts_.balance_scale;
            }
        }

        if (report) {
            report->converged = converged;
            report->iterations = std::min(iter, opts_.max_iters);
            report->primal_residual = rel_p;
            report->dual_residual = rel_d;
            report->alpha = alpha;
            report->objective = objective(beta);
            report->nonstrict_warning = nonstrict(beta);
        }
        return beta;
    }

    double objective(const SplitField& beta) const {
        double obj = 0.0;
        for (VertexId v = 0; v < n_; ++v)
            obj += loss_.value(v, beta[v]) + opts_.ridge * beta[v] * beta[v];
        for (const auto& trail : trails_->trails) {
            const double l1 = penalties_.l1(trail.kind);
            const double l2 = penalties_.l2(trail.kind);
            for (std::size_t k = 0; k + 1 < trail.vertices.size(); ++k) {
                const double d = beta[trail.vertices[k + 1]] - beta[trail.vertices[k]];
                obj += l1 * std::abs(d) + 0.5 * l2 * d * d;
            }
        }
        return obj;
    }

    bool nonstrict(const SplitField&) const {
        if (penalties_.lambda_s2 > 0 || penalties_.lambda_t2 > 0 || opts_.ridge > 0) return false;
        for (VertexId v = 0; v < n_; ++v)
            if (!loss_.has_data(v)) return true;
        return false;
    }

  private:
    Loss loss_;
    VertexId n_;
    const TrailDecomposition* trails_;
    PenaltyConfig penalties_;
    AdmmOptions opts_;
    std::vector<SlackBlock> blocks_;
    std::vector<VertexId> slot_vertex_;
    std::vector<double> copies_;
};

}  // namespace

GaussianNodeData GaussianNodeData::from_observations(const std::vector<std::vector<double>>& obs) {
    GaussianNodeData d;
    d.n.reserve(obs.size());
    for (const auto& ys : obs) {
        double s = 0, ss = 0;
        for (double y : ys) {
            s += y;
            ss += y * y;
        }
        d.n.push_back(static_cast<std::int64_t>(ys.size()));
        d.sum.push_back(s);
        d.sumsq.push_back(ss);
    }
    return d;
}

SplitField fit_map(const BinomialNodeData& data, VertexId n_vertices,
                   const TrailDecomposition& trails, const PenaltyConfig& penalties,
                   const AdmmOptions& opts, AdmmReport* report) {
    if (static_cast<VertexId>(data.attempts.size()) != n_vertices)
        throw std::invalid_argument("fit_map: counts size mismatch");
    Solver<BinomialLoss> solver(BinomialLoss{&data}, n_vertices, trails, penalties, opts);
    return solver.run(report);
}

SplitField fit_map_gaussian(const GaussianNodeData& data, VertexId n_vertices,
                            const TrailDecomposition& trails, const PenaltyConfig& penalties,
                            const AdmmOptions& opts, AdmmReport* report) {
    if (static_cast<VertexId>(data.n.size()) != n_vertices)
        throw std::invalid_argument("fit_map_gaussian: data size mismatch");
    Solver<GaussianLoss> solver(GaussianLoss{&data}, n_vertices, trails, penalties, opts);
    return solver.run(report);
}

SplitField fit_gfl(const BinomialNodeData& data, VertexId n_vertices,
                   const TrailDecomposition& trails, double lambda_s, double lambda_t,
                   const AdmmOptions& opts, AdmmReport* report) {
    PenaltyConfig p{lambda_s, 0.0, lambda_t, 0.0};
    AdmmOptions o = opts;
    o.ridge = 1e-8;
    return fit_map(data, n_vertices, trails, p, o, report);
}

SplitField fit_gmrf(const BinomialNodeData& data, VertexId n_vertices,
                    const TrailDecomposition& trails, double lambda_s, double lambda_t,
                    const AdmmOptions& opts, AdmmReport* report) {
    PenaltyConfig p{0.0, lambda_s, 0.0, lambda_t};
    return fit_map(data, n_vertices, trails, p, opts, report);
}

double gfen_objective(const BinomialNodeData& data, const TrailDecomposition& trails,
                      const PenaltyConfig& penalties, const SplitField& beta, double ridge) {
    AdmmOptions o;
    o.ridge = ridge;
    Solver<BinomialLoss> solver(BinomialLoss{&data}, static_cast<VertexId>(beta.size()), trails,
                                penalties, o);
    return solver.objective(beta);
}

double gfen_objective_gaussian(const GaussianNodeData& data, const TrailDecomposition& trails,
                               const PenaltyConfig& penalties, const SplitField& beta, double ridge) {
    AdmmOptions o;
    o.ridge = ridge;
    Solver<GaussianLoss> solver(GaussianLoss{&data}, static_cast<VertexId>(beta.size()), trails,
                                penalties, o);
    return solver.objective(beta);
}

}  // namespace gfen
