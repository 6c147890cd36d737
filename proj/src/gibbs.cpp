#include "gfen/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gfen {

NeighborLists NeighborLists::from_edges(VertexId n, const std::vector<Edge>& spatial_edges,
                                        const std::vector<Edge>& temporal_edges) {
    NeighborLists nb;
    nb.spatial.resize(n);
    nb.temporal.resize(n);
    for (auto [a, b] : spatial_edges) {
        nb.spatial[a].push_back(b);
        nb.spatial[b].push_back(a);
    }
    for (auto [a, b] : temporal_edges) {
        nb.temporal[a].push_back(b);
        nb.temporal[b].push_back(a);
    }
    return nb;
}

NeighborLists NeighborLists::from_graph(const SpatioTemporalGraph& graph) {
    return from_edges(graph.n_vertices(), graph.spatial_edges, graph.temporal_edges);
}

double GibbsConditional::logdens(double b) const {
    const double sp = std::max(b, 0.0) + std::log1p(std::exp(-std::abs(b)));
    double h = s * b - m * sp;
    for (double w : spatial_neighbors) {
        const double d = b - w;
        h -= l_s1 * std::abs(d) + 0.5 * l_s2 * d * d;
    }
    for (double w : temporal_neighbors) {
        const double d = b - w;
        h -= l_t1 * std::abs(d) + 0.5 * l_t2 * d * d;
    }
    return h;
}

double GibbsConditional::dlogdens(double b) const {
    double g = s - m * sigmoid(b);
    for (double w : spatial_neighbors) {
        const double d = b - w;
        g -= l_s1 * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) + l_s2 * d;
    }
    for (double w : temporal_neighbors) {
        const double d = b - w;
        g -= l_t1 * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) + l_t2 * d;
    }
    return g;
}

double GibbsConditional::curvature_bound() const {
    return -(static_cast<double>(spatial_neighbors.size()) * l_s2 +
             static_cast<double>(temporal_neighbors.size()) * l_t2);
}

bool GibbsConditional::proper() const {
    if (m > 0 && s > 0 && s < m) return true;
    const bool l2 = (l_s2 > 0 && !spatial_neighbors.empty()) ||
                    (l_t2 > 0 && !temporal_neighbors.empty());
    const bool l1 = (l_s1 > 0 && !spatial_neighbors.empty()) ||
                    (l_t1 > 0 && !temporal_neighbors.empty());
    if (l2 || l1) return true;
    // one-sided data (s = 0 or s = m) decays in one direction only; any
    // penalty above already covers the other side
    return false;
}

GibbsConditional conditional_logdensity(VertexId v, const std::vector<double>& beta,
                                        const NeighborLists& nbrs, const BinomialNodeData& data,
                                        const PenaltyConfig& penalties) {
    GibbsConditional c;
    c.m = static_cast<double>(data.attempts[v]);
    c.s = static_cast<double>(data.successes[v]);
    c.l_s1 = penalties.lambda_s1;
    c.l_s2 = penalties.lambda_s2;
    c.l_t1 = penalties.lambda_t1;
    c.l_t2 = penalties.lambda_t2;
    for (VertexId w : nbrs.spatial[v]) c.spatial_neighbors.push_back(beta[w]);
    for (VertexId w : nbrs.temporal[v]) c.temporal_neighbors.push_back(beta[w]);
    if (!c.proper())
        throw std::invalid_argument("gibbs: improper conditional at vertex " + std::to_string(v) +
                                    " (no data and no penalty)");
    return c;
}

namespace {

double sweep_vertex(const GibbsConditional& cond, double perturb, std::mt19937_64& rng,
                    const ArsOptions& ars) {
    // initialization bracket: neighbor values and the local MLE logit when
    // defined, perturbed outward
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double w : cond.spatial_neighbors) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    for (double w : cond.temporal_neighbors) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    if (cond.m > 0 && cond.s > 0 && cond.s < cond.m) {
        const double mle = std::log(cond.s / (cond.m - cond.s));
        lo = std::min(lo, mle);
        hi = std::max(hi, mle);
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    auto f = [&](double b) { return cond.logdens(b); };
    auto df = [&](double b) { return cond.dlogdens(b); };
    ArsOptions a = ars;
    a.widen_start = perturb;
    return ars_sample(f, df, lo - perturb, hi + perturb, rng, a);
}

}  // namespace

GibbsResult run_chain(const BinomialNodeData& data, const NeighborLists& nbrs,
                      const PenaltyConfig& penalties, const SplitField& map_init,
                      const GibbsOptions& opts) {
    const VertexId n = nbrs.n_vertices();
    if (static_cast<VertexId>(map_init.size()) != n)
        throw std::invalid_argument("run_chain: init size mismatch");
    if (opts.burn_in >= opts.iters)
        throw std::invalid_argument("run_chain: burn_in must be below iters");

    GibbsResult out;
    std::vector<double> beta = map_init;

    if (opts.threads <= 1) {
        std::mt19937_64 rng(opts.seed);
        for (int it = 0; it < opts.iters; ++it) {
            for (VertexId v = 0; v < n; ++v) {
                const auto cond = conditional_logdensity(v, beta, nbrs, data, penalties);
                beta[v] = sweep_vertex(cond, opts.init_perturb, rng, opts.ars);
            }
            if (it >= opts.burn_in && (it - opts.burn_in) % opts.thin == 0)
                out.samples.push_back(beta);
        }
    } else {
        // asynchronous block mode: disjoint vertex blocks, relaxed reads of
        // neighboring values from other blocks
        const int T = opts.threads;
        std::barrier sync(T + 1);
        std::atomic<bool> stop{false};
        std::vector<std::thread> workers;
        for (int t = 0; t < T; ++t) {
            workers.emplace_back([&, t] {
                std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * (t + 1));
                const VertexId lo = n * t / T, hi = n * (t + 1) / T;
                while (true) {
                    sync.arrive_and_wait();
                    if (stop.load(std::memory_order_acquire)) break;
                    for (VertexId v = lo; v < hi; ++v) {
                        GibbsConditional cond;
                        {
                            // atomic element reads; other blocks may be mid-sweep
                            cond.m = static_cast<double>(data.attempts[v]);
                            cond.s = static_cast<double>(data.successes[v]);
                            cond.l_s1 = penalties.lambda_s1;
                            cond.l_s2 = penalties.lambda_s2;
                            cond.l_t1 = penalties.lambda_t1;
                            cond.l_t2 = penalties.lambda_t2;
                            for (VertexId w : nbrs.spatial[v])
                                cond.spatial_neighbors.push_back(
                                    std::atomic_ref<double>(beta[w]).load(std::memory_order_relaxed));
                            for (VertexId w : nbrs.temporal[v])
                                cond.temporal_neighbors.push_back(
                                    std::atomic_ref<double>(beta[w]).load(std::memory_order_relaxed));
                            if (!cond.proper())
                                throw std::invalid_argument("gibbs: improper conditional");
                        }
                        const double draw = sweep_vertex(cond, opts.init_perturb, rng, opts.ars);
                        std::atomic_ref<double>(beta[v]).store(draw, std::memory_order_relaxed);
                    }
                    sync.arrive_and_wait();
                }
            });
        }
        for (int it = 0; it < opts.iters; ++it) {
            sync.arrive_and_wait();  // release workers for one sweep
            sync.arrive_and_wait();  // wait for sweep completion
            if (it >= opts.burn_in && (it - opts.burn_in) % opts.thin == 0)
                out.samples.push_back(beta);
        }
        stop.store(true, std::memory_order_release);
        sync.arrive_and_wait();
        for (auto& w : workers) w.join();
    }

    // summaries: mean and empirical 5% / 95% bands per vertex
    const std::size_t S = out.samples.size();
    out.summary.post_mean.assign(n, 0.0);
    out.summary.q05.assign(n, 0.0);
    out.summary.q95.assign(n, 0.0);
    std::vector<double> col(S);
    for (VertexId v = 0; v < n; ++v) {
        for (std::size_t i = 0; i < S; ++i) col[i] = out.samples[i][v];
        double mean = 0.0;
        for (double x : col) mean += x;
        out.summary.post_mean[v] = mean / static_cast<double>(S);
        std::sort(col.begin(), col.end());
        out.summary.q05[v] = col[static_cast<std::size_t>(0.05 * (S - 1))];
        out.summary.q95[v] = col[static_cast<std::size_t>(0.95 * (S - 1))];
    }
    return out;
}

}  // namespace gfen
