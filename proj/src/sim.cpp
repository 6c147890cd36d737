#include "gfen/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gfen/density.hpp"

namespace gfen {

EffectKind effect_kind_from_string(const std::string& s) {
    if (s == "pw_constant" || s == "constant") return EffectKind::pw_constant;
    if (s == "pw_linear" || s == "linear") return EffectKind::pw_linear;
    if (s == "mixed") return EffectKind::mixed;
    throw std::invalid_argument("unknown effect kind: " + s);
}

std::string to_string(EffectKind k) {
    switch (k) {
        case EffectKind::pw_constant: return "pw_constant";
        case EffectKind::pw_linear: return "pw_linear";
        default: return "mixed";
    }
}

std::string SimTask::family_name() const {
    std::string name = to_string(spatial_kind) + "/" + to_string(temporal_kind);
    if (outliers) name += "+outliers";
    return name;
}

std::vector<double> effect_from_anchors(const std::array<double, 4>& anchors,
                                        const std::array<bool, 3>& linear, int n) {
    if (n < 3) throw std::invalid_argument("effect_from_anchors: grid too small");
    std::vector<double> out(n);
    const std::array<int, 4> cut{0, n / 3, 2 * n / 3, n};
    for (int seg = 0; seg < 3; ++seg) {
        const int a = cut[seg], b = cut[seg + 1];
        for (int i = a; i < b; ++i) {
            if (linear[seg])
                out[i] = anchors[seg] + (anchors[seg + 1] - anchors[seg]) *
                                            (static_cast<double>(i - a) / static_cast<double>(b - a));
            else
                out[i] = anchors[seg];
        }
    }
    return out;
}

std::vector<double> generate_effect(EffectKind kind, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::array<double, 4> anchor;
    for (double& a : anchor) a = unif(rng);

    std::array<bool, 3> linear{};
    switch (kind) {
        case EffectKind::pw_constant: linear = {false, false, false}; break;
        case EffectKind::pw_linear: linear = {true, true, true}; break;
        case EffectKind::mixed: {
            // at least one constant and one linear segment
            do {
                for (auto& b : linear) b = rng() & 1;
            } while (linear == std::array<bool, 3>{false, false, false} ||
                     linear == std::array<bool, 3>{true, true, true});
            break;
        }
    }
    return effect_from_anchors(anchor, linear, n);
}

SpatioTemporalGraph sim_graph(int n) {
    std::vector<std::string> locs;
    std::vector<std::pair<std::string, std::string>> adj;
    for (int i = 0; i < n; ++i) locs.push_back("s" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i) adj.push_back({locs[i], locs[i + 1]});
    return build_graph(locs, adj, n);
}

SimData sample_task(const SimTask& task) {
    const int n = task.grid;
    std::mt19937_64 rng(task.seed);
    SimData d;
    d.nu1 = generate_effect(task.spatial_kind, n, rng);
    d.nu2 = generate_effect(task.spatial_kind, n, rng);
    d.mu1 = generate_effect(task.temporal_kind, n, rng);
    d.mu2 = generate_effect(task.temporal_kind, n, rng);

    const VertexId nv = static_cast<VertexId>(n) * n;
    d.missing.assign(nv, 0);
    std::vector<VertexId> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_missing = static_cast<std::size_t>(task.missing_fraction * static_cast<double>(nv));
    for (std::size_t i = 0; i < n_missing; ++i) d.missing[order[i]] = 1;

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](VertexId v, double sigma_scale) {
        const double mean = unif(rng) < 0.5 ? d.true_mean1(v, n) : d.true_mean2(v, n);
        return mean + task.sigma * sigma_scale * gauss(rng);
    };

    d.observations.assign(nv, {});
    for (VertexId v = 0; v < nv; ++v) {
        if (d.missing[v]) continue;
        d.observations[v].reserve(task.samples_per_vertex + 1);
        for (int i = 0; i < task.samples_per_vertex; ++i) d.observations[v].push_back(draw(v, 1.0));
        if (task.outliers && unif(rng) < 0.5) d.observations[v].push_back(draw(v, 10.0));
    }

    d.eval.assign(nv, {});
    for (VertexId v = 0; v < nv; ++v) {
        d.eval[v].reserve(task.eval_samples);
        for (int i = 0; i < task.eval_samples; ++i) d.eval[v].push_back(draw(v, 1.0));
    }
    return d;
}

double true_logdensity(const SimTask& task, const SimData& data, VertexId v, double y) {
    const int n = task.grid;
    const double s = task.sigma;
    const double d1 = (y - data.true_mean1(v, n)) / s;
    const double d2 = (y - data.true_mean2(v, n)) / s;
    const double norm = 1.0 / (s * std::sqrt(2.0 * M_PI));
    return std::log(0.5 * norm * (std::exp(-0.5 * d1 * d1) + std::exp(-0.5 * d2 * d2)));
}

namespace {

DyadicTree bench_tree(const std::vector<std::vector<double>>& obs, int depth) {
    std::vector<double> pooled;
    for (const auto& ys : obs) pooled.insert(pooled.end(), ys.begin(), ys.end());
    if (pooled.empty()) throw std::invalid_argument("benchmark: no training data");
    double mean = 0.0;
    for (double y : pooled) mean += y;
    mean /= static_cast<double>(pooled.size());
    double var = 0.0;
    for (double y : pooled) var += (y - mean) * (y - mean);
    const double sd = std::sqrt(var / static_cast<double>(pooled.size()));
    const auto [mn, mx] = std::minmax_element(pooled.begin(), pooled.end());
    // support padded so fresh evaluation draws rarely clamp
    return build_balanced_tree(pooled, depth, *mn - 3.0 * sd, *mx + 3.0 * sd);
}

double eval_nll(const DensityModel& model, const std::vector<std::vector<double>>& eval,
                const std::vector<char>* restrict_missing, const std::vector<char>& missing) {
    double nll = 0.0;
    std::int64_t count = 0;
    for (VertexId v = 0; v < model.n_vertices(); ++v) {
        if (restrict_missing && !missing[v]) continue;
        for (double y : eval[v]) {
            nll += -std::log(std::max(model.density_at(v, y), 1e-300));
            ++count;
        }
    }
    return nll / static_cast<double>(count);
}

std::array<bool, 4> method_mask(const std::string& method) {
    if (method == "gfl") return {true, false, true, false};
    if (method == "gmrf") return {false, true, false, true};
    if (method == "gfen") return {true, true, true, true};
    throw std::invalid_argument("unknown method: " + method);
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const SimTask& task, const std::vector<std::string>& methods,
                                        const BenchmarkOptions& opts) {
    const SimData data = sample_task(task);
    const auto graph = sim_graph(task.grid);
    const auto trails = decompose_trails(graph);
    const VertexId nv = graph.n_vertices();

    const DyadicTree tree = bench_tree(data.observations, opts.tree_depth);
    const SplitCounts counts = bin_observations(tree, nv, data.observations);
    std::vector<BinomialNodeData> split_data;
    for (int s = 0; s < tree.n_splits(); ++s)
        split_data.push_back(BinomialNodeData::from_counts(counts, s));

    const FoldAssignment folds = assign_folds(nv, opts.folds, opts.seed ^ 0xf01d5ULL);

    // shared candidate draws; each method zeroes its restricted norms
    std::mt19937_64 rng(opts.seed ^ 0xd7a5ULL);
    std::uniform_real_distribution<double> unif(opts.log10_lo, opts.log10_hi);
    std::vector<std::array<double, 4>> draws(opts.n_lambda);
    for (auto& d : draws)
        for (double& x : d) x = std::pow(10.0, unif(rng));

    std::vector<BenchmarkRow> rows;
    for (const auto& method : methods) {
        const auto mask = method_mask(method);
        BenchmarkRow row;
        row.method = method;
        double best_cv = std::numeric_limits<double>::infinity();
        PenaltyConfig best{};
        for (const auto& d : draws) {
            PenaltyConfig pen{mask[0] ? d[0] : 0.0, mask[1] ? d[1] : 0.0, mask[2] ? d[2] : 0.0,
                              mask[3] ? d[3] : 0.0};
            CvOptions cv;
            cv.admm = opts.cv_admm;
            const CvResult res = cv_loss(split_data, nv, trails, pen, folds, cv);
            if (!res.all_converged) {
                ++row.discarded_draws;
                continue;
            }
            if (res.mean_nll < best_cv) {
                best_cv = res.mean_nll;
                best = pen;
            }
        }
        if (!std::isfinite(best_cv)) {
            // every draw was discarded; fall back to the mildest penalty drawn
            best = PenaltyConfig{mask[0] ? 1.0 : 0.0, mask[1] ? 1.0 : 0.0, mask[2] ? 1.0 : 0.0,
                                 mask[3] ? 1.0 : 0.0};
        }
        row.selected = best;
        row.cv_nll = best_cv;

        AdmmOptions final_admm = opts.final_admm;
        if (best.lambda_s2 == 0 && best.lambda_t2 == 0) final_admm.ridge = 1e-8;
        std::vector<SplitField> fields;
        for (const auto& sd : split_data)
            fields.push_back(fit_map(sd, nv, trails, best, final_admm));
        const DensityModel model = reconstruct_density(tree, fields);
        row.eval_nll = eval_nll(model, data.eval, nullptr, data.missing);
        row.eval_nll_missing = eval_nll(model, data.eval, &data.missing, data.missing);
        rows.push_back(row);
    }
    return rows;
}

BaselineNll benchmark_baselines(const SimTask& task, const BenchmarkOptions& opts) {
    const SimData data = sample_task(task);
    const auto graph = sim_graph(task.grid);
    const VertexId nv = graph.n_vertices();
    const DyadicTree tree = bench_tree(data.observations, opts.tree_depth);
    const SplitCounts counts = bin_observations(tree, nv, data.observations);

    // pooled density: every vertex shares the global split rates
    std::vector<SplitField> fields;
    for (int s = 0; s < tree.n_splits(); ++s) {
        std::int64_t m = 0, sc = 0;
        for (VertexId v = 0; v < nv; ++v) {
            m += counts.attempts[s][v];
            sc += counts.successes[s][v];
        }
        const double w = (static_cast<double>(sc) + 0.5) / (static_cast<double>(m) + 1.0);
        fields.push_back(SplitField(nv, std::log(w / (1.0 - w))));
    }
    const DensityModel pooled = reconstruct_density(tree, fields);

    BaselineNll out;
    out.pooled = eval_nll(pooled, data.eval, nullptr, data.missing);
    out.pooled_missing = eval_nll(pooled, data.eval, &data.missing, data.missing);
    double truth = 0.0;
    std::int64_t cnt = 0;
    for (VertexId v = 0; v < nv; ++v)
        for (double y : data.eval[v]) {
            truth += -true_logdensity(task, data, v, y);
            ++cnt;
        }
    out.truth = truth / static_cast<double>(cnt);
    return out;
}

}  // namespace gfen
