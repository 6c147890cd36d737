// gfen: density smoothing over spatiotemporal graphs.
//
// Pipeline: ingest -> graph -> tree -> tune/fit -> sample/query, plus the
// simulation commands simulate/bench and the tv solver debug command.
// Logs go to stderr; data products are files only. Exit codes: 0 success,
// 2 input or configuration error, 3 numerical failure.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfen/admm.hpp"
#include "gfen/bayesopt.hpp"
#include "gfen/csv.hpp"
#include "gfen/density.hpp"
#include "gfen/folds.hpp"
#include "gfen/gibbs.hpp"
#include "gfen/graph.hpp"
#include "gfen/ingest.hpp"
#include "gfen/jobs.hpp"
#include "gfen/manifest.hpp"
#include "gfen/sim.hpp"
#include "gfen/tree.hpp"
#include "gfen/tv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gfen;

namespace {

struct PenaltyFlags {
    double s1 = -1, s2 = -1, t1 = -1, t2 = -1;
    std::string penalties_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda-s1", s1, "Spatial l1 penalty");
        cmd->add_option("--lambda-s2", s2, "Spatial l2 penalty");
        cmd->add_option("--lambda-t1", t1, "Temporal l1 penalty");
        cmd->add_option("--lambda-t2", t2, "Temporal l2 penalty");
        cmd->add_option("--penalties", penalties_file,
                        "JSON penalty manifest (as written by tune)");
    }

    PenaltyConfig resolve() const {
        PenaltyConfig p;
        if (!penalties_file.empty()) {
            const json j = json::parse(read_text_file(penalties_file));
            const json& src = j.contains("penalties") ? j.at("penalties") : j;
            p.lambda_s1 = src.at("lambda_s1").get<double>();
            p.lambda_s2 = src.at("lambda_s2").get<double>();
            p.lambda_t1 = src.at("lambda_t1").get<double>();
            p.lambda_t2 = src.at("lambda_t2").get<double>();
        }
        if (s1 >= 0) p.lambda_s1 = s1;
        if (s2 >= 0) p.lambda_s2 = s2;
        if (t1 >= 0) p.lambda_t1 = t1;
        if (t2 >= 0) p.lambda_t2 = t2;
        if (!p.valid()) throw ConfigError("penalties must be non-negative");
        return p;
    }
};

json penalties_to_json(const PenaltyConfig& p) {
    return json{{"lambda_s1", p.lambda_s1},
                {"lambda_s2", p.lambda_s2},
                {"lambda_t1", p.lambda_t1},
                {"lambda_t2", p.lambda_t2}};
}

SpatioTemporalGraph load_graph(const std::string& path) {
    return graph_from_json(read_text_file(path));
}

DyadicTree load_tree(const std::string& path) {
    return DyadicTree::from_json(read_text_file(path));
}

// observations CSV -> per-vertex sample lists over the graph
std::vector<std::vector<double>> load_observations(const std::string& path,
                                                   const SpatioTemporalGraph& graph,
                                                   IngestStats& stats) {
    const CsvTable t = read_csv(path);
    const int c_taz = t.require_column("taz");
    const int c_hour = t.require_column("hour");
    const int c_pi = t.require_column("productivity");
    std::vector<ProductivityObservation> obs;
    obs.reserve(t.rows.size());
    for (const auto& row : t.rows)
        obs.push_back({row[c_taz], std::stoi(row[c_hour]), std::stod(row[c_pi])});
    return bin_to_graph(obs, graph, stats);
}

std::vector<double> pooled_values(const std::vector<std::vector<double>>& per_vertex) {
    std::vector<double> pooled;
    for (const auto& v : per_vertex) pooled.insert(pooled.end(), v.begin(), v.end());
    return pooled;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
}

std::string split_file_name(int split) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "beta_split_%03d.csv", split);
    return buf;
}

struct FitProducts {
    std::vector<SplitField> fields;
    std::vector<AdmmReport> reports;
    std::vector<int> nonconverged;
    bool nonstrict_warning = false;
};

FitProducts fit_all_splits(const std::vector<BinomialNodeData>& split_data, VertexId nv,
                           const TrailDecomposition& trails, const PenaltyConfig& pen,
                           const AdmmOptions& admm, int threads) {
    FitProducts out;
    out.fields.resize(split_data.size());
    out.reports.resize(split_data.size());
    parallel_for(split_data.size(), threads, [&](std::size_t s) {
        out.fields[s] = fit_map(split_data[s], nv, trails, pen, admm, &out.reports[s]);
    });
    for (std::size_t s = 0; s < split_data.size(); ++s) {
        if (!out.reports[s].converged) out.nonconverged.push_back(static_cast<int>(s));
        out.nonstrict_warning = out.nonstrict_warning || out.reports[s].nonstrict_warning;
    }
    return out;
}

// ---------------- subcommand payloads ----------------

int cmd_ingest(const std::string& trips_path, const std::string& config_path,
               const std::string& from, const std::string& to, const std::string& out_path) {
    TripColumns cols;
    if (!config_path.empty()) {
        const json cfg = json::parse(read_text_file(config_path));
        if (cfg.contains("columns")) {
            const json& c = cfg.at("columns");
            if (c.contains("driver")) cols.driver = c.at("driver");
            if (c.contains("dispatch")) cols.dispatch = c.at("dispatch");
            if (c.contains("pickup")) cols.pickup = c.at("pickup");
            if (c.contains("end")) cols.end = c.at("end");
            if (c.contains("pickup_taz")) cols.pickup_taz = c.at("pickup_taz");
            if (c.contains("dropoff_taz")) cols.dropoff_taz = c.at("dropoff_taz");
            if (c.contains("fare")) cols.fare = c.at("fare");
        }
    }
    std::optional<std::int64_t> wfrom, wto;
    if (!from.empty()) wfrom = parse_timestamp(from + " 00:00:00");
    if (!to.empty()) wto = parse_timestamp(to + " 00:00:00");

    IngestStats stats;
    const auto trips = read_trips_csv(trips_path, cols);
    const auto obs = compute_productivity(trips, stats, wfrom, wto);

    std::ostringstream out;
    out << "taz,hour,productivity\n";
    for (const auto& o : obs)
        out << o.taz << ',' << o.hour_of_week << ',' << format_double(o.productivity) << '\n';
    write_text_file(out_path, out.str());
    std::cerr << "ingest: " << stats.trips_in << " trips, " << stats.pairs << " pairs, "
              << stats.emitted << " observations (" << stats.dropped_idle << " idle-filtered, "
              << stats.rejected_negative << " negative-duration, "
              << stats.rejected_nonpositive_productivity << " non-positive, "
              << stats.filtered_window << " outside window)\n";
    return 0;
}

int cmd_graph(const std::string& locations_path, const std::string& adjacency_path, int times,
              const std::string& out_path) {
    const CsvTable locs = read_csv(locations_path);
    const int c_loc = locs.require_column("loc_id");
    std::vector<std::string> ids;
    for (const auto& row : locs.rows) ids.push_back(row[c_loc]);

    const CsvTable adj = read_csv(adjacency_path);
    const int c_a = adj.require_column("loc_a");
    const int c_b = adj.require_column("loc_b");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& row : adj.rows) pairs.push_back({row[c_a], row[c_b]});

    const auto graph = build_graph(ids, pairs, times);
    write_text_file(out_path, graph_to_json(graph));
    std::cerr << "graph: " << graph.locations.size() << " locations x " << graph.times
              << " hours = " << graph.n_vertices() << " vertices, "
              << graph.spatial_edges.size() << " spatial edges, " << graph.temporal_edges.size()
              << " temporal edges\n";
    if (!graph.dropped.empty()) {
        std::cerr << "graph: dropped " << graph.dropped.size()
                  << " locations outside the largest connected component:";
        for (const auto& d : graph.dropped) std::cerr << ' ' << d;
        std::cerr << '\n';
    }
    return 0;
}

int cmd_tree(const std::string& obs_path, int depth, double tail_cap, const std::string& out_path) {
    const CsvTable t = read_csv(obs_path);
    const int c_pi = t.require_column("productivity");
    std::vector<double> pooled;
    pooled.reserve(t.rows.size());
    for (const auto& row : t.rows) pooled.push_back(std::stod(row[c_pi]));
    const auto tree = build_quantile_tree(pooled, depth, tail_cap);
    write_text_file(out_path, tree.to_json());
    std::cerr << "tree: " << tree.n_splits() << " splits (" << tree.merged_splits()
              << " merged), " << tree.n_leaves() << " leaves, support ["
              << tree.support_lo() << ", " << tree.support_hi() << ")\n";
    return 0;
}

int cmd_fit(const std::string& graph_path, const std::string& tree_path,
            const std::string& obs_path, const PenaltyFlags& pflags, double tol, int max_iters,
            std::uint64_t seed, int threads, bool diagnostics, const std::string& out_dir) {
    const auto graph = load_graph(graph_path);
    const auto tree = load_tree(tree_path);
    const PenaltyConfig pen = pflags.resolve();
    IngestStats stats;
    const auto per_vertex = load_observations(obs_path, graph, stats);
    const auto counts = bin_observations(tree, graph.n_vertices(), per_vertex);
    std::vector<BinomialNodeData> split_data;
    for (int s = 0; s < tree.n_splits(); ++s)
        split_data.push_back(BinomialNodeData::from_counts(counts, s));
    const auto trails = decompose_trails(graph);

    AdmmOptions admm;
    admm.rel_tol = tol;
    admm.max_iters = max_iters;

    ensure_dir(out_dir);
    std::vector<std::ostringstream> diag_streams(split_data.size());
    if (diagnostics) {
        // diagnostics force a single-threaded fit so streams stay ordered
        threads = 1;
    }

    FitProducts fit;
    fit.fields.resize(split_data.size());
    fit.reports.resize(split_data.size());
    parallel_for(split_data.size(), threads, [&](std::size_t s) {
        AdmmOptions o = admm;
        if (diagnostics) o.diagnostics = &diag_streams[s];
        fit.fields[s] = fit_map(split_data[s], graph.n_vertices(), trails, pen, o, &fit.reports[s]);
    });
    for (std::size_t s = 0; s < split_data.size(); ++s)
        if (!fit.reports[s].converged) fit.nonconverged.push_back(static_cast<int>(s));

    for (std::size_t s = 0; s < fit.fields.size(); ++s) {
        std::ostringstream out;
        out << "vertex,beta\n";
        for (VertexId v = 0; v < graph.n_vertices(); ++v)
            out << v << ',' << format_double(fit.fields[s][v]) << '\n';
        write_text_file(out_dir + "/" + split_file_name(static_cast<int>(s)), out.str());
        if (diagnostics)
            write_text_file(out_dir + "/diagnostics_split_" + std::to_string(s) + ".csv",
                            diag_streams[s].str());
    }
    const auto model = reconstruct_density(tree, fit.fields);
    write_text_file(out_dir + "/density.csv", model.to_csv());

    json manifest;
    manifest["version"] = kGfenVersion;
    manifest["command"] = "fit";
    manifest["penalties"] = penalties_to_json(pen);
    manifest["options"] = {{"rel_tol", tol}, {"max_iters", max_iters}, {"seed", seed}};
    manifest["inputs"] = {
        {"graph", {{"path", graph_path}, {"fnv1a64", file_content_hash(graph_path)}}},
        {"tree", {{"path", tree_path}, {"fnv1a64", file_content_hash(tree_path)}}},
        {"observations", {{"path", obs_path}, {"fnv1a64", file_content_hash(obs_path)}}}};
    manifest["splits"] = static_cast<int>(fit.fields.size());
    manifest["clamped_observations"] = counts.clamped;
    manifest["nonconverged_splits"] = fit.nonconverged;
    write_text_file(out_dir + "/manifest.json", manifest.dump(2));

    for (const auto& rep : fit.reports)
        if (rep.nonstrict_warning) {
            std::cerr << "fit: warning: both l2 penalties are zero with missing-data vertices; "
                         "the objective is not strictly convex\n";
            break;
        }
    if (!fit.nonconverged.empty()) {
        std::cerr << "fit: solver did not converge on splits:";
        for (int s : fit.nonconverged) std::cerr << ' ' << s;
        std::cerr << '\n';
        return 3;
    }
    std::cerr << "fit: " << fit.fields.size() << " splits fitted, outputs in " << out_dir << '\n';
    return 0;
}

int cmd_tune(const std::string& graph_path, const std::string& tree_path,
             const std::string& obs_path, int generations, int candidates, int k_folds,
             std::uint64_t seed, bool shared, const std::string& method, double tol, int max_iters,
             int threads, const std::string& out_log, const std::string& out_best) {
    const auto graph = load_graph(graph_path);
    const auto tree = load_tree(tree_path);
    IngestStats stats;
    const auto per_vertex = load_observations(obs_path, graph, stats);
    const auto counts = bin_observations(tree, graph.n_vertices(), per_vertex);
    const auto trails = decompose_trails(graph);
    std::vector<BinomialNodeData> split_data;
    for (int s = 0; s < tree.n_splits(); ++s)
        split_data.push_back(BinomialNodeData::from_counts(counts, s));

    std::array<bool, 4> active{true, true, true, true};
    if (method == "gfl") active = {true, false, true, false};
    else if (method == "gmrf") active = {false, true, false, true};
    else if (method != "gfen") throw ConfigError("unknown method " + method);

    const FoldAssignment folds = assign_folds(graph.n_vertices(), k_folds, seed);
    CvOptions cv;
    cv.admm.rel_tol = tol;
    cv.admm.max_iters = max_iters;

    std::ostringstream log;
    log << "split,generation,lambda_s1,lambda_s2,lambda_t1,lambda_t2,cv_nll\n";
    json best_out;
    best_out["version"] = kGfenVersion;
    best_out["mode"] = shared ? "shared" : "per_split";
    best_out["method"] = method;

    auto tune_one = [&](int split_index) {
        // split_index < 0 tunes one shared penalty across all splits
        std::vector<BinomialNodeData> subset;
        if (split_index < 0)
            subset = split_data;
        else
            subset = {split_data[split_index]};
        BayesOptState state;
        state.active = active;
        state.seed = seed + 1000003ULL * static_cast<std::uint64_t>(split_index + 1);
        for (int gen = 0; gen < generations; ++gen) {
            const auto cand = state.propose_candidates(candidates);
            std::vector<double> losses(cand.size());
            parallel_for(cand.size(), threads, [&](std::size_t c) {
                losses[c] =
                    cv_loss(subset, graph.n_vertices(), trails, state.to_penalties(cand[c]), folds, cv)
                        .mean_nll;
            });
            for (std::size_t c = 0; c < cand.size(); ++c) {
                state.record(cand[c], losses[c]);
                const PenaltyConfig p = state.to_penalties(cand[c]);
                log << split_index << ',' << gen << ',' << format_double(p.lambda_s1) << ','
                    << format_double(p.lambda_s2) << ',' << format_double(p.lambda_t1) << ','
                    << format_double(p.lambda_t2) << ',' << format_double(losses[c]) << '\n';
            }
        }
        return state.to_penalties(state.select_best());
    };

    if (shared) {
        const PenaltyConfig best = tune_one(-1);
        best_out["penalties"] = penalties_to_json(best);
    } else {
        json per_split = json::array();
        for (int s = 0; s < tree.n_splits(); ++s) {
            const PenaltyConfig best = tune_one(s);
            per_split.push_back(penalties_to_json(best));
            std::cerr << "tune: split " << s << " best " << penalties_to_json(best).dump() << '\n';
        }
        best_out["per_split_penalties"] = per_split;
        // convenience: the root split's choice doubles as a whole-model default
        best_out["penalties"] = per_split[0];
    }
    write_text_file(out_log, log.str());
    write_text_file(out_best, best_out.dump(2));
    std::cerr << "tune: evaluated " << generations << " generations x " << candidates
              << " candidates x " << k_folds << " folds\n";
    return 0;
}

int cmd_sample(const std::string& graph_path, const std::string& tree_path,
               const std::string& obs_path, const PenaltyFlags& pflags, int iters, int burn_in,
               int thin, std::uint64_t seed, int threads, bool async, const std::string& out_dir) {
    const auto graph = load_graph(graph_path);
    const auto tree = load_tree(tree_path);
    const PenaltyConfig pen = pflags.resolve();
    IngestStats stats;
    const auto per_vertex = load_observations(obs_path, graph, stats);
    const auto counts = bin_observations(tree, graph.n_vertices(), per_vertex);
    const auto trails = decompose_trails(graph);
    const auto nbrs = NeighborLists::from_graph(graph);

    ensure_dir(out_dir);
    std::vector<BinomialNodeData> split_data;
    for (int s = 0; s < tree.n_splits(); ++s)
        split_data.push_back(BinomialNodeData::from_counts(counts, s));

    AdmmOptions admm;
    FitProducts map_fit = fit_all_splits(split_data, graph.n_vertices(), trails, pen, admm, threads);

    GibbsOptions gibbs;
    gibbs.iters = iters;
    gibbs.burn_in = burn_in;
    gibbs.thin = thin;
    gibbs.threads = async ? std::max(threads, 2) : 1;

    for (int s = 0; s < tree.n_splits(); ++s) {
        gibbs.seed = seed + 7919ULL * static_cast<std::uint64_t>(s);
        const GibbsResult res = run_chain(split_data[s], nbrs, pen, map_fit.fields[s], gibbs);
        std::ostringstream samples;
        samples << "iter,vertex,beta\n";
        for (std::size_t i = 0; i < res.samples.size(); ++i)
            for (VertexId v = 0; v < graph.n_vertices(); ++v)
                samples << i << ',' << v << ',' << format_double(res.samples[i][v]) << '\n';
        write_text_file(out_dir + "/samples_split_" + std::to_string(s) + ".csv", samples.str());
        std::ostringstream summary;
        summary << "vertex,post_mean,q05,q95\n";
        for (VertexId v = 0; v < graph.n_vertices(); ++v)
            summary << v << ',' << format_double(res.summary.post_mean[v]) << ','
                    << format_double(res.summary.q05[v]) << ','
                    << format_double(res.summary.q95[v]) << '\n';
        write_text_file(out_dir + "/summary_split_" + std::to_string(s) + ".csv", summary.str());
        std::cerr << "sample: split " << s << " retained " << res.samples.size() << " fields\n";
    }
    return 0;
}

int cmd_query(const std::string& model_dir, const std::string& graph_override,
              const std::string& kind, double threshold, const std::string& preset, double alpha,
              int hour, const std::string& out_path) {
    const json manifest = json::parse(read_text_file(model_dir + "/manifest.json"));
    const std::string graph_path =
        graph_override.empty() ? manifest.at("inputs").at("graph").at("path").get<std::string>()
                               : graph_override;
    const std::string tree_path = manifest.at("inputs").at("tree").at("path").get<std::string>();
    const auto graph = load_graph(graph_path);
    const auto tree = load_tree(tree_path);
    const auto model = DensityModel::from_csv(tree, read_text_file(model_dir + "/density.csv"));

    // living wage + activity costs, $/hour
    const std::vector<std::pair<std::string, double>> living_wage_costs{
        {"1_adult_0_children", 18.56},
        {"2_adults_2_children", 21.64},
        {"2_adults_1_working_2_children", 32.73},
        {"1_adult_2_children", 34.74}};

    std::vector<double> thresholds;
    if (!preset.empty()) {
        if (preset != "living_wage_costs") throw ConfigError("unknown preset " + preset);
        for (const auto& [name, value] : living_wage_costs) thresholds.push_back(value);
    } else if (kind == "tail_probability") {
        if (std::isnan(threshold)) throw ConfigError("tail_probability needs --threshold");
        thresholds.push_back(threshold);
    }

    std::ostringstream out;
    auto emit = [&](const std::string& header, auto&& value_fn) {
        out << header << '\n';
        for (VertexId v = 0; v < model.n_vertices(); ++v) {
            const int t = graph.time_of(v);
            if (hour >= 0 && t != hour) continue;
            out << graph.locations[graph.loc_of(v)] << ',' << t << ',' << value_fn(v) << '\n';
        }
    };

    if (kind == "tail_probability") {
        if (thresholds.size() == 1) {
            emit("taz,hour,value", [&](VertexId v) {
                return format_double(model.tail_probability(v, thresholds[0]));
            });
        } else {
            out << "taz,hour";
            for (const auto& [name, value] : living_wage_costs) out << ',' << name;
            out << '\n';
            for (VertexId v = 0; v < model.n_vertices(); ++v) {
                const int t = graph.time_of(v);
                if (hour >= 0 && t != hour) continue;
                out << graph.locations[graph.loc_of(v)] << ',' << t;
                for (double thr : thresholds) out << ',' << format_double(model.tail_probability(v, thr));
                out << '\n';
            }
        }
    } else if (kind == "quantile") {
        if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("quantile needs --alpha in (0,1)");
        emit("taz,hour,value", [&](VertexId v) { return format_double(model.quantile(v, alpha)); });
    } else if (kind == "iqr") {
        emit("taz,hour,value", [&](VertexId v) { return format_double(model.iqr(v)); });
    } else if (kind == "mean") {
        emit("taz,hour,value", [&](VertexId v) { return format_double(model.mean(v)); });
    } else {
        throw ConfigError("unknown query kind " + kind);
    }
    write_text_file(out_path, out.str());
    std::cerr << "query: wrote " << out_path << '\n';
    return 0;
}

int cmd_simulate(int grid, const std::string& spatial, const std::string& temporal, double missing,
                 double sigma, int samples, bool outliers, std::uint64_t seed,
                 const std::string& out_dir) {
    SimTask task;
    task.grid = grid;
    task.spatial_kind = effect_kind_from_string(spatial);
    task.temporal_kind = effect_kind_from_string(temporal);
    task.missing_fraction = missing;
    task.sigma = sigma;
    task.samples_per_vertex = samples;
    task.outliers = outliers;
    task.seed = seed;
    const SimData data = sample_task(task);
    const auto graph = sim_graph(grid);

    ensure_dir(out_dir);
    std::ostringstream obs;
    obs << "taz,hour,productivity\n";
    for (VertexId v = 0; v < graph.n_vertices(); ++v)
        for (double y : data.observations[v])
            obs << graph.locations[graph.loc_of(v)] << ',' << graph.time_of(v) << ','
                << format_double(y) << '\n';
    write_text_file(out_dir + "/observations.csv", obs.str());

    std::ostringstream eval;
    eval << "vertex,value\n";
    for (VertexId v = 0; v < graph.n_vertices(); ++v)
        for (double y : data.eval[v]) eval << v << ',' << format_double(y) << '\n';
    write_text_file(out_dir + "/eval_samples.csv", eval.str());

    std::ostringstream truth;
    truth << "index,nu1,nu2,mu1,mu2\n";
    for (int i = 0; i < grid; ++i)
        truth << i << ',' << format_double(data.nu1[i]) << ',' << format_double(data.nu2[i]) << ','
              << format_double(data.mu1[i]) << ',' << format_double(data.mu2[i]) << '\n';
    write_text_file(out_dir + "/effects.csv", truth.str());

    write_text_file(out_dir + "/graph.json", graph_to_json(graph));
    std::cerr << "simulate: " << to_string(task.spatial_kind) << " x "
              << to_string(task.temporal_kind) << ", " << graph.n_vertices() << " vertices\n";
    return 0;
}

int cmd_bench(int grid, int replicates, int n_lambda, int depth, int k_folds, double sigma,
              bool paper_scale, std::uint64_t seed, int threads, const std::string& out_dir) {
    if (paper_scale) {
        grid = 30;
        replicates = 48;
        n_lambda = 24;
    }
    struct Family {
        EffectKind s, t;
        bool outliers;
    };
    const std::vector<Family> families{
        {EffectKind::pw_constant, EffectKind::pw_constant, false},
        {EffectKind::pw_constant, EffectKind::pw_linear, false},
        {EffectKind::pw_constant, EffectKind::mixed, false},
        {EffectKind::pw_linear, EffectKind::pw_linear, false},
        {EffectKind::pw_linear, EffectKind::mixed, false},
        {EffectKind::mixed, EffectKind::mixed, false},
        {EffectKind::mixed, EffectKind::mixed, true},
    };
    const std::vector<double> missing_rates{0.1, 0.8};
    const std::vector<std::string> methods{"gfl", "gfen", "gmrf"};

    struct Job {
        SimTask task;
        int family;
        int replicate;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (double miss : missing_rates)
            for (int r = 0; r < replicates; ++r) {
                SimTask task;
                task.grid = grid;
                task.spatial_kind = families[f].s;
                task.temporal_kind = families[f].t;
                task.outliers = families[f].outliers;
                task.missing_fraction = miss;
                task.sigma = sigma;
                task.seed = seed + 1315423911ULL * (jobs.size() + 1);
                jobs.push_back({task, static_cast<int>(f), r});
            }

    BenchmarkOptions opts;
    opts.n_lambda = n_lambda;
    opts.folds = k_folds;
    opts.tree_depth = depth;

    std::vector<std::vector<BenchmarkRow>> results(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        BenchmarkOptions o = opts;
        o.seed = jobs[j].task.seed ^ 0xbe9cULL;
        results[j] = run_benchmark(jobs[j].task, methods, o);
        std::cerr << "bench: " << jobs[j].task.family_name() << " missing "
                  << jobs[j].task.missing_fraction << " rep " << jobs[j].replicate << " done\n";
    });

    ensure_dir(out_dir);
    std::ostringstream rows;
    rows << "task,missing,method,replicate,lambda_s1,lambda_s2,lambda_t1,lambda_t2,cv_nll,eval_nll\n";
    for (std::size_t j = 0; j < jobs.size(); ++j)
        for (const auto& row : results[j])
            rows << jobs[j].task.family_name() << ',' << jobs[j].task.missing_fraction << ','
                 << row.method << ',' << jobs[j].replicate << ','
                 << format_double(row.selected.lambda_s1) << ','
                 << format_double(row.selected.lambda_s2) << ','
                 << format_double(row.selected.lambda_t1) << ','
                 << format_double(row.selected.lambda_t2) << ',' << format_double(row.cv_nll)
                 << ',' << format_double(row.eval_nll) << '\n';
    write_text_file(out_dir + "/bench_runs.csv", rows.str());

    // summary in the task x method layout
    std::ostringstream summary;
    summary << "task,missing,gfl,gfen,gmrf\n";
    for (std::size_t f = 0; f < families.size(); ++f)
        for (double miss : missing_rates) {
            std::array<double, 3> mean{0, 0, 0};
            std::array<int, 3> count{0, 0, 0};
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (jobs[j].family != static_cast<int>(f) ||
                    jobs[j].task.missing_fraction != miss)
                    continue;
                for (const auto& row : results[j]) {
                    const int mi = row.method == "gfl" ? 0 : (row.method == "gfen" ? 1 : 2);
                    mean[mi] += row.eval_nll;
                    ++count[mi];
                }
            }
            SimTask probe;
            probe.spatial_kind = families[f].s;
            probe.temporal_kind = families[f].t;
            probe.outliers = families[f].outliers;
            summary << probe.family_name() << ',' << miss;
            for (int m = 0; m < 3; ++m) summary << ',' << format_double(mean[m] / count[m]);
            summary << '\n';
        }
    write_text_file(out_dir + "/summary.csv", summary.str());
    std::cerr << "bench: wrote " << out_dir << "/bench_runs.csv and summary.csv\n";
    return 0;
}

int cmd_tv(const std::string& input, double lambda1, double lambda2, const std::string& out_path) {
    const CsvTable t = read_csv(input);
    const int c = t.require_column("value");
    std::vector<double> y;
    for (const auto& row : t.rows) y.push_back(std::stod(row[c]));
    std::ostringstream out;
    out << "value";
    std::vector<double> z1, z2;
    if (lambda1 >= 0) {
        z1 = tv1_prox(y, lambda1);
        out << ",tv1";
    }
    if (lambda2 >= 0) {
        z2 = tv2_prox(y, lambda2);
        out << ",tv2";
    }
    out << '\n';
    for (std::size_t i = 0; i < y.size(); ++i) {
        out << format_double(y[i]);
        if (!z1.empty()) out << ',' << format_double(z1[i]);
        if (!z2.empty()) out << ',' << format_double(z2[i]);
        out << '\n';
    }
    write_text_file(out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gfen: nonparametric density smoothing over spatiotemporal graphs"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker thread cap")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Trip CSV to productivity observations");
    std::string trips, ingest_config, from, to, ingest_out;
    ingest->add_option("--trips", trips, "Trip records CSV")->required();
    ingest->add_option("--config", ingest_config, "JSON config with a columns mapping");
    ingest->add_option("--from", from, "Analysis window start (YYYY-MM-DD)");
    ingest->add_option("--to", to, "Analysis window end (YYYY-MM-DD, exclusive)");
    ingest->add_option("--out", ingest_out, "Output observations CSV")->required();

    // graph
    auto* graphc = app.add_subcommand("graph", "Build the spatiotemporal graph");
    std::string locations, adjacency, graph_out;
    int times = 168;
    graphc->add_option("--locations", locations, "Locations CSV (loc_id)")->required();
    graphc->add_option("--adjacency", adjacency, "Adjacency CSV (loc_a,loc_b)")->required();
    graphc->add_option("--times", times, "Time slots per cycle")->capture_default_str();
    graphc->add_option("--out", graph_out, "Output graph JSON")->required();

    // tree
    auto* treec = app.add_subcommand("tree", "Build the dyadic quantile tree");
    std::string tree_obs, tree_out;
    int depth = 5;
    double tail_cap = 100.0;
    treec->add_option("--observations", tree_obs, "Observations CSV")->required();
    treec->add_option("--depth", depth, "Balanced tree depth")->capture_default_str();
    treec->add_option("--tail-cap", tail_cap, "Upper cap for right-tail splits, $/hour")
        ->capture_default_str();
    treec->add_option("--out", tree_out, "Output tree JSON")->required();

    // fit
    auto* fitc = app.add_subcommand("fit", "MAP fit of all splits and density export");
    std::string fit_graph, fit_tree, fit_obs, fit_out;
    PenaltyFlags fit_pen;
    double fit_tol = 1e-6;
    int fit_iters = 5000;
    std::uint64_t fit_seed = 0;
    bool fit_diag = false;
    fitc->add_option("--graph", fit_graph)->required();
    fitc->add_option("--tree", fit_tree)->required();
    fitc->add_option("--observations", fit_obs)->required();
    fit_pen.attach(fitc);
    fitc->add_option("--tol", fit_tol, "Relative residual tolerance")->capture_default_str();
    fitc->add_option("--max-iters", fit_iters)->capture_default_str();
    fitc->add_option("--seed", fit_seed)->capture_default_str();
    fitc->add_flag("--diagnostics", fit_diag, "Write per-iteration solver CSVs");
    fitc->add_option("--out-dir", fit_out)->required();

    // tune
    auto* tunec = app.add_subcommand("tune", "Cross-validated Bayesian-optimization search");
    std::string tune_graph, tune_tree, tune_obs, tune_log = "tuning.csv", tune_best = "best.json";
    std::string tune_method = "gfen";
    int generations = 48, candidates = 6, k_folds = 5;
    std::uint64_t tune_seed = 0;
    bool shared = false;
    double tune_tol = 1e-4;
    int tune_iters = 2000;
    tunec->add_option("--graph", tune_graph)->required();
    tunec->add_option("--tree", tune_tree)->required();
    tunec->add_option("--observations", tune_obs)->required();
    tunec->add_option("--generations", generations)->capture_default_str();
    tunec->add_option("--candidates", candidates)->capture_default_str();
    tunec->add_option("--folds", k_folds)->capture_default_str();
    tunec->add_option("--seed", tune_seed)->capture_default_str();
    tunec->add_flag("--shared", shared, "One penalty shared by all splits");
    tunec->add_option("--method", tune_method, "gfen | gfl | gmrf")->capture_default_str();
    tunec->add_option("--tol", tune_tol)->capture_default_str();
    tunec->add_option("--max-iters", tune_iters)->capture_default_str();
    tunec->add_option("--out-log", tune_log)->capture_default_str();
    tunec->add_option("--out-best", tune_best)->capture_default_str();

    // sample
    auto* samplec = app.add_subcommand("sample", "Posterior sampling from the MAP start");
    std::string s_graph, s_tree, s_obs, s_out;
    PenaltyFlags s_pen;
    int iters = 5000, burn_in = 4000, thin = 1;
    std::uint64_t s_seed = 0;
    bool s_async = false;
    samplec->add_option("--graph", s_graph)->required();
    samplec->add_option("--tree", s_tree)->required();
    samplec->add_option("--observations", s_obs)->required();
    s_pen.attach(samplec);
    samplec->add_option("--iters", iters)->capture_default_str();
    samplec->add_option("--burn-in", burn_in)->capture_default_str();
    samplec->add_option("--thin", thin)->capture_default_str();
    samplec->add_option("--seed", s_seed)->capture_default_str();
    samplec->add_flag("--async", s_async, "Asynchronous block updates (not bit-reproducible)");
    samplec->add_option("--out-dir", s_out)->required();

    // query
    auto* queryc = app.add_subcommand("query", "Per-vertex density queries");
    std::string q_model, q_graph, q_kind = "tail_probability", q_preset, q_out;
    double q_threshold = std::nan(""), q_alpha = std::nan("");
    int q_hour = -1;
    queryc->add_option("--model-dir", q_model)->required();
    queryc->add_option("--graph", q_graph, "Override the graph path from the manifest");
    queryc->add_option("--kind", q_kind, "tail_probability | quantile | iqr | mean")
        ->capture_default_str();
    queryc->add_option("--threshold", q_threshold, "Tail threshold, $/hour");
    queryc->add_option("--preset", q_preset, "living_wage_costs");
    queryc->add_option("--alpha", q_alpha, "Quantile level in (0,1)");
    queryc->add_option("--hour", q_hour, "Restrict to one hour of the week");
    queryc->add_option("--out", q_out)->required();

    // simulate
    auto* simc = app.add_subcommand("simulate", "Generate a simulated smoothing task");
    int sim_grid = 15, sim_samples = 10;
    std::string sim_spatial = "pw_constant", sim_temporal = "pw_constant", sim_out;
    double sim_missing = 0.1, sim_sigma = 0.2;
    bool sim_outliers = false;
    std::uint64_t sim_seed = 0;
    simc->add_option("--grid", sim_grid)->capture_default_str();
    simc->add_option("--spatial", sim_spatial)->capture_default_str();
    simc->add_option("--temporal", sim_temporal)->capture_default_str();
    simc->add_option("--missing", sim_missing)->capture_default_str();
    simc->add_option("--sigma", sim_sigma)->capture_default_str();
    simc->add_option("--samples", sim_samples)->capture_default_str();
    simc->add_flag("--outliers", sim_outliers);
    simc->add_option("--seed", sim_seed)->capture_default_str();
    simc->add_option("--out-dir", sim_out)->required();

    // bench
    auto* benchc = app.add_subcommand("bench", "Simulation benchmark over the task grid");
    int b_grid = 15, b_reps = 8, b_lambda = 12, b_depth = 3, b_folds = 5;
    double b_sigma = 0.2;
    bool b_paper = false;
    std::uint64_t b_seed = 0;
    std::string b_out;
    benchc->add_option("--grid", b_grid)->capture_default_str();
    benchc->add_option("--replicates", b_reps)->capture_default_str();
    benchc->add_option("--n-lambda", b_lambda)->capture_default_str();
    benchc->add_option("--depth", b_depth)->capture_default_str();
    benchc->add_option("--folds", b_folds)->capture_default_str();
    benchc->add_option("--sigma", b_sigma)->capture_default_str();
    benchc->add_flag("--paper-scale", b_paper, "30x30 grid, 48 replicates, 24 draws");
    benchc->add_option("--seed", b_seed)->capture_default_str();
    benchc->add_option("--out-dir", b_out)->required();

    // tv debug
    auto* tvc = app.add_subcommand("tv", "Run the 1D solvers on a CSV vector (column 'value')");
    std::string tv_in, tv_out;
    double tv_l1 = -1, tv_l2 = -1;
    tvc->add_option("--input", tv_in)->required();
    tvc->add_option("--lambda1", tv_l1, "l1 fused penalty");
    tvc->add_option("--lambda2", tv_l2, "l2 smoothing penalty");
    tvc->add_option("--out", tv_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(trips, ingest_config, from, to, ingest_out);
        if (*graphc) return cmd_graph(locations, adjacency, times, graph_out);
        if (*treec) return cmd_tree(tree_obs, depth, tail_cap, tree_out);
        if (*fitc)
            return cmd_fit(fit_graph, fit_tree, fit_obs, fit_pen, fit_tol, fit_iters, fit_seed,
                           threads, fit_diag, fit_out);
        if (*tunec)
            return cmd_tune(tune_graph, tune_tree, tune_obs, generations, candidates, k_folds,
                            tune_seed, shared, tune_method, tune_tol, tune_iters, threads, tune_log,
                            tune_best);
        if (*samplec)
            return cmd_sample(s_graph, s_tree, s_obs, s_pen, iters, burn_in, thin, s_seed, threads,
                              s_async, s_out);
        if (*queryc)
            return cmd_query(q_model, q_graph, q_kind, q_threshold, q_preset, q_alpha, q_hour, q_out);
        if (*simc)
            return cmd_simulate(sim_grid, sim_spatial, sim_temporal, sim_missing, sim_sigma,
                                sim_samples, sim_outliers, sim_seed, sim_out);
        if (*benchc)
            return cmd_bench(b_grid, b_reps, b_lambda, b_depth, b_folds, b_sigma, b_paper, b_seed,
                             threads, b_out);
        if (*tvc) return cmd_tv(tv_in, tv_l1, tv_l2, tv_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
