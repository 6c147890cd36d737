#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gfen/sim.hpp"

using namespace gfen;

TEST_CASE("effect_from_anchors: plateaus, tents, degenerate anchors") {
    SUBCASE("constant segments repeat the left anchor") {
        auto e = effect_from_anchors({0.5, -0.5, 0.2, 0.9}, {false, false, false}, 9);
        CHECK(e == std::vector<double>{0.5, 0.5, 0.5, -0.5, -0.5, -0.5, 0.2, 0.2, 0.2});
    }
    SUBCASE("linear segments interpolate the anchors") {
        auto e = effect_from_anchors({0.0, 1.0, 0.0, 1.0}, {true, true, true}, 9);
        const std::vector<double> want{0.0, 1.0 / 3, 2.0 / 3, 1.0, 2.0 / 3, 1.0 / 3, 0.0, 1.0 / 3, 2.0 / 3};
        REQUIRE(e.size() == want.size());
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx(want[i]));
    }
    SUBCASE("equal anchors give a constant vector under every kind") {
        for (auto linear : {std::array<bool, 3>{false, false, false},
                            std::array<bool, 3>{true, true, true},
                            std::array<bool, 3>{true, false, true}}) {
            auto e = effect_from_anchors({0.3, 0.3, 0.3, 0.3}, linear, 12);
            for (double x : e) CHECK(x == doctest::Approx(0.3));
        }
    }
}

TEST_CASE("generate_effect: kinds have the right segment structure") {
    std::mt19937_64 rng(19);
    SUBCASE("pw_constant has exactly three plateau values") {
        auto e = generate_effect(EffectKind::pw_constant, 30, rng);
        std::set<double> vals(e.begin(), e.end());
        CHECK(vals.size() <= 3);
        for (double x : e) {
            CHECK(x >= -1.0);
            CHECK(x <= 1.0);
        }
    }
    SUBCASE("mixed keeps at least one constant and one linear segment") {
        for (int rep = 0; rep < 20; ++rep) {
            auto e = generate_effect(EffectKind::mixed, 30, rng);
            int flat_segments = 0, sloped_segments = 0;
            const std::array<int, 4> cut{0, 10, 20, 30};
            for (int s = 0; s < 3; ++s) {
                bool flat = true;
                for (int i = cut[s] + 1; i < cut[s + 1]; ++i) flat = flat && e[i] == e[cut[s]];
                (flat ? flat_segments : sloped_segments) += 1;
            }
            CHECK(flat_segments >= 1);
            // a linear segment can look flat only if its anchors coincide
            CHECK(flat_segments + sloped_segments == 3);
        }
    }
}

TEST_CASE("sample_task: missing counts, sample sizes, eval coverage") {
    SimTask task;
    task.grid = 30;
    task.missing_fraction = 0.8;
    task.seed = 5;
    const auto d = sample_task(task);
    std::int64_t missing = 0;
    for (char m : d.missing) missing += m;
    CHECK(missing == 720);  // exact count via sampling without replacement
    for (VertexId v = 0; v < 900; ++v) {
        if (d.missing[v])
            CHECK(d.observations[v].empty());
        else
            CHECK(d.observations[v].size() == 10);
        CHECK(d.eval[v].size() == 100);
    }
    // determinism
    const auto d2 = sample_task(task);
    CHECK(d2.observations[0] == d.observations[0]);
    CHECK(d2.eval[33] == d.eval[33]);
}

TEST_CASE("sample_task: zero noise collapses to the two mixture atoms") {
    SimTask task;
    task.grid = 9;
    task.sigma = 0.0;
    task.missing_fraction = 0.0;
    task.seed = 8;
    const auto d = sample_task(task);
    for (VertexId v = 0; v < 81; ++v)
        for (double y : d.observations[v]) {
            const bool atom1 = y == doctest::Approx(d.true_mean1(v, 9)).epsilon(1e-12);
            const bool atom2 = y == doctest::Approx(d.true_mean2(v, 9)).epsilon(1e-12);
            CHECK((atom1 || atom2));
        }
}

TEST_CASE("sample_task: outlier mode injects one 10-sigma draw at half the observed vertices") {
    SimTask task;
    task.grid = 15;
    task.sigma = 0.25;
    task.missing_fraction = 0.1;
    task.outliers = true;
    double dev2 = 0.0;
    std::int64_t extra = 0, observed = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        task.seed = seed;
        const auto d = sample_task(task);
        for (VertexId v = 0; v < 225; ++v) {
            if (d.missing[v]) continue;
            ++observed;
            if (d.observations[v].size() == 11) {
                ++extra;
                // the injected draw is the last one; measure its deviation
                // from the nearer mixture mean
                const double y = d.observations[v].back();
                const double a = y - d.true_mean1(v, 15);
                const double b = y - d.true_mean2(v, 15);
                const double dv = std::abs(a) < std::abs(b) ? a : b;
                dev2 += dv * dv;
            } else {
                CHECK(d.observations[v].size() == 10);
            }
        }
    }
    const double frac = static_cast<double>(extra) / static_cast<double>(observed);
    CHECK(frac == doctest::Approx(0.5).epsilon(0.1));
    // RMS of the outlier deviation is near 10 sigma (slightly under, since we
    // take the nearer of the two means)
    const double rms = std::sqrt(dev2 / static_cast<double>(extra));
    CHECK(rms > 5.0 * task.sigma);
    CHECK(rms < 12.0 * task.sigma);
}

TEST_CASE("true density integrates to one") {
    SimTask task;
    task.grid = 9;
    task.seed = 3;
    const auto d = sample_task(task);
    for (VertexId v : {0, 40, 80}) {
        double mass = 0.0;
        const double h = 0.001;
        for (double y = -4.0; y <= 4.0; y += h) mass += std::exp(true_logdensity(task, d, v, y)) * h;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("run_benchmark: deterministic, truth lower-bounds fits, elastic net competitive") {
    SimTask task;
    task.grid = 8;
    task.spatial_kind = EffectKind::pw_constant;
    task.temporal_kind = EffectKind::pw_linear;
    task.missing_fraction = 0.2;
    task.samples_per_vertex = 10;
    task.seed = 21;

    BenchmarkOptions opts;
    opts.n_lambda = 6;
    opts.folds = 3;
    opts.tree_depth = 2;
    opts.seed = 77;

    const auto rows = run_benchmark(task, {"gfl", "gfen", "gmrf"}, opts);
    REQUIRE(rows.size() == 3);
    const auto rows2 = run_benchmark(task, {"gfl", "gfen", "gmrf"}, opts);
    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i].eval_nll == rows2[i].eval_nll);  // bit-reproducible
        CHECK(std::isfinite(rows[i].eval_nll));
    }

    const auto base = benchmark_baselines(task, opts);
    for (const auto& row : rows) CHECK(row.eval_nll > base.truth - 0.05);
}
