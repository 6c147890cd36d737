#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gfen/admm.hpp"
#include "gfen/ars.hpp"
#include "gfen/gibbs.hpp"
#include "gfen/graph.hpp"
#include "oracles.hpp"

using namespace gfen;
namespace oracle = gfen::testing;

TEST_CASE("ars: standard Gaussian target") {
    std::mt19937_64 rng(101);
    auto h = [](double x) { return -0.5 * x * x; };
    auto dh = [](double x) { return -x; };
    double sum = 0, sumsq = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double x = ars_sample(h, dh, -2.0, 2.0, rng);
        sum += x;
        sumsq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ars: logistic target passes a KS check") {
    std::mt19937_64 rng(202);
    // logistic density: log f = x - 2 log(1 + e^x)
    auto h = [](double x) { return x - 2.0 * (std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)))); };
    auto dh = [](double x) { return 1.0 - 2.0 * sigmoid(x); };
    std::vector<double> draws(10000);
    for (double& x : draws) x = ars_sample(h, dh, -1.5, 1.5, rng);
    const double ks = oracle::ks_statistic(draws, [](double x) { return sigmoid(x); });
    CHECK(ks < 0.02);
}

TEST_CASE("ars: initial points violating the slope condition are widened") {
    std::mt19937_64 rng(5);
    auto h = [](double x) { return -0.5 * (x - 40.0) * (x - 40.0); };
    auto dh = [](double x) { return -(x - 40.0); };
    // both inits far left of the mode; widening must recover
    double sum = 0;
    for (int i = 0; i < 2000; ++i) sum += ars_sample(h, dh, -3.0, -2.0, rng);
    CHECK(sum / 2000 == doctest::Approx(40.0).epsilon(0.01));
}

TEST_CASE("ars: hopeless target is rejected with a diagnostic") {
    std::mt19937_64 rng(6);
    auto h = [](double x) { return x; };  // no mode, slope never negative
    auto dh = [](double) { return 1.0; };
    ArsOptions opts;
    opts.max_widen = 8;
    CHECK_THROWS(ars_sample(h, dh, -1.0, 1.0, rng, opts));
}

TEST_CASE("gibbs conditional: missing vertex under l2 is Gaussian at the neighbor mean") {
    GibbsConditional c;
    c.l_s2 = 2.0;
    c.spatial_neighbors = {1.0, 3.0};
    CHECK(c.dlogdens(2.0) == doctest::Approx(0.0));
    CHECK(c.dlogdens(1.0) > 0.0);
    CHECK(c.dlogdens(3.0) < 0.0);
    // exact Gaussian: logdens differences match -(lambda2/2) sums
    const double d = (c.logdens(2.5) - c.logdens(2.0));
    CHECK(d == doctest::Approx(-0.5 * 2.0 * ((1.5 * 1.5 + 0.5 * 0.5) - (1.0 + 1.0))));
}

TEST_CASE("gibbs conditional: data-only vertex peaks at the MLE logit") {
    GibbsConditional c;
    c.m = 12;
    c.s = 4;
    const double mode = std::log(4.0 / 8.0);
    CHECK(c.dlogdens(mode) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.dlogdens(mode - 0.3) > 0.0);
    CHECK(c.dlogdens(mode + 0.3) < 0.0);
}

TEST_CASE("gibbs conditional: curvature bound from the l2 degrees") {
    GibbsConditional c;
    c.m = 7;
    c.s = 3;
    c.l_s2 = 0.8;
    c.l_t2 = 1.5;
    c.spatial_neighbors = {0.2, -0.4, 1.0};
    c.temporal_neighbors = {0.0, 0.5};
    const double bound = c.curvature_bound();
    CHECK(bound == doctest::Approx(-(3 * 0.8 + 2 * 1.5)));
    // numeric second derivative stays below the bound everywhere sampled
    for (double b = -6.0; b <= 6.0; b += 0.37) {
        const double eps = 1e-5;
        const double second = (c.logdens(b + eps) - 2.0 * c.logdens(b) + c.logdens(b - eps)) / (eps * eps);
        CHECK(second <= bound + 1e-3);
    }
}

TEST_CASE("gibbs conditional: improper case is rejected") {
    NeighborLists nbrs = NeighborLists::from_edges(2, {{0, 1}}, {});
    BinomialNodeData data{{0, 5}, {0, 2}};
    std::vector<double> beta{0.0, 0.0};
    CHECK_THROWS(conditional_logdensity(0, beta, nbrs, data, {0, 0, 0, 0}));
    CHECK_NOTHROW(conditional_logdensity(0, beta, nbrs, data, {0, 1.0, 0, 0}));
    CHECK_NOTHROW(conditional_logdensity(1, beta, nbrs, data, {0, 0, 0, 0}));
}

TEST_CASE("run_chain: single-vertex posterior matches quadrature") {
    // two data-only vertices with all penalties zero behave as independent
    // logit-binomial posteriors
    auto g = build_graph({"A"}, {}, 2);
    auto nbrs = NeighborLists::from_graph(g);
    BinomialNodeData data{{10, 10}, {3, 5}};
    GibbsOptions opts;
    opts.iters = 11000;
    opts.burn_in = 1000;
    opts.seed = 99;
    AdmmOptions fit_opts;
    fit_opts.rel_tol = 1e-8;
    auto map = fit_map(data, 2, decompose_trails(g), {0, 0, 0, 0}, fit_opts);
    const auto res = run_chain(data, nbrs, {0, 0, 0, 0}, map, opts);
    REQUIRE(res.samples.size() == 10000);
    auto target = [&](int v) {
        return [&, v](double b) {
            const double sp = std::max(b, 0.0) + std::log1p(std::exp(-std::abs(b)));
            return data.successes[v] * b - data.attempts[v] * sp;
        };
    };
    for (int v = 0; v < 2; ++v) {
        const double truth = oracle::quadrature_mean(target(v), -15.0, 15.0);
        CHECK(std::abs(res.summary.post_mean[v] - truth) < 0.05);
    }
}

TEST_CASE("run_chain: exchangeable zero-data prior gives equal marginal means") {
    auto g = build_graph({"A"}, {}, 6);  // vertex-transitive temporal cycle
    auto nbrs = NeighborLists::from_graph(g);
    BinomialNodeData data{std::vector<std::int64_t>(6, 0), std::vector<std::int64_t>(6, 0)};
    GibbsOptions opts;
    opts.iters = 3000;
    opts.burn_in = 500;
    opts.seed = 17;
    const auto res = run_chain(data, nbrs, SplitField(6, 0.0), {0, 0, 0, 4.0}, opts);
    for (int v = 1; v < 6; ++v)
        CHECK(std::abs(res.summary.post_mean[v] - res.summary.post_mean[0]) < 0.05);
}

TEST_CASE("run_chain: chain posterior brackets the MAP") {
    TrailDecomposition td;
    td.trails.push_back({{0, 1, 2}, EdgeKind::spatial});
    NeighborLists nbrs = NeighborLists::from_edges(3, {{0, 1}, {1, 2}}, {});
    BinomialNodeData data{{10, 0, 10}, {2, 0, 8}};
    PenaltyConfig pen{0.5, 1.0, 0, 0};
    AdmmOptions fit_opts;
    fit_opts.rel_tol = 1e-9;
    auto map = fit_map(data, 3, td, pen, fit_opts);
    GibbsOptions opts;
    opts.iters = 4000;
    opts.burn_in = 1000;
    opts.seed = 4;
    const auto res = run_chain(data, nbrs, pen, map, opts);
    for (int v = 0; v < 3; ++v) {
        CHECK(res.summary.q05[v] < map[v]);
        CHECK(res.summary.q95[v] > map[v]);
    }
}

TEST_CASE("run_chain: seeds agree within Monte Carlo error") {
    auto g = build_graph({"A", "B"}, {{"A", "B"}}, 3);
    auto nbrs = NeighborLists::from_graph(g);
    std::mt19937_64 rng(31);
    BinomialNodeData data{std::vector<std::int64_t>(6), std::vector<std::int64_t>(6)};
    for (int v = 0; v < 6; ++v) {
        data.attempts[v] = 8 + static_cast<std::int64_t>(rng() % 10);
        data.successes[v] = 2 + static_cast<std::int64_t>(rng() % 5);
    }
    PenaltyConfig pen{0.2, 0.5, 0.1, 0.5};
    auto map = fit_map(data, 6, decompose_trails(g), pen);
    GibbsOptions a;
    a.iters = 6000;
    a.burn_in = 1000;
    a.seed = 1;
    GibbsOptions b = a;
    b.seed = 2;
    const auto ra = run_chain(data, nbrs, pen, map, a);
    const auto rb = run_chain(data, nbrs, pen, map, b);
    for (int v = 0; v < 6; ++v) CHECK(std::abs(ra.summary.post_mean[v] - rb.summary.post_mean[v]) < 0.1);

    // deterministic mode reproduces itself exactly
    const auto ra2 = run_chain(data, nbrs, pen, map, a);
    CHECK(ra.samples.back() == ra2.samples.back());
}

TEST_CASE("run_chain: async block mode lands near the deterministic answer") {
    auto g = build_graph({"A", "B"}, {{"A", "B"}}, 4);
    auto nbrs = NeighborLists::from_graph(g);
    BinomialNodeData data{std::vector<std::int64_t>(8, 12), std::vector<std::int64_t>(8, 0)};
    for (int v = 0; v < 8; ++v) data.successes[v] = 2 + (v % 3);
    PenaltyConfig pen{0.1, 0.8, 0.1, 0.8};
    auto map = fit_map(data, 8, decompose_trails(g), pen);
    GibbsOptions det;
    det.iters = 4000;
    det.burn_in = 1000;
    det.seed = 6;
    GibbsOptions async = det;
    async.threads = 2;
    const auto rd = run_chain(data, nbrs, pen, map, det);
    const auto ra = run_chain(data, nbrs, pen, map, async);
    for (int v = 0; v < 8; ++v)
        CHECK(std::abs(rd.summary.post_mean[v] - ra.summary.post_mean[v]) < 0.1);
}
