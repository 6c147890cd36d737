#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "gfen/graph.hpp"
#include "gfen/ingest.hpp"

using namespace gfen;

namespace {

// trips built from a base instant with offsets in minutes
TripRecord trip(const std::string& driver, std::int64_t base, int dispatch_min, int pickup_min,
                int end_min, const std::string& from, const std::string& to, double fare) {
    TripRecord r;
    r.driver = driver;
    r.dispatch_ts = base + dispatch_min * 60;
    r.pickup_ts = base + pickup_min * 60;
    r.end_ts = base + end_min * 60;
    r.pickup_taz = from;
    r.dropoff_taz = to;
    r.fare = fare;
    return r;
}

}  // namespace

TEST_CASE("timestamp parsing and hour-of-week") {
    // 2016-09-05 was a Monday
    const auto monday_0030 = parse_timestamp("2016-09-05 00:30:00");
    CHECK(hour_of_week(monday_0030) == 24);
    const auto sunday_0000 = parse_timestamp("2016-09-04T00:00:00");
    CHECK(hour_of_week(sunday_0000) == 0);
    const auto saturday_2359 = parse_timestamp("2016-09-10 23:59:59");
    CHECK(hour_of_week(saturday_2359) == 167);
    CHECK_THROWS(parse_timestamp("2016/09/05 00:30:00"));
    CHECK_THROWS(parse_timestamp("2016-13-05 00:30:00"));
}

TEST_CASE("productivity formula on a hand-built pair") {
    const auto base = parse_timestamp("2016-09-05 10:00:00");
    std::vector<TripRecord> trips{
        trip("d1", base, -30, -25, 0, "A", "B", 10.0),
        // idle 15 min, reach 15 min, duration 30 min -> denominator is 1 hour
        trip("d1", base, 15, 30, 60, "B", "C", 20.0),
    };
    IngestStats stats;
    const auto obs = compute_productivity(trips, stats);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].productivity == doctest::Approx(20.0));
    CHECK(obs[0].taz == "B");  // the leading trip's dropoff
    CHECK(obs[0].hour_of_week == hour_of_week(base));
    CHECK(stats.pairs == 1);
    CHECK(stats.emitted == 1);
}

TEST_CASE("idle-hour filter and session accounting") {
    const auto base = parse_timestamp("2016-09-05 08:00:00");
    std::vector<TripRecord> trips{
        trip("d1", base, -40, -35, 0, "A", "B", 8.0),
        trip("d1", base, 20, 25, 50, "B", "C", 9.0),     // kept: idle 20 min
        trip("d1", base, 140, 150, 170, "C", "A", 7.0),  // idle 90 min: break
        trip("d1", base, 185, 190, 200, "A", "B", 6.0),  // kept: idle 15 min
        trip("d2", base, 0, 5, 30, "B", "B", 5.0),       // single-trip driver
    };
    IngestStats stats;
    const auto obs = compute_productivity(trips, stats);
    CHECK(obs.size() == 2);
    CHECK(stats.dropped_idle == 1);
    CHECK(stats.pairs == 3);
    // sessions of sizes {2, 1} and {1}: emitted = sum of (size - 1)
    CHECK(stats.emitted == 2);
}

TEST_CASE("exactly one hour of idle time is a break") {
    const auto base = parse_timestamp("2016-09-05 08:00:00");
    std::vector<TripRecord> trips{
        trip("d1", base, -10, -5, 0, "A", "B", 8.0),
        trip("d1", base, 60, 65, 90, "B", "C", 9.0),  // idle exactly 1h
    };
    IngestStats stats;
    CHECK(compute_productivity(trips, stats).empty());
    CHECK(stats.dropped_idle == 1);
}

TEST_CASE("negative durations are rejected with diagnostics") {
    const auto base = parse_timestamp("2016-09-05 08:00:00");
    std::vector<TripRecord> trips{
        trip("d1", base, -10, -5, 0, "A", "B", 8.0),
        trip("d1", base, 10, 8, 40, "B", "C", 9.0),  // pickup before dispatch
    };
    IngestStats stats;
    CHECK(compute_productivity(trips, stats).empty());
    CHECK(stats.rejected_negative == 1);
}

TEST_CASE("time-unit scaling scales productivity exactly") {
    const auto base = parse_timestamp("2016-09-05 08:00:00");
    auto run = [&](int scale) {
        std::vector<TripRecord> trips{
            trip("d1", base, -10 * scale, -5 * scale, 0, "A", "B", 8.0),
            trip("d1", base, 5 * scale, 9 * scale, 30 * scale, "B", "C", 21.0),
        };
        IngestStats stats;
        const auto obs = compute_productivity(trips, stats);
        REQUIRE(obs.size() == 1);
        return obs[0].productivity;
    };
    CHECK(run(1) == doctest::Approx(2.0 * run(2)).epsilon(1e-12));
}

TEST_CASE("analysis window filters by trip end") {
    const auto base = parse_timestamp("2016-08-31 23:00:00");
    std::vector<TripRecord> trips{
        trip("d1", base, -10, -5, 0, "A", "B", 8.0),                 // ends Aug 31
        trip("d1", base, 30, 35, 120, "B", "C", 9.0),                // ends Sep 1
        trip("d1", base, 150, 160, 200, "C", "A", 7.0),
    };
    IngestStats stats;
    const auto obs = compute_productivity(trips, stats, parse_timestamp("2016-09-01 00:00:00"), {});
    // first trip filtered; remaining pair emits one observation
    CHECK(stats.filtered_window == 1);
    CHECK(obs.size() == 1);
}

TEST_CASE("binning lands in the right vertex and counts dropped TAZs") {
    auto g = build_graph({"A", "B"}, {{"A", "B"}}, 168);
    IngestStats stats;
    std::vector<ProductivityObservation> obs{
        {"A", 24, 18.0}, {"B", 0, 22.0}, {"Z", 5, 30.0},  // unknown TAZ
    };
    const auto per_vertex = bin_to_graph(obs, g, stats);
    CHECK(stats.dropped_taz == 1);
    CHECK(per_vertex[g.vertex(0, 24)] == std::vector<double>{18.0});
    CHECK(per_vertex[g.vertex(1, 0)] == std::vector<double>{22.0});
    std::size_t total = 0;
    for (const auto& v : per_vertex) total += v.size();
    CHECK(total == 2);
}

TEST_CASE("empty input still produces an all-missing binning") {
    auto g = build_graph({"A"}, {}, 24);
    IngestStats stats;
    const auto per_vertex = bin_to_graph({}, g, stats);
    for (const auto& v : per_vertex) CHECK(v.empty());
}
