#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfen/graph.hpp"

namespace gfen {

// Trip-level record. Timestamps are civil local seconds (no timezone
// arithmetic is applied; inputs are expected in the dataset's local time).
struct TripRecord {
    std::string driver;
    std::int64_t dispatch_ts = 0;  // trip assigned to the driver
    std::int64_t pickup_ts = 0;    // trip starts
    std::int64_t end_ts = 0;       // trip completed
    std::string pickup_taz;
    std::string dropoff_taz;
    double fare = 0;  // pre-normalized to the standard tariff
};

struct ProductivityObservation {
    std::string taz;    // dropoff TAZ of the leading trip
    int hour_of_week;   // 0..167, week starts at midnight Sunday
    double productivity;  // $/hour
};

struct IngestStats {
    std::int64_t trips_in = 0;
    std::int64_t pairs = 0;
    std::int64_t emitted = 0;
    std::int64_t dropped_idle = 0;       // waiting time >= 1 hour (session break)
    std::int64_t rejected_negative = 0;  // negative durations
    std::int64_t rejected_nonpositive_productivity = 0;
    std::int64_t dropped_taz = 0;        // TAZ absent from the graph (binning)
    std::int64_t filtered_window = 0;    // outside the analysis date range
};

// "YYYY-MM-DD HH:MM:SS" (or with 'T') to civil seconds since 1970-01-01.
std::int64_t parse_timestamp(const std::string& text);
int hour_of_week(std::int64_t civil_seconds);  // Sunday 00:00 -> 0

// Consecutive same-driver trip pairs: idle w = next dispatch - current end,
// reach r = next pickup - next dispatch, duration d = next end - next pickup,
// productivity = next fare / (w + r + d), assigned to the current trip's
// dropoff TAZ at its end hour. Pairs with w >= 1h are session breaks.
std::vector<ProductivityObservation> compute_productivity(std::vector<TripRecord> trips,
                                                          IngestStats& stats,
                                                          std::optional<std::int64_t> window_from = {},
                                                          std::optional<std::int64_t> window_to = {});

// Per-vertex observation lists over the graph; observations in dropped or
// unknown TAZs are excluded and counted.
std::vector<std::vector<double>> bin_to_graph(const std::vector<ProductivityObservation>& obs,
                                              const SpatioTemporalGraph& graph, IngestStats& stats);

// Column mapping for trip CSV exports; values name the columns in the file.
struct TripColumns {
    std::string driver = "driver_id";
    std::string dispatch = "dispatched_on";
    std::string pickup = "started_on";
    std::string end = "completed_on";
    std::string pickup_taz = "start_taz";
    std::string dropoff_taz = "end_taz";
    std::string fare = "fare";
};

std::vector<TripRecord> read_trips_csv(const std::string& path, const TripColumns& columns);

}  // namespace gfen
