#include "gfen/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gfen/csv.hpp"

namespace gfen {

namespace {

// days since 1970-01-01 from a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    int y, mo, d, h, mi, s;
    char sep;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7 ||
        (sep != ' ' && sep != 'T'))
        throw std::invalid_argument("bad timestamp: " + text);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60)
        throw std::invalid_argument("bad timestamp fields: " + text);
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

int hour_of_week(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    // 1970-01-01 was a Thursday; week starts at midnight Sunday
    const int dow = static_cast<int>(((days % 7) + 7 + 4) % 7);
    return dow * 24 + static_cast<int>(rem / 3600);
}

std::vector<ProductivityObservation> compute_productivity(std::vector<TripRecord> trips,
                                                          IngestStats& stats,
                                                          std::optional<std::int64_t> window_from,
                                                          std::optional<std::int64_t> window_to) {
    stats.trips_in += static_cast<std::int64_t>(trips.size());
    if (window_from || window_to) {
        auto outside = [&](const TripRecord& t) {
            if (window_from && t.end_ts < *window_from) return true;
            if (window_to && t.end_ts >= *window_to) return true;
            return false;
        };
        stats.filtered_window += std::count_if(trips.begin(), trips.end(), outside);
        trips.erase(std::remove_if(trips.begin(), trips.end(), outside), trips.end());
    }
    std::stable_sort(trips.begin(), trips.end(), [](const TripRecord& a, const TripRecord& b) {
        return a.driver != b.driver ? a.driver < b.driver : a.end_ts < b.end_ts;
    });

    std::vector<ProductivityObservation> out;
    for (std::size_t i = 0; i + 1 < trips.size(); ++i) {
        const TripRecord& cur = trips[i];
        const TripRecord& nxt = trips[i + 1];
        if (cur.driver != nxt.driver) continue;  // last trip of a driver
        ++stats.pairs;
        const double idle = static_cast<double>(nxt.dispatch_ts - cur.end_ts) / 3600.0;
        const double reach = static_cast<double>(nxt.pickup_ts - nxt.dispatch_ts) / 3600.0;
        const double duration = static_cast<double>(nxt.end_ts - nxt.pickup_ts) / 3600.0;
        if (idle < 0 || reach < 0 || duration < 0) {
            ++stats.rejected_negative;
            continue;
        }
        if (idle >= 1.0) {
            ++stats.dropped_idle;  // the driver took a break; session ends here
            continue;
        }
        const double denom = idle + reach + duration;
        const double pi = nxt.fare / denom;
        if (!(denom > 0) || !(pi > 0) || !std::isfinite(pi)) {
            ++stats.rejected_nonpositive_productivity;
            continue;
        }
        out.push_back({cur.dropoff_taz, hour_of_week(cur.end_ts), pi});
        ++stats.emitted;
    }
    return out;
}

std::vector<std::vector<double>> bin_to_graph(const std::vector<ProductivityObservation>& obs,
                                              const SpatioTemporalGraph& graph, IngestStats& stats) {
    std::vector<std::vector<double>> per_vertex(graph.n_vertices());
    for (const auto& o : obs) {
        const int loc = graph.location_index(o.taz);
        if (loc < 0) {
            ++stats.dropped_taz;
            continue;
        }
        if (o.hour_of_week < 0 || o.hour_of_week >= graph.times)
            throw std::out_of_range("bin_to_graph: hour index outside the cycle");
        per_vertex[graph.vertex(loc, o.hour_of_week)].push_back(o.productivity);
    }
    return per_vertex;
}

std::vector<TripRecord> read_trips_csv(const std::string& path, const TripColumns& columns) {
    const CsvTable t = read_csv(path);
    const int c_driver = t.require_column(columns.driver);
    const int c_dispatch = t.require_column(columns.dispatch);
    const int c_pickup = t.require_column(columns.pickup);
    const int c_end = t.require_column(columns.end);
    const int c_ptaz = t.column(columns.pickup_taz);  // optional
    const int c_dtaz = t.require_column(columns.dropoff_taz);
    const int c_fare = t.require_column(columns.fare);
    std::vector<TripRecord> trips;
    trips.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        TripRecord r;
        r.driver = row[c_driver];
        r.dispatch_ts = parse_timestamp(row[c_dispatch]);
        r.pickup_ts = parse_timestamp(row[c_pickup]);
        r.end_ts = parse_timestamp(row[c_end]);
        if (c_ptaz >= 0) r.pickup_taz = row[c_ptaz];
        r.dropoff_taz = row[c_dtaz];
        r.fare = std::stod(row[c_fare]);
        if (r.fare < 0) throw std::invalid_argument("read_trips_csv: negative fare");
        trips.push_back(std::move(r));
    }
    return trips;
}

}  // namespace gfen
