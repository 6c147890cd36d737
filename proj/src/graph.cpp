#include "gfen/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace gfen {

int SpatioTemporalGraph::location_index(const std::string& id) const {
    auto it = std::find(locations.begin(), locations.end(), id);
    return it == locations.end() ? -1 : static_cast<int>(it - locations.begin());
}

std::size_t TrailDecomposition::total_slots() const {
    std::size_t n = 0;
    for (const auto& t : trails) n += t.vertices.size();
    return n;
}

SpatioTemporalGraph build_graph(const std::vector<std::string>& locations,
                                const std::vector<std::pair<std::string, std::string>>& spatial_adjacency,
                                int times) {
    if (times < 2) throw std::invalid_argument("build_graph: times must be >= 2");
    if (locations.empty()) throw std::invalid_argument("build_graph: no locations");

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (!index.emplace(locations[i], static_cast<int>(i)).second)
            throw std::invalid_argument("build_graph: duplicate location id " + locations[i]);
    }

    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> adj;  // over original location indices
    for (const auto& [a, b] : spatial_adjacency) {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end())
            throw std::invalid_argument("build_graph: adjacency references unknown location " +
                                        (ia == index.end() ? a : b));
        int u = ia->second, v = ib->second;
        if (u == v) throw std::invalid_argument("build_graph: self-loop at " + a);
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second)
            throw std::invalid_argument("build_graph: duplicate adjacency pair " + a + "," + b);
        adj.emplace_back(u, v);
    }

    // Largest connected component of the location adjacency. Temporal cycles
    // never join distinct locations, so graph connectivity reduces to this.
    const int n = static_cast<int>(locations.size());
    std::vector<std::vector<int>> nbrs(n);
    for (auto [u, v] : adj) {
        nbrs[u].push_back(v);
        nbrs[v].push_back(u);
    }
    std::vector<int> comp(n, -1);
    int n_comp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = n_comp;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : nbrs[u])
                if (comp[v] < 0) {
                    comp[v] = n_comp;
                    stack.push_back(v);
                }
        }
        ++n_comp;
    }
    std::vector<int> comp_size(n_comp, 0);
    for (int s = 0; s < n; ++s) ++comp_size[comp[s]];
    // ties broken toward the component appearing first in the input
    int best = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());

    SpatioTemporalGraph g;
    g.times = times;
    std::vector<int> remap(n, -1);
    for (int s = 0; s < n; ++s) {
        if (comp[s] == best) {
            remap[s] = static_cast<int>(g.locations.size());
            g.locations.push_back(locations[s]);
        } else {
            g.dropped.push_back(locations[s]);
        }
    }
    for (auto [u, v] : adj)
        if (remap[u] >= 0 && remap[v] >= 0) g.location_adjacency.emplace_back(remap[u], remap[v]);

    // Spatial edges replicated per time slice, slice-major so each slice's
    // edges are contiguous; temporal cycles per location.
    for (int t = 0; t < times; ++t)
        for (auto [u, v] : g.location_adjacency)
            g.spatial_edges.emplace_back(g.vertex(u, t), g.vertex(v, t));
    for (int s = 0; s < static_cast<int>(g.locations.size()); ++s)
        for (int t = 0; t < times; ++t)
            g.temporal_edges.emplace_back(g.vertex(s, t), g.vertex(s, (t + 1) % times));
    return g;
}

std::vector<std::vector<VertexId>> greedy_trail_cover(const std::vector<Edge>& edges) {
    std::map<VertexId, std::vector<std::size_t>> incident;  // vertex -> edge indices, ascending
    for (std::size_t i = 0; i < edges.size(); ++i) {
        incident[edges[i].first].push_back(i);
        incident[edges[i].second].push_back(i);
    }
    std::vector<bool> used(edges.size(), false);
    auto next_unused = [&](VertexId at) -> std::size_t {
        auto it = incident.find(at);
        if (it != incident.end())
            for (std::size_t e : it->second)
                if (!used[e]) return e;
        return edges.size();
    };

    std::vector<std::vector<VertexId>> trails;
    for (std::size_t seed = 0; seed < edges.size(); ++seed) {
        if (used[seed]) continue;
        used[seed] = true;
        std::vector<VertexId> trail{edges[seed].first, edges[seed].second};
        for (std::size_t e = next_unused(trail.back()); e < edges.size(); e = next_unused(trail.back())) {
            used[e] = true;
            trail.push_back(edges[e].first == trail.back() ? edges[e].second : edges[e].first);
        }
        std::reverse(trail.begin(), trail.end());
        for (std::size_t e = next_unused(trail.back()); e < edges.size(); e = next_unused(trail.back())) {
            used[e] = true;
            trail.push_back(edges[e].first == trail.back() ? edges[e].second : edges[e].first);
        }
        std::reverse(trail.begin(), trail.end());
        trails.push_back(std::move(trail));
    }
    return trails;
}

TrailDecomposition decompose_trails(const SpatioTemporalGraph& graph) {
    TrailDecomposition out;
    const int T = graph.times;
    const std::size_t per_slice = graph.location_adjacency.size();
    for (int t = 0; t < T; ++t) {
        std::vector<Edge> slice(graph.spatial_edges.begin() + t * per_slice,
                                graph.spatial_edges.begin() + (t + 1) * per_slice);
        for (auto& tr : greedy_trail_cover(slice))
            out.trails.push_back({std::move(tr), EdgeKind::spatial});
    }
    for (int s = 0; s < static_cast<int>(graph.locations.size()); ++s) {
        Trail tr;
        tr.kind = EdgeKind::temporal;
        tr.vertices.reserve(T + 1);
        for (int t = 0; t < T; ++t) tr.vertices.push_back(graph.vertex(s, t));
        tr.vertices.push_back(graph.vertex(s, 0));  // wrap edge last
        out.trails.push_back(std::move(tr));
    }
    return out;
}

std::string graph_to_json(const SpatioTemporalGraph& graph) {
    nlohmann::json j;
    j["locations"] = graph.locations;
    j["dropped"] = graph.dropped;
    j["times"] = graph.times;
    j["vertex_index"] = "location_index * times + t";
    j["location_adjacency"] = graph.location_adjacency;
    j["spatial_edges"] = graph.spatial_edges;
    j["temporal_edges"] = graph.temporal_edges;
    return j.dump();
}

SpatioTemporalGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SpatioTemporalGraph g;
    g.locations = j.at("locations").get<std::vector<std::string>>();
    g.dropped = j.value("dropped", std::vector<std::string>{});
    g.times = j.at("times").get<int>();
    g.location_adjacency = j.at("location_adjacency").get<std::vector<std::pair<int, int>>>();
    g.spatial_edges = j.at("spatial_edges").get<std::vector<Edge>>();
    g.temporal_edges = j.at("temporal_edges").get<std::vector<Edge>>();
    return g;
}

}  // namespace gfen
