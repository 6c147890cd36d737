#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gfen {

using VertexId = std::int64_t;
using Edge = std::pair<VertexId, VertexId>;

enum class EdgeKind { spatial, temporal };

// Vertex set S x T: locations crossed with hour-of-cycle slots. Vertex index
// is loc_index * times + t, so each location's weekly cycle is contiguous.
// Spatial edges replicate the location adjacency inside every time slice;
// temporal edges join consecutive hours of the same location, with a wrap
// edge (t = times-1 -> t = 0) closing the cycle.
struct SpatioTemporalGraph {
    std::vector<std::string> locations;   // kept locations, in input order
    std::vector<std::string> dropped;     // locations outside the largest component
    int times = 0;
    std::vector<Edge> spatial_edges;
    std::vector<Edge> temporal_edges;
    // location adjacency over kept-location indices, one entry per pair
    std::vector<std::pair<int, int>> location_adjacency;

    VertexId n_vertices() const {
        return static_cast<VertexId>(locations.size()) * times;
    }
    VertexId vertex(int loc_index, int t) const {
        return static_cast<VertexId>(loc_index) * times + t;
    }
    int loc_of(VertexId v) const { return static_cast<int>(v / times); }
    int time_of(VertexId v) const { return static_cast<int>(v % times); }

    int location_index(const std::string& id) const;  // -1 if absent/dropped
};

// Edge-disjoint cover of the graph edges by walks. Each trail is a vertex
// sequence whose consecutive pairs are edges; a trail never mixes edge kinds.
// Cyclic temporal trails are opened at the lowest-index vertex, so the first
// vertex repeats at the end and the wrap edge is the trail's last edge.
struct Trail {
    std::vector<VertexId> vertices;
    EdgeKind kind = EdgeKind::spatial;
};

struct TrailDecomposition {
    std::vector<Trail> trails;
    std::size_t total_slots() const;
};

// times >= 2. Self-loops and duplicate adjacency pairs (in either order) are
// rejected. Locations not in the largest connected component of the
// adjacency are dropped and listed in `dropped`.
SpatioTemporalGraph build_graph(const std::vector<std::string>& locations,
                                const std::vector<std::pair<std::string, std::string>>& spatial_adjacency,
                                int times);

TrailDecomposition decompose_trails(const SpatioTemporalGraph& graph);

// Greedy edge-disjoint trail cover of an arbitrary edge list: seed a trail at
// the lowest-index unused edge, extend both ends with the lowest-index unused
// incident edge until stuck. Used per time slice for the spatial trails.
std::vector<std::vector<VertexId>> greedy_trail_cover(const std::vector<Edge>& edges);

std::string graph_to_json(const SpatioTemporalGraph& graph);
SpatioTemporalGraph graph_from_json(const std::string& text);

}  // namespace gfen
