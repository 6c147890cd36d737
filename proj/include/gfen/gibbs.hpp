#pragma once

#include <cstdint>
#include <vector>

#include "gfen/admm.hpp"
#include "gfen/ars.hpp"
#include "gfen/density.hpp"
#include "gfen/graph.hpp"

namespace gfen {

// Per-vertex neighbor lists split by edge kind.
struct NeighborLists {
    std::vector<std::vector<VertexId>> spatial;
    std::vector<std::vector<VertexId>> temporal;

    VertexId n_vertices() const { return static_cast<VertexId>(spatial.size()); }
    static NeighborLists from_graph(const SpatioTemporalGraph& graph);
    static NeighborLists from_edges(VertexId n, const std::vector<Edge>& spatial_edges,
                                    const std::vector<Edge>& temporal_edges);
};

// Unnormalized Gibbs conditional of one vertex's log-odds given its
// neighbors:
//   s*log(w) + (m-s)*log(1-w)
//     - sum_d lambda_{d,1} sum_{u in N_d} |b - beta_u|
//     - sum_d (lambda_{d,2}/2) sum_{u in N_d} (b - beta_u)^2
// Log-concave always; strictly so when the vertex has data or an l2 penalty
// is active.
struct GibbsConditional {
    double m = 0, s = 0;
    double l_s1 = 0, l_s2 = 0, l_t1 = 0, l_t2 = 0;
    std::vector<double> spatial_neighbors;
    std::vector<double> temporal_neighbors;

    double logdens(double b) const;
    double dlogdens(double b) const;
    // Upper bound on the second derivative (always negative under the
    // preconditions): -m w (1-w) - sum_d |N_d| lambda_{d,2}.
    double curvature_bound() const;
    bool proper() const;
};

GibbsConditional conditional_logdensity(VertexId v, const std::vector<double>& beta,
                                        const NeighborLists& nbrs, const BinomialNodeData& data,
                                        const PenaltyConfig& penalties);

struct GibbsOptions {
    int iters = 5000;
    int burn_in = 4000;
    std::uint64_t seed = 0;
    double init_perturb = 1.0;  // initial ARS bracket beyond neighbor extremes
    int threads = 1;            // >1 switches to asynchronous block updates
    int thin = 1;               // keep every thin-th post-burn-in sweep
    ArsOptions ars;
};

struct GibbsSummary {
    std::vector<double> post_mean;
    std::vector<double> q05;
    std::vector<double> q95;
};

struct GibbsResult {
    std::vector<SplitField> samples;  // retained post-burn-in fields
    GibbsSummary summary;
};

// Systematic-sweep Gibbs sampler started from the MAP field. The default
// deterministic mode updates vertices in index order; threads > 1 runs
// vertex blocks concurrently with relaxed neighbor reads (each beta value is
// read and written atomically, so no torn values).
GibbsResult run_chain(const BinomialNodeData& data, const NeighborLists& nbrs,
                      const PenaltyConfig& penalties, const SplitField& map_init,
                      const GibbsOptions& opts);

}  // namespace gfen
