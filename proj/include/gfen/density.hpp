#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gfen/tree.hpp"

namespace gfen {

// Per-vertex log-odds for one tree split; the smoothing unit.
using SplitField = std::vector<double>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p);

// Assembled discrete densities: per-vertex leaf masses over the tree's leaf
// intervals. Mass within a leaf is treated as uniform for threshold and
// quantile queries.
class DensityModel {
  public:
    DensityModel(DyadicTree tree, VertexId n_vertices);

    const DyadicTree& tree() const { return tree_; }
    VertexId n_vertices() const { return n_vertices_; }
    double mass(VertexId v, int leaf) const { return mass_[v * tree_.n_leaves() + leaf]; }
    double* vertex_masses(VertexId v) { return mass_.data() + v * tree_.n_leaves(); }
    const double* vertex_masses(VertexId v) const { return mass_.data() + v * tree_.n_leaves(); }

    // P(Y > threshold), straddling leaf apportioned uniformly.
    double tail_probability(VertexId v, double threshold) const;
    // Smallest support value with cumulative mass >= alpha; alpha in (0,1).
    double quantile(VertexId v, double alpha) const;
    double iqr(VertexId v) const;
    // Sum of leaf mass times leaf midpoint.
    double mean(VertexId v) const;
    // Density value at y (mass / leaf width), with y clamped into the support.
    double density_at(VertexId v, double y) const;

    std::string to_csv() const;  // vertex,leaf_lo,leaf_hi,mass
    static DensityModel from_csv(const DyadicTree& tree, const std::string& text);

  private:
    DyadicTree tree_;
    VertexId n_vertices_ = 0;
    std::vector<double> mass_;  // vertex-major
};

// Leaf probabilities from the fitted splitting probabilities: the product
// over the address path of w^{bit} (1-w)^{1-bit} with w = sigmoid(beta).
DensityModel reconstruct_density(const DyadicTree& tree, const std::vector<SplitField>& fields);

}  // namespace gfen
