#include "gfen/density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gfen/csv.hpp"

namespace gfen {

double logit(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("logit: p must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

DensityModel::DensityModel(DyadicTree tree, VertexId n_vertices)
    : tree_(std::move(tree)), n_vertices_(n_vertices) {
    mass_.assign(static_cast<std::size_t>(n_vertices_) * tree_.n_leaves(), 0.0);
}

DensityModel reconstruct_density(const DyadicTree& tree, const std::vector<SplitField>& fields) {
    if (static_cast<int>(fields.size()) != tree.n_splits())
        throw std::invalid_argument("reconstruct_density: one field per split expected");
    const VertexId n = fields.empty() ? 0 : static_cast<VertexId>(fields[0].size());
    for (const auto& f : fields)
        if (static_cast<VertexId>(f.size()) != n)
            throw std::invalid_argument("reconstruct_density: field size mismatch");
    DensityModel model(tree, n);
    const auto& splits = tree.splits();
    if (splits.empty()) {
        for (VertexId v = 0; v < n; ++v) model.vertex_masses(v)[0] = 1.0;
        return model;
    }
    // iterative DFS carrying the accumulated path probability
    struct Item {
        int split;
        double prob;
    };
    for (VertexId v = 0; v < n; ++v) {
        double* out = model.vertex_masses(v);
        std::vector<Item> stack{{0, 1.0}};
        while (!stack.empty()) {
            auto [s, p] = stack.back();
            stack.pop_back();
            const double w = sigmoid(fields[s][v]);
            if (splits[s].left >= 0)
                stack.push_back({splits[s].left, p * w});
            else
                out[tree.leaf_left(s)] = p * w;
            if (splits[s].right >= 0)
                stack.push_back({splits[s].right, p * (1.0 - w)});
            else
                out[tree.leaf_right(s)] = p * (1.0 - w);
        }
    }
    return model;
}

double DensityModel::tail_probability(VertexId v, double threshold) const {
    const auto& leaves = tree_.leaves();
    const double* m = vertex_masses(v);
    double p = 0.0;
    for (int i = 0; i < tree_.n_leaves(); ++i) {
        if (leaves[i].hi <= threshold) continue;
        if (leaves[i].lo >= threshold) {
            p += m[i];
        } else {
            p += m[i] * (leaves[i].hi - threshold) / (leaves[i].hi - leaves[i].lo);
        }
    }
    return p;
}

double DensityModel::quantile(VertexId v, double alpha) const {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("quantile: alpha must lie in (0,1)");
    const auto& leaves = tree_.leaves();
    const double* m = vertex_masses(v);
    double cum = 0.0;
    for (int i = 0; i < tree_.n_leaves(); ++i) {
        if (cum >= alpha) return leaves[i].lo;
        if (cum + m[i] >= alpha && m[i] > 0.0)
            return leaves[i].lo + (alpha - cum) / m[i] * (leaves[i].hi - leaves[i].lo);
        cum += m[i];
    }
    return tree_.support_hi();
}

double DensityModel::iqr(VertexId v) const { return quantile(v, 0.75) - quantile(v, 0.25); }

double DensityModel::mean(VertexId v) const {
    const auto& leaves = tree_.leaves();
    const double* m = vertex_masses(v);
    double s = 0.0;
    for (int i = 0; i < tree_.n_leaves(); ++i) s += m[i] * 0.5 * (leaves[i].lo + leaves[i].hi);
    return s;
}

double DensityModel::density_at(VertexId v, double y) const {
    double yc = y;
    if (yc < tree_.support_lo()) yc = tree_.support_lo();
    const int leaf = tree_.leaf_of(yc);
    const auto& lf = tree_.leaves()[leaf];
    return mass(v, leaf) / (lf.hi - lf.lo);
}

std::string DensityModel::to_csv() const {
    std::ostringstream out;
    out << "vertex,leaf_lo,leaf_hi,mass\n";
    const auto& leaves = tree_.leaves();
    for (VertexId v = 0; v < n_vertices_; ++v)
        for (int i = 0; i < tree_.n_leaves(); ++i)
            out << v << ',' << format_double(leaves[i].lo) << ',' << format_double(leaves[i].hi)
                << ',' << format_double(mass(v, i)) << '\n';
    return out.str();
}

DensityModel DensityModel::from_csv(const DyadicTree& tree, const std::string& text) {
    CsvTable t = parse_csv(text);
    const int cv = t.require_column("vertex");
    const int clo = t.require_column("leaf_lo");
    const int cm = t.require_column("mass");
    VertexId n = 0;
    for (const auto& row : t.rows) n = std::max<VertexId>(n, std::stoll(row[cv]) + 1);
    DensityModel model(tree, n);
    const auto& leaves = tree.leaves();
    for (const auto& row : t.rows) {
        const VertexId v = std::stoll(row[cv]);
        const double lo = std::stod(row[clo]);
        int leaf = -1;
        for (int i = 0; i < tree.n_leaves(); ++i)
            if (std::abs(leaves[i].lo - lo) <= 1e-9 * std::max(1.0, std::abs(lo))) {
                leaf = i;
                break;
            }
        if (leaf < 0) throw std::runtime_error("density csv: leaf does not match the tree");
        model.vertex_masses(v)[leaf] = std::stod(row[cm]);
    }
    return model;
}

}  // namespace gfen
