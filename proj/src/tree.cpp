#include "gfen/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace gfen {

DyadicTree::DyadicTree(double support_lo, double support_hi, std::vector<TreeSplit> splits)
    : support_lo_(support_lo), support_hi_(support_hi), splits_(std::move(splits)) {
    if (!(support_lo_ < support_hi_)) throw std::invalid_argument("tree: empty support");
    index_leaves();
}

void DyadicTree::index_leaves() {
    leaves_.clear();
    leaf_left_.assign(splits_.size(), -1);
    leaf_right_.assign(splits_.size(), -1);
    if (splits_.empty()) {
        leaves_.push_back({support_lo_, support_hi_});
        return;
    }
    // in-order walk yields leaves sorted by lo
    struct Walker {
        DyadicTree& t;
        void visit(int s) {
            const TreeSplit& sp = t.splits_[s];
            if (sp.left >= 0) {
                visit(sp.left);
            } else {
                t.leaf_left_[s] = static_cast<int>(t.leaves_.size());
                t.leaves_.push_back({sp.lo, sp.split});
            }
            if (sp.right >= 0) {
                visit(sp.right);
            } else {
                t.leaf_right_[s] = static_cast<int>(t.leaves_.size());
                t.leaves_.push_back({sp.split, sp.hi});
            }
        }
    };
    Walker{*this}.visit(0);
    // sanity: leaves tile the support
    double prev = support_lo_;
    for (const auto& lf : leaves_) {
        if (std::abs(lf.lo - prev) > 1e-9 * std::max(1.0, std::abs(prev)))
            throw std::logic_error("tree: leaves do not tile the support");
        prev = lf.hi;
    }
}

int DyadicTree::leaf_of(double y) const {
    if (y < support_lo_) throw std::out_of_range("tree: value below support");
    if (splits_.empty()) return 0;
    int s = 0;
    while (true) {
        const TreeSplit& sp = splits_[s];
        if (y < sp.split) {
            if (sp.left < 0) return leaf_left_[s];
            s = sp.left;
        } else {
            if (sp.right < 0) return leaf_right_[s];
            s = sp.right;
        }
    }
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (p <= 0) return sorted.front();
    if (p >= 1) return sorted.back();
    const double h = p * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

namespace {

struct TreeBuilder {
    std::vector<TreeSplit> splits;
    int merged = 0;

    // Recursive balanced build over the quantile range (plo, phi); returns the
    // split index or -1 when every candidate in the range is degenerate.
    int build(const std::vector<double>& sorted, std::string address, int level, int max_level,
              double plo, double phi, double vlo, double vhi) {
        if (level > max_level) return -1;
        const double pmid = 0.5 * (plo + phi);
        const double c = sorted_quantile(sorted, pmid);
        if (!(c > vlo) || !(c < vhi)) {
            // degenerate quantile: merge with the side that retains extent
            ++merged;
            int child;
            if (!(c > vlo))
                child = build(sorted, address, level, max_level, pmid, phi, vlo, vhi);
            else
                child = build(sorted, address, level, max_level, plo, pmid, vlo, vhi);
            return child;
        }
        const int self = static_cast<int>(splits.size());
        splits.push_back({address, level, vlo, vhi, c, -1, -1});
        const int left = build(sorted, address + "0", level + 1, max_level, plo, pmid, vlo, c);
        const int right = build(sorted, address + "1", level + 1, max_level, pmid, phi, c, vhi);
        splits[self].left = left;
        splits[self].right = right;
        return self;
    }
};

}  // namespace

DyadicTree build_balanced_tree(std::vector<double> pooled_samples, int depth,
                               double support_lo, double support_hi) {
    if (pooled_samples.empty()) throw std::invalid_argument("build tree: empty sample");
    if (depth < 1) throw std::invalid_argument("build tree: depth must be >= 1");
    if (!(support_lo < support_hi)) throw std::invalid_argument("build tree: empty support");
    std::sort(pooled_samples.begin(), pooled_samples.end());
    TreeBuilder b;
    int root = b.build(pooled_samples, "", 1, depth, 0.0, 1.0, support_lo, support_hi);
    if (root != 0 && root != -1) throw std::logic_error("build tree: root index");
    DyadicTree t(support_lo, support_hi, std::move(b.splits));
    t.set_merged_splits(b.merged);
    return t;
}

DyadicTree build_quantile_tree(std::vector<double> pooled_samples, int depth, double tail_cap) {
    if (pooled_samples.empty()) throw std::invalid_argument("build tree: empty sample");
    if (depth < 1) throw std::invalid_argument("build tree: depth must be >= 1");
    std::sort(pooled_samples.begin(), pooled_samples.end());
    const double vmin = pooled_samples.front();
    const double vmax = pooled_samples.back();
    if (!(vmin < vmax)) throw std::invalid_argument("build tree: constant sample");

    const double p_edge = std::ldexp(1.0, -depth);  // 1/2^depth
    const double q_left = sorted_quantile(pooled_samples, p_edge);
    const double q_right = sorted_quantile(pooled_samples, 1.0 - p_edge);
    if (!(tail_cap > q_right))
        throw std::invalid_argument("build tree: tail_cap must exceed the upper tail quantile");

    TreeBuilder b;
    b.build(pooled_samples, "", 1, depth, 0.0, 1.0, vmin, vmax);
    int merged = b.merged;
    auto splits = std::move(b.splits);

    // locate the current leftmost and rightmost leaf parents
    auto attach = [&](bool right_side, double cut, int level) -> bool {
        // walk to the extreme leaf
        if (splits.empty()) return false;
        int s = 0;
        while ((right_side ? splits[s].right : splits[s].left) >= 0)
            s = right_side ? splits[s].right : splits[s].left;
        const double lo = right_side ? splits[s].split : splits[s].lo;
        const double hi = right_side ? splits[s].hi : splits[s].split;
        if (!(cut > lo) || !(cut < hi)) return false;
        const int idx = static_cast<int>(splits.size());
        const std::string addr = splits[s].address + (right_side ? "1" : "0");
        splits.push_back({addr, level, lo, hi, cut, -1, -1});
        (right_side ? splits[s].right : splits[s].left) = idx;
        return true;
    };

    // left tail: one split halfway between the minimum and q_{1/2^d}
    if (!attach(false, 0.5 * (vmin + q_left), depth + 1)) ++merged;

    // right tail: interior points of 7 uniformly spaced values on
    // [q_{1-1/2^d}, tail_cap]; each split chains into the previous right child
    for (int i = 1; i <= 5; ++i) {
        const double x = q_right + (tail_cap - q_right) * (static_cast<double>(i) / 6.0);
        if (!attach(true, x, depth + i)) ++merged;
    }

    DyadicTree t(vmin, vmax, std::move(splits));
    t.set_merged_splits(merged);
    return t;
}

std::int64_t SplitCounts::total_points() const {
    if (attempts.empty()) return 0;
    std::int64_t n = 0;
    for (auto a : attempts[0]) n += a;
    return n;
}

SplitCounts bin_observations(const DyadicTree& tree, VertexId n_vertices,
                             const std::vector<std::vector<double>>& observations) {
    if (static_cast<VertexId>(observations.size()) != n_vertices)
        throw std::invalid_argument("bin_observations: one observation list per vertex expected");
    SplitCounts c;
    c.n_vertices = n_vertices;
    const int ns = tree.n_splits();
    c.attempts.assign(ns, std::vector<std::int64_t>(n_vertices, 0));
    c.successes.assign(ns, std::vector<std::int64_t>(n_vertices, 0));
    const auto& splits = tree.splits();
    for (VertexId v = 0; v < n_vertices; ++v) {
        for (std::size_t i = 0; i < observations[v].size(); ++i) {
            const double y = observations[v][i];
            if (!(y >= tree.support_lo()))
                throw std::out_of_range("bin_observations: value below support at vertex " +
                                        std::to_string(v) + " index " + std::to_string(i));
            if (y >= tree.support_hi()) ++c.clamped;
            int s = 0;
            while (s >= 0 && ns > 0) {
                c.attempts[s][v] += 1;
                if (y < splits[s].split) {
                    c.successes[s][v] += 1;
                    s = splits[s].left;
                } else {
                    s = splits[s].right;
                }
            }
        }
    }
    return c;
}

std::string DyadicTree::to_json() const {
    nlohmann::json j;
    j["support"] = {support_lo_, support_hi_};
    j["merged_splits"] = merged_;
    auto& arr = j["splits"] = nlohmann::json::array();
    for (const auto& s : splits_) {
        arr.push_back({{"address", s.address},
                       {"level", s.level},
                       {"lo", s.lo},
                       {"hi", s.hi},
                       {"split", s.split},
                       {"left", s.left},
                       {"right", s.right}});
    }
    return j.dump(2);
}

DyadicTree DyadicTree::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<TreeSplit> splits;
    for (const auto& s : j.at("splits")) {
        splits.push_back({s.at("address").get<std::string>(), s.at("level").get<int>(),
                          s.at("lo").get<double>(), s.at("hi").get<double>(),
                          s.at("split").get<double>(), s.at("left").get<int>(),
                          s.at("right").get<int>()});
    }
    DyadicTree t(j.at("support")[0].get<double>(), j.at("support")[1].get<double>(), std::move(splits));
    t.set_merged_splits(j.value("merged_splits", 0));
    return t;
}

}  // namespace gfen
