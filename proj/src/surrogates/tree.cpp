#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <numeric>
#include <queue>

#include "surrscope/core/error.hpp"
#include "surrscope/surrogates/surrogate.hpp"

namespace surrscope {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

// Weighted Gini impurity times node weight: 2 * W1 * W0 / W.
inline double impurity_mass(double w_total, double w_pos) noexcept
{
    return w_total > 0.0 ? 2.0 * w_pos * (w_total - w_pos) / w_total : 0.0;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainingView& data, const FitConfig& cfg) : data_(data), cfg_(cfg), w_(data.y.size(), 1.0)
    {
        if (!data.weights.empty()) {
            if (data.weights.size() != w_.size()) {
                throw InvalidArgument("fit_tree: one weight per sample required");
            }
            std::copy(data.weights.begin(), data.weights.end(), w_.begin());
        }
    }

    TreeSurrogate build()
    {
        std::vector<std::size_t> all(data_.y.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (cfg_.max_leaves) {
            grow_best_first(std::move(all));
        } else {
            grow_depth_first(std::move(all), 0);
        }
        TreeSurrogate tree;
        tree.n_features = data_.X.cols();
        tree.nodes = std::move(nodes_);
        tree.depth = max_depth_seen_;
        tree.n_leaves = leaves_;
        const auto labels = data_.y.values();
        tree.degenerate = std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end();
        return tree;
    }

private:
    struct Candidate {
        int node;
        std::size_t depth;
        std::vector<std::size_t> idx;
        Split split;
    };

    struct CandidateOrder {
        // Largest decrease first; earlier-created node on ties.
        bool operator()(const Candidate& a, const Candidate& b) const
        {
            if (a.split.decrease != b.split.decrease) {
                return a.split.decrease < b.split.decrease;
            }
            return a.node > b.node;
        }
    };

    std::pair<double, double> totals(const std::vector<std::size_t>& idx) const
    {
        double w = 0.0;
        double pos = 0.0;
        for (auto i : idx) {
            w += w_[i];
            pos += data_.y[i] == 1 ? w_[i] : 0.0;
        }
        return {w, pos};
    }

    int make_leaf(const std::vector<std::size_t>& idx, std::size_t depth)
    {
        const auto [w, pos] = totals(idx);
        TreeNode leaf;
        leaf.label = pos > w - pos ? 1 : 0;
        nodes_.push_back(leaf);
        ++leaves_;
        max_depth_seen_ = std::max(max_depth_seen_, depth);
        return static_cast<int>(nodes_.size() - 1);
    }

    bool may_split(const std::vector<std::size_t>& idx, std::size_t depth) const
    {
        if (cfg_.max_depth && depth >= *cfg_.max_depth) {
            return false;
        }
        const auto [w, pos] = totals(idx);
        return pos > 0.0 && pos < w;
    }

    /// Best (feature, threshold) by impurity decrease. Thresholds are
    /// midpoints between consecutive distinct values; ties go to the lowest
    /// feature, then the lowest threshold.
    std::optional<Split> best_split(const std::vector<std::size_t>& idx) const
    {
        const auto [w_total, w_pos] = totals(idx);
        const double parent = impurity_mass(w_total, w_pos);
        const double eps = 1e-12 * w_total;
        std::optional<Split> best;
        std::vector<std::size_t> order(idx);
        for (std::size_t f = 0; f < data_.X.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double xa = data_.X.at(a, f);
                const double xb = data_.X.at(b, f);
                return xa < xb || (xa == xb && a < b);
            });
            double left_w = 0.0;
            double left_pos = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const std::size_t i = order[k];
                left_w += w_[i];
                left_pos += data_.y[i] == 1 ? w_[i] : 0.0;
                const double lo = data_.X.at(i, f);
                const double hi = data_.X.at(order[k + 1], f);
                if (!(lo < hi)) {
                    continue;
                }
                const double decrease = parent - impurity_mass(left_w, left_pos)
                                        - impurity_mass(w_total - left_w, w_pos - left_pos);
                if (!best || decrease > best->decrease + eps) {
                    double thr = lo + (hi - lo) * 0.5;
                    if (!(thr < hi)) {
                        thr = lo;
                    }
                    best = Split{static_cast<int>(f), thr, decrease};
                }
            }
        }
        return best;
    }

    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(const std::vector<std::size_t>& idx,
                                                                            const Split& s) const
    {
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto i : idx) {
            (data_.X.at(i, static_cast<std::size_t>(s.feature)) <= s.threshold ? left : right).push_back(i);
        }
        return {std::move(left), std::move(right)};
    }

    int grow_depth_first(std::vector<std::size_t> idx, std::size_t depth)
    {
        std::optional<Split> split;
        if (may_split(idx, depth)) {
            split = best_split(idx);
        }
        if (!split) {
            return make_leaf(idx, depth);
        }
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{split->feature, split->threshold, -1, -1, 0});
        auto [left, right] = partition(idx, *split);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow_depth_first(std::move(left), depth + 1);
        const int r = grow_depth_first(std::move(right), depth + 1);
        nodes_[static_cast<std::size_t>(self)].left = l;
        nodes_[static_cast<std::size_t>(self)].right = r;
        return self;
    }

    void grow_best_first(std::vector<std::size_t> all)
    {
        std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> frontier;
        const auto enqueue = [&](int node, std::size_t depth, std::vector<std::size_t> idx) {
            if (may_split(idx, depth)) {
                if (auto s = best_split(idx)) {
                    frontier.push(Candidate{node, depth, std::move(idx), *s});
                }
            }
        };
        enqueue(make_leaf(all, 0), 0, all);
        while (!frontier.empty() && leaves_ < *cfg_.max_leaves) {
            Candidate c = frontier.top();
            frontier.pop();
            auto [left, right] = partition(c.idx, c.split);
            auto& node = nodes_[static_cast<std::size_t>(c.node)];
            node.feature = c.split.feature;
            node.threshold = c.split.threshold;
            --leaves_;
            const int l = make_leaf(left, c.depth + 1);
            const int r = make_leaf(right, c.depth + 1);
            nodes_[static_cast<std::size_t>(c.node)].left = l;
            nodes_[static_cast<std::size_t>(c.node)].right = r;
            enqueue(l, c.depth + 1, std::move(left));
            enqueue(r, c.depth + 1, std::move(right));
        }
        // make_leaf tracked the deepest leaf ever created; splits only add
        // deeper leaves, so that is the final depth.
    }

    const TrainingView& data_;
    const FitConfig& cfg_;
    std::vector<double> w_;
    std::vector<TreeNode> nodes_;
    std::size_t leaves_ = 0;
    std::size_t max_depth_seen_ = 0;
};

} // namespace

TreeSurrogate fit_tree(const TrainingView& data, const FitConfig& cfg)
{
    cfg.validate();
    if (data.y.size() == 0) {
        throw InvalidArgument("fit_tree: empty training set");
    }
    if (data.X.rows() != data.y.size()) {
        throw DimensionMismatch("fit_tree: X rows and label count differ");
    }
    return TreeBuilder(data, cfg).build();
}

TreeSurrogate fit_tree(const Neighbourhood& N, const FitConfig& cfg)
{
    return fit_tree(TrainingView::of(N), cfg);
}

void TreeSurrogate::validate() const
{
    if (n_features == 0) {
        throw InvalidArgument("TreeSurrogate: n_features must be positive");
    }
    if (nodes.empty()) {
        throw InvalidArgument("TreeSurrogate: no nodes");
    }
    std::vector<bool> seen(nodes.size(), false);
    std::size_t leaves = 0;
    std::size_t internal = 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        if (id < 0 || static_cast<std::size_t>(id) >= nodes.size() || seen[static_cast<std::size_t>(id)]) {
            throw InvalidArgument("TreeSurrogate: node links do not form a tree");
        }
        seen[static_cast<std::size_t>(id)] = true;
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.is_leaf()) {
            if (node.label > 1) {
                throw InvalidArgument("TreeSurrogate: leaf label must be 0 or 1");
            }
            ++leaves;
            deepest = std::max(deepest, depth);
        } else {
            if (static_cast<std::size_t>(node.feature) >= n_features || !std::isfinite(node.threshold)) {
                throw InvalidArgument("TreeSurrogate: split feature or threshold invalid");
            }
            ++internal;
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw InvalidArgument("TreeSurrogate: unreachable nodes");
    }
    if (leaves != internal + 1 || leaves != n_leaves || deepest != depth) {
        throw InvalidArgument("TreeSurrogate: depth / leaf counts disagree with node array");
    }
}

} // namespace surrscope
