#include "datasuite/regression_tree.hpp"

#include <algorithm>
#include <numeric>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "conformal";

struct Builder {
    const Matrix& x;
    std::span<const double> y;
    const TreeParams& params;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> order;  // scratch

    std::int32_t build(std::vector<std::size_t>& idx, std::size_t depth) {
        const std::size_t m = idx.size();
        double sum = 0.0, sq = 0.0;
        for (auto i : idx) {
            sum += y[i];
            sq += y[i] * y[i];
        }
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(TreeNode{});
        nodes[id].value = sum / static_cast<double>(m);
        nodes[id].samples = m;

        const double sse = sq - sum * sum / static_cast<double>(m);
        const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
        if (!depth_ok || m < params.min_samples_split || m < 2 * params.min_samples_leaf ||
            sse <= 1e-12 * std::max(1.0, sq))
            return id;

        double best_score = sum * sum / static_cast<double>(m);
        int best_feature = -1;
        double best_threshold = 0.0;
        const auto d = static_cast<std::size_t>(x.cols());
        for (std::size_t f = 0; f < d; ++f) {
            order = idx;
            const auto fe = static_cast<Eigen::Index>(f);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x(static_cast<Eigen::Index>(a), fe) < x(static_cast<Eigen::Index>(b), fe);
            });
            double left = 0.0;
            for (std::size_t p = 1; p < m; ++p) {
                left += y[order[p - 1]];
                if (p < params.min_samples_leaf || m - p < params.min_samples_leaf) continue;
                const double xa = x(static_cast<Eigen::Index>(order[p - 1]), fe);
                const double xb = x(static_cast<Eigen::Index>(order[p]), fe);
                if (!(xa < xb)) continue;
                const double right = sum - left;
                const double score = left * left / static_cast<double>(p) + right * right / static_cast<double>(m - p);
                if (score > best_score + 1e-12 * std::abs(best_score)) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = xa + 0.5 * (xb - xa);
                    if (!(best_threshold < xb)) best_threshold = xa;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> li, ri;
        const auto bf = static_cast<Eigen::Index>(best_feature);
        for (auto i : idx) (x(static_cast<Eigen::Index>(i), bf) <= best_threshold ? li : ri).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        const auto l = build(li, depth + 1);
        const auto r = build(ri, depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

}  // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    const auto n = static_cast<std::int32_t>(nodes_.size());
    for (const auto& node : nodes_)
        if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n))
            throw DataError(kModule, "malformed regression tree");
}

RegressionTree RegressionTree::fit(const Matrix& x, std::span<const double> y, const TreeParams& params) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw UsageError(kModule, "tree inputs differ in length");
    if (y.empty() || y.size() < params.min_samples_leaf)
        throw DataError(kModule, "regression tree needs at least min_samples_leaf (" +
                                     std::to_string(params.min_samples_leaf) + ") samples, got " +
                                     std::to_string(y.size()));
    Builder b{x, y, params, {}, {}};
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), 0);
    b.build(idx, 0);
    RegressionTree t;
    t.nodes_ = std::move(b.nodes);
    return t;
}

double RegressionTree::predict(std::span<const double> row) const {
    if (nodes_.empty()) throw UsageError(kModule, "regression tree is not fitted");
    std::size_t k = 0;
    while (!nodes_[k].is_leaf()) {
        const auto& nd = nodes_[k];
        k = static_cast<std::size_t>(row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
    return nodes_[k].value;
}

Vector RegressionTree::predict(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        out(i) = predict(std::span<const double>(x.row(i).data(), static_cast<std::size_t>(x.cols())));
    return out;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        best = std::max(best, depth[k]);
        if (!nodes_[k].is_leaf()) {
            depth[static_cast<std::size_t>(nodes_[k].left)] = depth[k] + 1;
            depth[static_cast<std::size_t>(nodes_[k].right)] = depth[k] + 1;
        }
    }
    return best;
}

}  // namespace datasuite
