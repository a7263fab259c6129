#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "datasuite/dataset.hpp"

namespace datasuite {

struct TreeParams {
    std::size_t max_depth = 0;  // 0: unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 5;
};

// Flat node array; leaves have feature == -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
    std::size_t samples = 0;

    bool is_leaf() const { return feature < 0; }
};

// CART regression tree with squared-error splits at midpoints between
// consecutive distinct feature values.
class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes);

    static RegressionTree fit(const Matrix& x, std::span<const double> y, const TreeParams& params = {});

    double predict(std::span<const double> row) const;
    Vector predict(const Matrix& x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t leaf_count() const;
    std::size_t depth() const;
    bool fitted() const { return !nodes_.empty(); }

private:
    std::vector<TreeNode> nodes_;
};

}  // namespace datasuite
