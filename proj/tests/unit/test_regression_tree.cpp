#include <gtest/gtest.h>

#include <random>

#include "datasuite/error.hpp"
#include "datasuite/regression_tree.hpp"

using namespace datasuite;

TEST(RegressionTree, LearnsIdentityTarget) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    Matrix x(500, 1);
    std::vector<double> y(500);
    for (Eigen::Index i = 0; i < 500; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) = u(rng);
    const auto t = RegressionTree::fit(x, y, {0, 2, 1});
    const Vector p = t.predict(x);
    double mse = 0;
    for (Eigen::Index i = 0; i < 500; ++i) mse += std::pow(p(i) - y[static_cast<std::size_t>(i)], 2);
    EXPECT_LT(mse / 500, 1e-6);
}

TEST(RegressionTree, ConstantTargetGivesConstantPrediction) {
    Matrix x(50, 2);
    x.setRandom();
    std::vector<double> y(50, 3.25);
    const auto t = RegressionTree::fit(x, y);
    EXPECT_EQ(t.leaf_count(), 1u);
    Matrix q(5, 2);
    q.setRandom();
    for (Eigen::Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(t.predict(q)(i), 3.25);
}

TEST(RegressionTree, PredictionsWithinTargetRangeAndLeafSizes) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    Matrix x(300, 2);
    std::vector<double> y(300);
    for (Eigen::Index i = 0; i < 300; ++i) {
        x.row(i) << z(rng), z(rng);
        y[static_cast<std::size_t>(i)] = x(i, 0) * x(i, 1) + z(rng);
    }
    const auto t = RegressionTree::fit(x, y);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    Matrix q(200, 2);
    for (Eigen::Index i = 0; i < 200; ++i) q.row(i) << 5 * z(rng), 5 * z(rng);
    const Vector p = t.predict(q);
    EXPECT_GE(p.minCoeff(), *lo);
    EXPECT_LE(p.maxCoeff(), *hi);
    for (const auto& n : t.nodes())
        if (n.is_leaf()) EXPECT_GE(n.samples, 5u);
}

TEST(RegressionTree, MaxDepthRespected) {
    Matrix x(200, 1);
    std::vector<double> y(200);
    for (Eigen::Index i = 0; i < 200; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) = static_cast<double>(i);
    EXPECT_LE(RegressionTree::fit(x, y, {3, 2, 1}).depth(), 3u);
}

TEST(RegressionTree, TooFewSamplesIsAnError) {
    Matrix x(3, 1);
    x.setRandom();
    std::vector<double> y{1, 2, 3};
    EXPECT_THROW(RegressionTree::fit(x, y), DataError);
}
