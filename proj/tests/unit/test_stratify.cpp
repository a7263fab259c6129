#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "datasuite/error.hpp"
#include "datasuite/representer.hpp"
#include "datasuite/stratify.hpp"

using namespace datasuite;

namespace {

IntervalSet make_set(const Matrix& lo, const Matrix& hi, const Matrix& obs, std::vector<FeatureRange> ranges) {
    IntervalSet s;
    for (Eigen::Index j = 0; j < lo.cols(); ++j) s.names.push_back("x" + std::to_string(j + 1));
    s.ranges = std::move(ranges);
    s.lower = lo;
    s.upper = hi;
    s.observed = obs;
    s.center = 0.5 * (lo + hi);
    s.sigma = Matrix::Ones(lo.rows(), lo.cols());
    s.epsilon.assign(static_cast<std::size_t>(lo.cols()), 1.0);
    return s;
}

IntervalSet random_set(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0), w(0.1, 3.0);
    const auto r = static_cast<Eigen::Index>(n), c = static_cast<Eigen::Index>(d);
    Matrix lo(r, c), hi(r, c), obs(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double mid = u(rng), half = w(rng);
            lo(i, j) = mid - half;
            hi(i, j) = mid + half;
            obs(i, j) = u(rng);
        }
    return make_set(lo, hi, obs, std::vector<FeatureRange>(d, {0.0, 10.0}));
}

IndexList iota(std::size_t n) {
    IndexList r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = i;
    return r;
}

}  // namespace

TEST(Inconsistency, CountsFeaturesOutside) {
    Matrix lo = Matrix::Zero(1, 10), hi = Matrix::Ones(1, 10), obs = Matrix::Constant(1, 10, 0.5);
    obs.block(0, 0, 1, 6).setConstant(2.0);
    const auto s = make_set(lo, hi, obs, std::vector<FeatureRange>(10, {0.0, 1.0}));
    const auto r = inconsistency(s, 0.5);
    EXPECT_DOUBLE_EQ(r.fraction[0], 0.6);
    EXPECT_TRUE(r.flagged[0]);
    EXPECT_FALSE(inconsistency(s, 0.6).flagged[0]);  // strict inequality
}

TEST(Inconsistency, BoundaryCountsAsInside) {
    Matrix lo = Matrix::Zero(1, 2), hi = Matrix::Ones(1, 2), obs(1, 2);
    obs << 0.0, 1.0;
    EXPECT_DOUBLE_EQ(inconsistency(make_set(lo, hi, obs, {{0, 1}, {0, 1}})).fraction[0], 0.0);
}

TEST(Inconsistency, FlagCountMonotoneInLambda) {
    const auto s = random_set(500, 7, 1);
    std::size_t prev = s.instances() + 1;
    for (int k = 0; k <= 10; ++k) {
        const auto c = inconsistency(s, k / 10.0).flagged_count();
        EXPECT_LE(c, prev);
        prev = c;
    }
}

TEST(Inconsistency, LambdaOutsideUnitIntervalRejected) {
    const auto s = random_set(3, 2, 2);
    EXPECT_THROW(inconsistency(s, 1.5), UsageError);
    EXPECT_THROW(inconsistency(s, -0.1), UsageError);
}

TEST(Uncertainty, RangeNormalizedWidthExample) {
    Matrix lo(1, 2), hi(1, 2), obs = Matrix::Zero(1, 2);
    lo << 0.0, 0.0;
    hi << 2.0, 30.0;
    const auto s = make_set(lo, hi, obs, {{0.0, 10.0}, {0.0, 100.0}});
    EXPECT_NEAR(uncertainty(s)[0], 0.25, 1e-15);
    hi << 10.0, 100.0;
    EXPECT_DOUBLE_EQ(uncertainty(make_set(lo, hi, obs, {{0.0, 10.0}, {0.0, 100.0}}))[0], 1.0);
}

TEST(Uncertainty, InvariantToPositiveAffineRescaling) {
    auto s = random_set(100, 4, 3);
    const auto base = uncertainty(s);
    const double a = 3.7, b = -12.0;
    auto t = s;
    t.lower = (a * s.lower.array() + b).matrix();
    t.upper = (a * s.upper.array() + b).matrix();
    t.observed = (a * s.observed.array() + b).matrix();
    for (auto& r : t.ranges) r = {a * r.lower + b, a * r.upper + b};
    const auto scaled = uncertainty(t);
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(base[i], scaled[i], 1e-12);
}

TEST(Uncertainty, ZeroWidthRangeRejected) {
    auto s = random_set(3, 2, 4);
    s.ranges[1] = {1.0, 1.0};
    EXPECT_THROW(uncertainty(s), DataError);
}

TEST(Ranking, TiesBrokenByIndex) {
    const std::vector<double> d{0.3, 0.1, 0.3, 0.1, 0.2};
    EXPECT_EQ(rank_by_uncertainty(d), (IndexList{1, 3, 4, 0, 2}));
}

TEST(Stratify, GroupSizesAreCeilOfPn) {
    EXPECT_EQ(stratify_by_uncertainty(iota(100), 0.05).certain.size(), 5u);
    EXPECT_EQ(stratify_by_uncertainty(iota(101), 0.05).certain.size(), 6u);
    EXPECT_EQ(stratify_by_uncertainty(iota(10), 0.3).uncertain.size(), 3u);
    EXPECT_EQ(stratify_by_uncertainty(iota(7), 0.5).certain.size(), 4u);
}

TEST(Stratify, TailsComeFromTheRankingEnds) {
    const IndexList r{4, 2, 0, 1, 3, 5};
    const auto g = stratify_by_uncertainty(r, 0.5);
    EXPECT_EQ(g.certain, (IndexList{4, 2, 0}));
    EXPECT_EQ(g.uncertain, (IndexList{1, 3, 5}));
}

TEST(Stratify, PrefixPropertyAcrossProportions) {
    const auto s = random_set(333, 5, 5);
    const auto r = build_report(s, 0.5, {0.05, 0.1, 0.2, 0.35, 0.5});
    for (std::size_t k = 1; k < r.groups.size(); ++k) {
        const auto& small = r.groups[k - 1];
        const auto& big = r.groups[k];
        EXPECT_TRUE(std::equal(small.certain.begin(), small.certain.end(), big.certain.begin()));
        EXPECT_TRUE(std::equal(small.uncertain.rbegin(), small.uncertain.rend(), big.uncertain.rbegin()));
    }
    const auto& g = r.groups.back();
    for (auto c : g.certain)
        for (auto u : g.uncertain) EXPECT_LE(r.uncertainty[c], r.uncertainty[u]);
}

TEST(Stratify, InvalidProportions) {
    EXPECT_THROW(stratify_by_uncertainty(iota(10), 0.0), UsageError);
    EXPECT_THROW(stratify_by_uncertainty(iota(10), 0.6), UsageError);
    EXPECT_THROW(stratify_by_uncertainty(iota(10), 0.05), DataError);
}

TEST(Stratify, FullCoverageTailsOverlap) {
    const auto g = ranking_tails(iota(8), 8);
    EXPECT_EQ(g.certain, g.uncertain);
    EXPECT_THROW(ranking_tails(iota(8), 9), DataError);
}

TEST(Labels, InconsistentTakesPrecedence) {
    Matrix lo = Matrix::Zero(4, 1), hi(4, 1), obs = Matrix::Constant(4, 1, 0.5);
    hi << 1, 2, 3, 4;
    obs(3, 0) = 9.0;
    const auto s = make_set(lo, hi, obs, {{0.0, 10.0}});
    const auto r = build_report(s, 0.5, {0.25});
    const auto labels = group_labels(r, r.groups[0]);
    EXPECT_EQ(labels, (std::vector<std::string>{"certain", "neutral", "neutral", "inconsistent"}));
}

TEST(Prototypes, SingletonGroupIsTheInstance) {
    Matrix v(3, 2);
    v << 1, 2, 3, 4, 5, 7;
    const TabularDataset ds("t", {{"a", ColumnKind::Continuous, {}, std::nullopt}, {"b", ColumnKind::Continuous, {}, std::nullopt}}, v);
    const auto t = prototypes(ds, {{"one", {2}}});
    EXPECT_EQ(t.prototypes[0].centroid, (std::vector<double>{5, 7}));
    EXPECT_EQ(t.prototypes[0].members, 1u);
}

TEST(Prototypes, SelfReferenceReturnsCentroid) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    Matrix v(60, 3);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < 3; ++j) v(i, j) = z(rng) + (i < 30 ? 0.0 : 8.0);
    std::vector<FeatureColumn> cols;
    for (int j = 0; j < 3; ++j) cols.push_back({"x" + std::to_string(j), ColumnKind::Continuous, {}, std::nullopt});
    const TabularDataset ds("t", cols, v);
    IndexList a, b;
    for (std::size_t i = 0; i < 60; ++i) (i < 30 ? a : b).push_back(i);
    const auto t = prototypes(ds, {{"a", a}, {"b", b}}, &ds);
    for (const auto& p : t.prototypes)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p.centroid[j], (*p.nearest_reference)[j], 1e-12);
    EXPECT_NEAR(t.prototypes[0].centroid[0], 0.0, 0.6);
    EXPECT_NEAR(t.prototypes[1].centroid[0], 8.0, 0.6);
}

TEST(Prototypes, OneHotBlocksCollapseToArgmax) {
    Matrix v(3, 3);
    v << 1, 0, 10, 1, 0, 20, 0, 1, 30;
    std::vector<FeatureColumn> cols{{"c=a", ColumnKind::OneHotDerived, {0, 1}, CategorySource{"c", "a"}},
                                    {"c=b", ColumnKind::OneHotDerived, {0, 1}, CategorySource{"c", "b"}},
                                    {"y", ColumnKind::Continuous, {}, std::nullopt}};
    const auto t = prototypes(TabularDataset("t", cols, v), {{"all", {0, 1, 2}}});
    EXPECT_EQ(t.prototypes[0].centroid, (std::vector<double>{1, 0, 20}));
}

TEST(Prototypes, EmptyGroupRejected) {
    Matrix v = Matrix::Ones(2, 1);
    const TabularDataset ds("t", {{"a", ColumnKind::Continuous, {}, std::nullopt}}, v);
    EXPECT_THROW(prototypes(ds, {{"none", {}}}), DataError);
}

TEST(Projection, CoordinatesAndLabels) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    Matrix v(50, 3);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < 3; ++j) v(i, j) = z(rng);
    std::vector<FeatureColumn> cols;
    for (int j = 0; j < 3; ++j) cols.push_back({"x" + std::to_string(j), ColumnKind::Continuous, {}, std::nullopt});
    const TabularDataset ds("t", cols, v);
    const auto rep = fit_representer(ds, 1);
    std::vector<std::string> labels(50, "neutral");
    const auto p = project_2d(rep, ds, labels);
    EXPECT_EQ(p.coords.rows(), 50);
    EXPECT_EQ(p.coords.cols(), 2);
    EXPECT_EQ(p.labels, labels);
    EXPECT_THROW(project_2d(rep, ds, {"x"}), DataError);
}
