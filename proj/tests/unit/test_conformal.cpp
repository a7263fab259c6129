#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "datasuite/conformal.hpp"
#include "datasuite/error.hpp"
#include "datasuite/stats.hpp"

using namespace datasuite;

namespace {

TabularDataset table(const Matrix& v) {
    std::vector<FeatureColumn> cols;
    for (Eigen::Index j = 0; j < v.cols(); ++j)
        cols.push_back({"x" + std::to_string(j + 1), ColumnKind::Continuous, {}, std::nullopt});
    TabularDataset ds("t", std::move(cols), v);
    return ds.with_ranges(feature_ranges(ds));
}

// Latent h ~ N(0,1); targets x_j = (j+1) h + noise with scale s(h).
struct Problem {
    Matrix latent;
    Matrix targets;
    std::vector<double> scale;
};

Problem make_problem(std::size_t n, std::uint64_t seed, bool hetero) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Problem p{Matrix(static_cast<Eigen::Index>(n), 1), Matrix(static_cast<Eigen::Index>(n), 2), {}};
    for (Eigen::Index i = 0; i < p.latent.rows(); ++i) {
        const double h = z(rng);
        const double s = hetero ? 0.05 + std::abs(h) : 0.5;
        p.latent(i, 0) = h;
        p.targets(i, 0) = h + s * z(rng);
        p.targets(i, 1) = 2 * h + s * z(rng);
        p.scale.push_back(s);
    }
    return p;
}

ConformalModel fit_model(const Problem& train, const Problem& cal, double alpha) {
    const auto ds = table(train.targets);
    const auto ranges = feature_ranges(ds);
    auto regs = fit_feature_regressors(train.latent, ds);
    auto norms = fit_normalizers(train.latent, ds, regs, ranges);
    return calibrate(regs, norms, ds.column_names(), ranges, cal.latent, cal.targets, alpha, train.latent.rows());
}

// Oracle: sort a copy and index the k-th smallest with k computed in integer
// basis points, independent of the floating-point path in critical_rank.
double oracle(std::vector<double> s, int alpha_bp) {
    std::sort(s.begin(), s.end());
    const long long n = static_cast<long long>(s.size());
    const long long num = (n + 1) * (10000 - alpha_bp);
    const long long k = (num + 9999) / 10000;
    if (k > n) return std::numeric_limits<double>::infinity();
    return s[static_cast<std::size_t>(k - 1)];
}

}  // namespace

TEST(CriticalScore, DocumentedExample) {
    EXPECT_EQ(critical_rank(99, 0.05), 95u);
    std::vector<double> s(99);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(98 - i);
    EXPECT_DOUBLE_EQ(critical_score(s, 0.05).value, 94.0);
}

TEST(CriticalScore, ConstantScores) {
    std::vector<double> s(50, 1.75);
    EXPECT_DOUBLE_EQ(critical_score(s, 0.1).value, 1.75);
}

TEST(CriticalScore, TooFewScoresGiveInfinity) {
    std::vector<double> s(10, 1.0);
    const auto c = critical_score(s, 0.05);
    EXPECT_TRUE(c.infinite);
    EXPECT_TRUE(std::isinf(c.value));
}

TEST(CriticalScore, MatchesSortAndIndexOracle) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> size(1, 400);
    std::exponential_distribution<double> e;
    for (int alpha_bp : {100, 500, 1000})
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> s(static_cast<std::size_t>(size(rng)));
            for (auto& x : s) x = e(rng);
            const double expect = oracle(s, alpha_bp);
            const double got = critical_score(s, alpha_bp / 10000.0).value;
            if (std::isinf(expect)) {
                EXPECT_TRUE(std::isinf(got));
            } else {
                EXPECT_EQ(got, expect);
            }
        }
}

TEST(Conformal, RegressorsSeeOnlyLatentsAndFitIdentity) {
    auto p = make_problem(400, 1, false);
    p.targets.col(0) = p.latent.col(0);
    const auto regs = fit_feature_regressors(p.latent, table(p.targets), {0, 2, 1});
    const Vector pred = regs[0].predict(p.latent);
    EXPECT_LT((pred - p.latent.col(0)).squaredNorm() / 400, 1e-6);
}

TEST(Conformal, ConstantTargetPredictsConstant) {
    auto p = make_problem(200, 2, false);
    p.targets.col(1).setConstant(4.0);
    std::vector<FeatureColumn> cols{{"a", ColumnKind::Continuous, {}, std::nullopt},
                                    {"b", ColumnKind::Continuous, {}, std::nullopt}};
    const auto regs = fit_feature_regressors(p.latent, TabularDataset("t", cols, p.targets));
    EXPECT_TRUE((regs[1].predict(p.latent).array() == 4.0).all());
}

TEST(Conformal, HomoscedasticNormalizerRoughlyConstant) {
    const auto p = make_problem(3000, 4, false);
    const auto ds = table(p.targets);
    const auto regs = fit_feature_regressors(p.latent, ds);
    NormalizerParams np;
    np.tree.min_samples_leaf = 100;
    const auto norms = fit_normalizers(p.latent, ds, regs, feature_ranges(ds), np);
    std::vector<double> s;
    for (Eigen::Index i = 0; i < p.latent.rows(); ++i) s.push_back(norms[0]({&p.latent(i, 0), 1}));
    const double m = stats::mean(s);
    EXPECT_LT(std::sqrt(stats::variance(s)) / m, 0.3);
}

TEST(Conformal, HeteroscedasticNormalizerTracksNoiseScale) {
    const auto p = make_problem(3000, 5, true);
    const auto ds = table(p.targets);
    const auto regs = fit_feature_regressors(p.latent, ds);
    NormalizerParams np;
    np.tree.min_samples_leaf = 50;
    const auto norms = fit_normalizers(p.latent, ds, regs, feature_ranges(ds), np);
    const auto q = make_problem(1000, 6, true);
    std::vector<double> s;
    for (Eigen::Index i = 0; i < q.latent.rows(); ++i) s.push_back(norms[1]({&q.latent(i, 0), 1}));
    EXPECT_GT(stats::spearman(s, q.scale), 0.5);
}

TEST(Conformal, ZeroResidualFeatureUsesFloor) {
    auto p = make_problem(200, 7, false);
    p.targets.col(0).setConstant(2.0);
    std::vector<FeatureColumn> cols{{"a", ColumnKind::Continuous, {0.0, 1.0}, std::nullopt},
                                    {"b", ColumnKind::Continuous, {}, std::nullopt}};
    const TabularDataset ds("t", cols, p.targets);
    const auto regs = fit_feature_regressors(p.latent, ds);
    const std::vector<FeatureRange> ranges{{0.0, 1.0}, {-10.0, 10.0}};
    const auto norms = fit_normalizers(p.latent, ds, regs, ranges);
    EXPECT_TRUE(norms[0].zero_residual);
    EXPECT_DOUBLE_EQ(norms[0]({&p.latent(5, 0), 1}), 1e-6);
}

TEST(Conformal, ConstantNormalizerGivesEqualWidths) {
    const auto p = make_problem(600, 8, false);
    const auto cal = make_problem(300, 9, false);
    auto model = fit_model(p, cal, 0.1);
    for (auto& f : model.features) {
        f.normalizer.zero_residual = true;
        f.normalizer.beta = 0.7;
    }
    const auto set = predict_intervals(model, cal.latent, cal.targets);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < set.instances(); ++i) {
            EXPECT_NEAR(set.upper(i, j) - set.lower(i, j), 2 * model.features[j].epsilon.value * 0.7, 1e-12);
            EXPECT_NEAR(0.5 * (set.upper(i, j) + set.lower(i, j)), set.center(i, j), 1e-12);
        }
}

TEST(Conformal, CoverageOnExchangeableData) {
    const auto train = make_problem(2000, 10, true);
    const auto cal = make_problem(1000, 11, true);
    const auto test = make_problem(1000, 12, true);
    const auto model = fit_model(train, cal, 0.05);
    const auto set = predict_intervals(model, test.latent, test.targets);
    for (std::size_t j = 0; j < 2; ++j) {
        double c = 0;
        for (std::size_t i = 0; i < set.instances(); ++i) c += set.contains(i, j);
        EXPECT_GE(c / 1000.0, 0.95 - 0.02);
        EXPECT_GE(c / 1000.0, 0.95 - 3 * std::sqrt(0.05 * 0.95 / 1000.0));
    }
}

TEST(Conformal, ScoreContainmentIdentity) {
    const auto model = fit_model(make_problem(600, 13, true), make_problem(300, 14, true), 0.1);
    const auto test = make_problem(500, 15, true);
    const auto set = predict_intervals(model, test.latent, test.targets);
    for (std::size_t i = 0; i < set.instances(); ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double g = set.gamma(i, j), e = set.epsilon[j];
            if (std::abs(g - e) > 1e-9 * std::max(1.0, e)) EXPECT_EQ(g <= e, set.contains(i, j));
        }
}

TEST(Conformal, EpsilonMonotoneAndIntervalsNested) {
    const auto train = make_problem(800, 16, true);
    const auto cal = make_problem(400, 17, true);
    const auto test = make_problem(300, 18, true);
    const auto base = fit_model(train, cal, 0.5);
    std::optional<IntervalSet> wider;
    double prev_eps[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (double alpha : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5}) {
        const auto m = recalibrate(base, cal.latent, cal.targets, alpha);
        const auto set = predict_intervals(m, test.latent, test.targets);
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_LE(m.features[j].epsilon.value, prev_eps[j]);
            prev_eps[j] = m.features[j].epsilon.value;
        }
        if (wider) {
            EXPECT_TRUE((wider->lower.array() <= set.lower.array()).all());
            EXPECT_TRUE((wider->upper.array() >= set.upper.array()).all());
        }
        wider = set;
    }
}

TEST(Conformal, EmptyCalibrationIsAnError) {
    const auto p = make_problem(100, 19, false);
    const auto ds = table(p.targets);
    const auto ranges = feature_ranges(ds);
    auto regs = fit_feature_regressors(p.latent, ds);
    auto norms = fit_normalizers(p.latent, ds, regs, ranges);
    EXPECT_THROW(calibrate(regs, norms, ds.column_names(), ranges, Matrix(0, 1), Matrix(0, 2), 0.05), DataError);
}

TEST(Conformal, UncalibratedModelIsAnError) {
    ConformalModel m;
    EXPECT_THROW(predict_intervals(m, Matrix(1, 1), Matrix(1, 0)), UsageError);
}

TEST(Conformal, SeparateNormalizerInputs) {
    const auto p = make_problem(600, 20, true);
    const auto cal = make_problem(300, 21, true);
    const auto ds = table(p.targets);
    const auto ranges = feature_ranges(ds);
    auto regs = fit_feature_regressors(p.latent, ds);
    auto norms = fit_normalizers(p.latent, ds, regs, ranges, {}, &p.targets);
    const auto m = calibrate(regs, norms, ds.column_names(), ranges, cal.latent, cal.targets, 0.1, 600, &cal.targets);
    const auto set = predict_intervals(m, cal.latent, cal.targets, &cal.targets);
    for (std::size_t j = 0; j < 2; ++j) {
        double c = 0;
        for (std::size_t i = 0; i < set.instances(); ++i) c += set.contains(i, j);
        EXPECT_GE(c / 300.0, 0.9 - 1e-12);  // in-sample calibration coverage is at least 1 - alpha
    }
}
