#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "datasuite/dataset.hpp"
#include "datasuite/error.hpp"

using namespace datasuite;

namespace {

TabularDataset numeric(std::vector<std::string> names, Matrix values) {
    std::vector<FeatureColumn> cols;
    for (auto& n : names) cols.push_back({n, ColumnKind::Continuous, {}, std::nullopt});
    return TabularDataset("t", std::move(cols), std::move(values));
}

}  // namespace

TEST(Csv, ParsesNumericTable) {
    std::string text = "a,b,c\n";
    for (int i = 0; i < 1000; ++i) text += std::to_string(i) + "," + std::to_string(i * 0.5) + ",-1\n";
    const auto ds = parse_csv(text, "x");
    EXPECT_EQ(ds.rows(), 1000u);
    EXPECT_EQ(ds.cols(), 3u);
    EXPECT_DOUBLE_EQ(ds(999, 1), 499.5);
    EXPECT_FALSE(ds.has_categorical());
}

TEST(Csv, MissingCellReportsRow) {
    try {
        parse_csv("a,b\n1,2\n3,\n", "x");
        FAIL() << "expected a data error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(Csv, RaggedRowIsAnError) { EXPECT_THROW(parse_csv("a,b\n1,2\n3,4,5\n", "x"), DataError); }

TEST(Csv, EmptyFileIsAnError) { EXPECT_THROW(parse_csv("", "x"), DataError); }

TEST(Csv, NonNumericInDeclaredContinuousColumn) {
    CsvSchema s;
    s.kinds["b"] = ColumnKind::Continuous;
    EXPECT_THROW(parse_csv("a,b\n1,x\n", "x", s), DataError);
}

TEST(Csv, MissingFileIsAnError) { EXPECT_THROW(load_csv("/nonexistent/file.csv"), DataError); }

TEST(Csv, StringColumnsAreCategorical) {
    const auto ds = parse_csv("a,c\n1,red\n2,\"blue\"\n3,red\n", "x");
    ASSERT_EQ(ds.column(1).kind, ColumnKind::Categorical);
    EXPECT_EQ(ds.categories().at(1)[1], "blue");
}

TEST(OneHot, ThreeLevelsGiveThreeSortedIndicators) {
    const auto ds = parse_csv("a,c\n1,C\n2,A\n3,B\n", "x");
    const auto enc = encode_onehot(ds);
    EXPECT_EQ(enc.column_names(), (std::vector<std::string>{"a", "c=A", "c=B", "c=C"}));
    EXPECT_DOUBLE_EQ(enc(0, 3), 1.0);
    EXPECT_DOUBLE_EQ(enc(1, 1), 1.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(enc(i, 1) + enc(i, 2) + enc(i, 3), 1.0);
    EXPECT_EQ(enc.column(1).kind, ColumnKind::OneHotDerived);
}

TEST(OneHot, ContinuousDataUnchangedAndIdempotent) {
    Matrix v(2, 2);
    v << 1, 2, 3, 4;
    const auto ds = numeric({"a", "b"}, v);
    EXPECT_EQ(encode_onehot(ds).values(), ds.values());
    const auto once = encode_onehot(parse_csv("a,c\n1,x\n2,y\n", "x"));
    const auto twice = encode_onehot(once);
    EXPECT_EQ(once.values(), twice.values());
    EXPECT_EQ(once.column_names(), twice.column_names());
}

TEST(OneHot, UnseenLevelMapsToZerosAndIsCounted) {
    const auto train = parse_csv("c\nA\nB\nC\n", "tr");
    const auto test = parse_csv("c\nD\nA\n", "te");
    const auto enc = OneHotEncoder::fit(train);
    const auto r = enc.transform(test);
    EXPECT_EQ(r.unseen_levels, 1u);
    EXPECT_DOUBLE_EQ(r.data.values().row(0).sum(), 0.0);
    EXPECT_DOUBLE_EQ(r.data(1, 0), 1.0);
}

TEST(Standardize, TwoPointColumn) {
    Matrix v(2, 1);
    v << 0, 2;
    const auto r = standardize(numeric({"a"}, v));
    EXPECT_DOUBLE_EQ(r.data(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(r.data(1, 0), 1.0);
}

TEST(Standardize, ConstantColumnDropped) {
    Matrix v(3, 2);
    v << 1, 7, 2, 7, 3, 7;
    const auto r = standardize(numeric({"a", "k"}, v));
    EXPECT_EQ(r.data.cols(), 1u);
    EXPECT_EQ(r.params.dropped, std::vector<std::string>{"k"});
}

TEST(Standardize, MeanZeroUnitStdAndRoundTrip) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(5.0, 2.0);
    Matrix v(1000, 3);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < 3; ++j) v(i, j) = z(rng) * (j + 1);
    const auto r = standardize(numeric({"a", "b", "c"}, v));
    for (std::size_t j = 0; j < 3; ++j) {
        const Vector c = r.data.column_values(j);
        const double m = c.mean();
        EXPECT_LT(std::abs(m), 1e-9);
        EXPECT_NEAR(std::sqrt((c.array() - m).square().mean()), 1.0, 1e-9);
    }
    const Matrix back = unstandardize_matrix(r.data.values(), r.params);
    EXPECT_LT((back - v).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Standardize, SyntheticMeanWithinStandardErrors) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(5.0, 1.8);
    Matrix v(1000, 1);
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, 0) = z(rng);
    const auto train = numeric({"x1"}, v);
    const auto params = standardize(train).params;
    Matrix w(1000, 1);
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, 0) = z(rng);
    const auto held = standardize(numeric({"x1"}, w), params).data;
    EXPECT_LT(std::abs(held.values().mean()), 3.0 * 2.0 / std::sqrt(1000.0));
}

TEST(Ranges, MinMaxAndOneHot) {
    Matrix v(3, 1);
    v << 1, 3, 2;
    auto r = feature_ranges(numeric({"a"}, v));
    EXPECT_DOUBLE_EQ(r[0].lower, 1);
    EXPECT_DOUBLE_EQ(r[0].upper, 3);
    const auto enc = encode_onehot(parse_csv("c\nA\nA\n", "x"));
    r = feature_ranges(enc);
    EXPECT_DOUBLE_EQ(r[0].lower, 0);
    EXPECT_DOUBLE_EQ(r[0].upper, 1);
}

TEST(Ranges, StandardizedTrainingRangesContainEveryValue) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Matrix v(200, 2);
    for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) << z(rng), 3 * z(rng);
    const auto s = standardize(numeric({"a", "b"}, v)).data;
    const auto r = feature_ranges(s);
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_TRUE(std::isfinite(r[j].lower) && std::isfinite(r[j].upper));
            EXPECT_TRUE(r[j].contains(s(i, j)));
        }
}

TEST(Split, SizesFollowFloor) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        const auto s = split_indices(100, {0.67, seed});
        EXPECT_EQ(s.proper.size(), 67u);
        EXPECT_EQ(s.calibration.size(), 33u);
    }
}

TEST(Split, DeterministicAndPartition) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = split_indices(137, {2.0 / 3.0, seed});
        const auto b = split_indices(137, {2.0 / 3.0, seed});
        EXPECT_EQ(a.proper, b.proper);
        std::set<std::size_t> all(a.proper.begin(), a.proper.end());
        for (auto i : a.calibration) EXPECT_TRUE(all.insert(i).second) << "overlap at " << i;
        EXPECT_EQ(all.size(), 137u);
        EXPECT_EQ(*all.rbegin(), 136u);
    }
}

TEST(Split, EmptyPartitionIsAnError) {
    EXPECT_THROW(split_indices(5, {0.1, 0}), DataError);
    EXPECT_THROW(split_indices(3, {0.5, 0}), DataError);
}
