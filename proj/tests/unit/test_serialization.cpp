#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "datasuite/error.hpp"
#include "datasuite/pipeline.hpp"
#include "datasuite/serialization.hpp"
#include "datasuite/synth.hpp"

using namespace datasuite;

namespace {

SynthSplits data(std::uint64_t seed) {
    auto c = default_synth_config();
    c.rows = 400;
    c.seed = seed;
    return generate_gaussian(c);
}

void expect_same(const IntervalSet& a, const IntervalSet& b) {
    EXPECT_EQ(a.names, b.names);
    EXPECT_EQ(a.lower, b.lower);
    EXPECT_EQ(a.upper, b.upper);
    EXPECT_EQ(a.epsilon, b.epsilon);
}

}  // namespace

TEST(Serialization, PairCopulaRoundTrip) {
    const auto c = PairCopula::make(CopulaFamily::Clayton, 2.25);
    const auto back = json::pair_copula_from_json(json::to_json(c));
    EXPECT_EQ(back.family, c.family);
    EXPECT_EQ(back.theta, c.theta);
    EXPECT_DOUBLE_EQ(back.h(0.3, 0.7), c.h(0.3, 0.7));
}

TEST(Serialization, RegressionTreeRoundTrip) {
    const auto d = data(1);
    const Matrix x = d.train.values().leftCols(2);
    const Vector y = d.train.values().col(2);
    const auto tree = RegressionTree::fit(x, {y.data(), static_cast<std::size_t>(y.size())});
    const auto back = json::regression_tree_from_json(json::to_json(tree));
    EXPECT_EQ(back.predict(x), tree.predict(x));
}

TEST(Serialization, RepresenterRoundTrip) {
    const auto d = data(2);
    const auto rep = fit_representer(d.train, 2);
    const auto back = json::representer_from_json(json::to_json(rep));
    EXPECT_EQ(transform(back, d.test), transform(rep, d.test));
}

TEST(Serialization, VineRoundTripSamplesIdentically) {
    const auto d = data(3);
    const auto vine = fit_dvine(d.train);
    const auto back = json::vine_from_json(json::to_json(vine));
    EXPECT_EQ(sample_dvine_uniforms(back, 50, 5), sample_dvine_uniforms(vine, 50, 5));
}

TEST(Serialization, PipelineRoundTripGivesIdenticalIntervals) {
    const auto d = data(4);
    PipelineOptions o;
    o.seed = 11;
    const auto fp = fit_pipeline(d.train, o);
    const auto text = to_json(fp).dump();
    const auto back = fitted_pipeline_from_json(nlohmann::json::parse(text));
    expect_same(predict(back, prepare(back, d.test).data), predict(fp, prepare(fp, d.test).data));
    EXPECT_EQ(to_json(back).dump(), text);
}

TEST(Serialization, InfiniteEpsilonSurvives) {
    const auto d = data(5);
    PipelineOptions o;
    o.alpha = 0.001;  // 133 calibration rows cannot support this level
    o.augmentation = AugmentationMode::None;
    o.seed = 1;
    const auto fp = fit_pipeline(d.train, o);
    ASSERT_TRUE(fp.conformal.features[0].epsilon.infinite);
    const auto back = json::conformal_from_json(json::to_json(fp.conformal));
    EXPECT_TRUE(back.features[0].epsilon.infinite);
    EXPECT_TRUE(std::isinf(back.features[0].epsilon.value));
}

TEST(Serialization, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "datasuite_ser_test.json";
    json::Json j{{"b", 1}, {"a", {1.5, 2.5}}};
    json::write_file(path.string(), j);
    EXPECT_EQ(json::read_file(path.string()), j);
    std::filesystem::remove(path);
    EXPECT_THROW(json::read_file(path.string()), DataError);
}

TEST(Serialization, MalformedModelRejected) {
    EXPECT_ANY_THROW(fitted_pipeline_from_json(nlohmann::json::object()));
    EXPECT_ANY_THROW(json::regression_tree_from_json(nlohmann::json{{"feature", {0}}}));
}
