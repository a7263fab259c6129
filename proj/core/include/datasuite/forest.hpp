#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "datasuite/dataset.hpp"
#include "datasuite/stratify.hpp"

namespace datasuite {

struct ForestParams {
    std::size_t trees = 100;
    std::size_t max_features = 0;  // 0: ceil(sqrt(d))
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_depth = 0;  // 0: unlimited
};

struct ClassNode {
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int label = 0;  // majority class index at this node

    bool is_leaf() const { return feature < 0; }
};

// Bagged Gini trees with per-split feature subsampling and majority vote
// (ties go to the lower class index).
class TreeEnsembleClassifier {
public:
    const std::vector<int>& classes() const { return classes_; }
    const std::vector<std::vector<ClassNode>>& trees() const { return trees_; }
    double oob_accuracy() const { return oob_accuracy_; }

    int predict(std::span<const double> row) const;
    std::vector<int> predict(const Matrix& x) const;

    friend TreeEnsembleClassifier fit_classifier(const Matrix& x, std::span<const int> labels, std::uint64_t seed,
                                                 const ForestParams& params);

private:
    std::size_t predict_index(std::span<const double> row) const;

    std::vector<int> classes_;
    std::vector<std::vector<ClassNode>> trees_;
    double oob_accuracy_ = 0.0;
};

TreeEnsembleClassifier fit_classifier(const Matrix& x, std::span<const int> labels, std::uint64_t seed,
                                      const ForestParams& params = {});

double accuracy(std::span<const int> predicted, std::span<const int> labels, const IndexList& subset);

struct GroupAccuracy {
    double proportion = 0.0;
    std::size_t group_size = 0;
    std::optional<double> certain;
    std::optional<double> uncertain;
    std::optional<double> random_control;
};

struct StratificationAccuracy {
    double baseline = 0.0;  // whole test set
    std::optional<double> inconsistent;
    std::vector<GroupAccuracy> groups;
    std::vector<double> skipped;
};

// Accuracy on Cert_p / Uncert_p for every p, plus a random subset of the same size.
StratificationAccuracy evaluate_stratification(const TreeEnsembleClassifier& clf, const Matrix& test,
                                               std::span<const int> labels, const StratificationReport& report,
                                               const std::vector<double>& proportions, std::uint64_t seed);

void write_accuracy_curve_csv(const std::string& path, const StratificationAccuracy& acc);

}  // namespace datasuite
