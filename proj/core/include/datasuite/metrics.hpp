#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "datasuite/dataset.hpp"
#include "datasuite/intervals.hpp"

namespace datasuite {

struct QualityTriple {
    double coverage = 0.0;
    double deficit = 0.0;
    double excess = 0.0;
};

// Pooled over all (instance, feature) pairs, plus one triple per feature.
struct IntervalQuality {
    QualityTriple pooled;
    std::vector<std::string> names;
    std::vector<QualityTriple> per_feature;
};

IntervalQuality interval_quality(const IntervalSet& intervals);

struct MpiPoint {
    double proportion = 0.0;
    std::size_t group_size = 0;
    double certain_accuracy = 0.0;
    double uncertain_accuracy = 0.0;
};

struct MpiResult {
    std::vector<MpiPoint> points;
    std::vector<double> skipped;
    double mpi = 0.0;
};

// Accuracy of the downstream model on a subset of instances; nullopt when it cannot be evaluated.
using SubsetAccuracy = std::function<std::optional<double>(const IndexList&)>;

// P = {0.05 k | k = 1..20}. For p > 0.5 the certain and uncertain tails overlap.
std::vector<double> mpi_proportions();

MpiResult mpi(const SubsetAccuracy& accuracy, const IndexList& ranking,
              const std::vector<double>& proportions = mpi_proportions());

// ceil(p n) with representation error of p * n removed.
std::size_t group_size(double proportion, std::size_t n);

}  // namespace datasuite
