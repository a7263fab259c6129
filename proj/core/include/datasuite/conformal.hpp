#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "datasuite/dataset.hpp"
#include "datasuite/intervals.hpp"
#include "datasuite/regression_tree.hpp"

namespace datasuite {

// Every function taking `normalizer_inputs` evaluates sigma on those rows
// instead of the latents when the pointer is non-null.
//
// sigma_i(x) = exp(tree(f(x))) + beta, where the tree predicts
// ln(|residual| + delta). When every training residual is zero the tree is
// absent and sigma_i(x) = beta.
struct Normalizer {
    RegressionTree log_residual_model;
    double beta = 0.0;
    bool zero_residual = false;

    double operator()(std::span<const double> latent) const;
};

struct NormalizerParams {
    double log_guard = 1e-8;           // delta
    double floor_fraction = 1e-6;      // beta = floor_fraction * (b_i - a_i)
    TreeParams tree;
};

struct CriticalScore {
    double value = 0.0;
    std::size_t rank = 0;  // k, 1-based
    bool infinite = false;
};

// k = ceil((n + 1)(1 - alpha)); epsilon is the k-th smallest score, or +inf when k > n.
std::size_t critical_rank(std::size_t n, double alpha);
CriticalScore critical_score(std::span<const double> scores, double alpha);

struct FeatureConformal {
    std::string name;
    FeatureRange range;
    RegressionTree regressor;
    Normalizer normalizer;
    CriticalScore epsilon;
};

struct ConformalModel {
    std::vector<FeatureConformal> features;
    double alpha = 0.05;
    std::size_t calibration_size = 0;
    std::size_t proper_size = 0;
    std::vector<std::string> warnings;

    bool calibrated() const { return calibration_size > 0; }
};

std::vector<RegressionTree> fit_feature_regressors(const Matrix& latents, const TabularDataset& targets,
                                                   const TreeParams& params = {});

std::vector<Normalizer> fit_normalizers(const Matrix& latents, const TabularDataset& targets,
                                        const std::vector<RegressionTree>& regressors,
                                        const std::vector<FeatureRange>& ranges, const NormalizerParams& params = {},
                                        const Matrix* normalizer_inputs = nullptr);

// Normalized non-conformity scores gamma_i(x) = |x_i - g_i(f(x))| / sigma_i(x), one column per feature.
Matrix nonconformity_scores(const std::vector<RegressionTree>& regressors, const std::vector<Normalizer>& normalizers,
                            const Matrix& latents, const Matrix& targets,
                            const Matrix* normalizer_inputs = nullptr);

ConformalModel calibrate(std::vector<RegressionTree> regressors, std::vector<Normalizer> normalizers,
                         const std::vector<std::string>& names, const std::vector<FeatureRange>& ranges,
                         const Matrix& calibration_latents, const Matrix& calibration_targets, double alpha,
                         std::size_t proper_size = 0, const Matrix* normalizer_inputs = nullptr);

// Same regressors and normalizers, re-calibrated at another significance level.
ConformalModel recalibrate(const ConformalModel& model, const Matrix& calibration_latents,
                           const Matrix& calibration_targets, double alpha,
                           const Matrix* normalizer_inputs = nullptr);

// [g - eps * sigma, g + eps * sigma] per instance and feature; `observed` must be in model feature order.
IntervalSet predict_intervals(const ConformalModel& model, const Matrix& latents, const Matrix& observed,
                              const Matrix* normalizer_inputs = nullptr);

}  // namespace datasuite
