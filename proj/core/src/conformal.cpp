#include "datasuite/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "conformal";

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
    return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

double Normalizer::operator()(std::span<const double> latent) const {
    if (zero_residual) return beta;
    return std::exp(log_residual_model.predict(latent)) + beta;
}

std::size_t critical_rank(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError(kModule, "alpha must lie in (0,1)");
    double q = static_cast<double>(n + 1) * (1.0 - alpha);
    // (n+1)(1-alpha) is usually meant to be an exact rational; undo representation error
    // so that e.g. 100 * 0.95 is treated as 95, not 95.00000000000001.
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) q = r;
    return static_cast<std::size_t>(std::ceil(q));
}

CriticalScore critical_score(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw DataError(kModule, "calibration set is empty");
    CriticalScore out;
    out.rank = critical_rank(scores.size(), alpha);
    if (out.rank > scores.size()) {
        out.infinite = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<double> s(scores.begin(), scores.end());
    auto kth = s.begin() + static_cast<std::ptrdiff_t>(out.rank - 1);
    std::nth_element(s.begin(), kth, s.end());
    out.value = *kth;
    return out;
}

std::vector<RegressionTree> fit_feature_regressors(const Matrix& latents, const TabularDataset& targets,
                                                   const TreeParams& params) {
    if (static_cast<std::size_t>(latents.rows()) != targets.rows())
        throw DataError(kModule, "latent and target row counts differ");
    std::vector<RegressionTree> out;
    out.reserve(targets.cols());
    for (std::size_t j = 0; j < targets.cols(); ++j) {
        const Vector y = targets.column_values(j);
        out.push_back(RegressionTree::fit(latents, {y.data(), static_cast<std::size_t>(y.size())}, params));
    }
    return out;
}

std::vector<Normalizer> fit_normalizers(const Matrix& latents, const TabularDataset& targets,
                                        const std::vector<RegressionTree>& regressors,
                                        const std::vector<FeatureRange>& ranges, const NormalizerParams& params,
                                        const Matrix* normalizer_inputs) {
    const Matrix& ninp = normalizer_inputs ? *normalizer_inputs : latents;
    if (ninp.rows() != latents.rows()) throw DataError(kModule, "normalizer inputs and latents differ in rows");
    if (regressors.size() != targets.cols() || ranges.size() != targets.cols())
        throw DataError(kModule, "one regressor and one range per feature are required");
    std::vector<Normalizer> out;
    out.reserve(targets.cols());
    const auto n = latents.rows();
    for (std::size_t j = 0; j < targets.cols(); ++j) {
        Normalizer norm;
        norm.beta = params.floor_fraction * ranges[j].width();
        if (!(norm.beta > 0.0)) norm.beta = params.floor_fraction;
        const Vector pred = regressors[j].predict(latents);
        std::vector<double> log_res(static_cast<std::size_t>(n));
        bool all_zero = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = std::abs(targets(static_cast<std::size_t>(i), j) - pred(i));
            all_zero = all_zero && r == 0.0;
            log_res[static_cast<std::size_t>(i)] = std::log(r + params.log_guard);
        }
        if (all_zero) {
            norm.zero_residual = true;
        } else {
            norm.log_residual_model = RegressionTree::fit(ninp, log_res, params.tree);
        }
        out.push_back(std::move(norm));
    }
    return out;
}

Matrix nonconformity_scores(const std::vector<RegressionTree>& regressors, const std::vector<Normalizer>& normalizers,
                            const Matrix& latents, const Matrix& targets, const Matrix* normalizer_inputs) {
    const Matrix& ninp = normalizer_inputs ? *normalizer_inputs : latents;
    if (ninp.rows() != latents.rows()) throw DataError(kModule, "normalizer inputs and latents differ in rows");
    const auto d = static_cast<Eigen::Index>(regressors.size());
    if (targets.cols() != d || static_cast<Eigen::Index>(normalizers.size()) != d || latents.rows() != targets.rows())
        throw DataError(kModule, "score inputs have inconsistent shapes");
    Matrix scores(targets.rows(), d);
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        const auto h = row_span(latents, i);
        const auto z = row_span(ninp, i);
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto k = static_cast<std::size_t>(j);
            scores(i, j) = std::abs(targets(i, j) - regressors[k].predict(h)) / normalizers[k](z);
        }
    }
    return scores;
}

ConformalModel calibrate(std::vector<RegressionTree> regressors, std::vector<Normalizer> normalizers,
                         const std::vector<std::string>& names, const std::vector<FeatureRange>& ranges,
                         const Matrix& calibration_latents, const Matrix& calibration_targets, double alpha,
                         std::size_t proper_size, const Matrix* normalizer_inputs) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError(kModule, "alpha must lie in (0,1)");
    if (calibration_targets.rows() == 0) throw DataError(kModule, "calibration set is empty");
    if (names.size() != regressors.size() || ranges.size() != regressors.size())
        throw DataError(kModule, "one name and one range per feature are required");
    const Matrix scores = nonconformity_scores(regressors, normalizers, calibration_latents, calibration_targets, normalizer_inputs);
    ConformalModel model;
    model.alpha = alpha;
    model.calibration_size = static_cast<std::size_t>(calibration_targets.rows());
    model.proper_size = proper_size;
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        const Vector col = scores.col(static_cast<Eigen::Index>(j));
        FeatureConformal f;
        f.name = names[j];
        f.range = ranges[j];
        f.regressor = std::move(regressors[j]);
        f.normalizer = std::move(normalizers[j]);
        f.epsilon = critical_score({col.data(), static_cast<std::size_t>(col.size())}, alpha);
        if (f.epsilon.infinite)
            model.warnings.push_back("feature '" + f.name + "': calibration set too small for alpha " +
                                     std::to_string(alpha) + "; epsilon is infinite");
        if (f.normalizer.zero_residual)
            model.warnings.push_back("feature '" + f.name + "': all proper-training residuals are zero");
        model.features.push_back(std::move(f));
    }
    return model;
}

ConformalModel recalibrate(const ConformalModel& model, const Matrix& calibration_latents,
                           const Matrix& calibration_targets, double alpha, const Matrix* normalizer_inputs) {
    std::vector<RegressionTree> regs;
    std::vector<Normalizer> norms;
    std::vector<std::string> names;
    std::vector<FeatureRange> ranges;
    for (const auto& f : model.features) {
        regs.push_back(f.regressor);
        norms.push_back(f.normalizer);
        names.push_back(f.name);
        ranges.push_back(f.range);
    }
    return calibrate(std::move(regs), std::move(norms), names, ranges, calibration_latents, calibration_targets,
                     alpha, model.proper_size, normalizer_inputs);
}

IntervalSet predict_intervals(const ConformalModel& model, const Matrix& latents, const Matrix& observed,
                              const Matrix* normalizer_inputs) {
    const Matrix& ninp = normalizer_inputs ? *normalizer_inputs : latents;
    if (ninp.rows() != latents.rows()) throw DataError(kModule, "normalizer inputs and latents differ in rows");
    if (!model.calibrated()) throw UsageError(kModule, "conformal model is not calibrated");
    const auto d = static_cast<Eigen::Index>(model.features.size());
    if (observed.cols() != d) throw DataError(kModule, "observed data width does not match the model");
    if (latents.rows() != observed.rows()) throw DataError(kModule, "latent and observed row counts differ");
    IntervalSet set;
    const auto n = observed.rows();
    set.lower.resize(n, d);
    set.upper.resize(n, d);
    set.center.resize(n, d);
    set.sigma.resize(n, d);
    set.observed = observed;
    for (const auto& f : model.features) {
        set.names.push_back(f.name);
        set.ranges.push_back(f.range);
        set.epsilon.push_back(f.epsilon.value);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto h = row_span(latents, i);
        const auto z = row_span(ninp, i);
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto& f = model.features[static_cast<std::size_t>(j)];
            const double g = f.regressor.predict(h);
            const double s = f.normalizer(z);
            const double half = f.epsilon.value * s;
            set.center(i, j) = g;
            set.sigma(i, j) = s;
            set.lower(i, j) = g - half;
            set.upper(i, j) = g + half;
        }
    }
    return set;
}

}  // namespace datasuite
