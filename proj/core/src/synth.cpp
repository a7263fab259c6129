#include "datasuite/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "synth";

// Independent streams for generation and perturbation derived from one seed.
constexpr std::uint64_t kTrainStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTestStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kNoiseStream = 0x94d049bb133111ebULL;

std::vector<FeatureColumn> numbered_columns(std::size_t d) {
    std::vector<FeatureColumn> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j].name = "X" + std::to_string(j + 1);
    return cols;
}

Matrix draw_gaussian(const Vector& mean, const Eigen::MatrixXd& lower, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto d = mean.size();
    Matrix x(static_cast<Eigen::Index>(n), d);
    Vector z(d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng);
        x.row(i) = (mean + lower * z).transpose();
    }
    return x;
}

}  // namespace

const char* to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Normal: return "normal";
        case NoiseFamily::Beta: return "beta";
        case NoiseFamily::Gamma: return "gamma";
        case NoiseFamily::Weibull: return "weibull";
    }
    return "normal";
}

NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "normal") return NoiseFamily::Normal;
    if (s == "beta") return NoiseFamily::Beta;
    if (s == "gamma") return NoiseFamily::Gamma;
    if (s == "weibull") return NoiseFamily::Weibull;
    throw UsageError(kModule, "unknown noise family '" + s + "'");
}

SynthConfig default_synth_config() {
    SynthConfig c;
    c.mean = Vector(3);
    c.mean << 5.0, 0.0, 10.0;
    c.covariance = Matrix(3, 3);
    c.covariance << 3.40, -2.75, -2.00,  //
        -2.75, 5.50, 1.50,               //
        -2.00, 1.50, 1.25;
    return c;
}

std::vector<std::string> preset_names() {
    return {"Da_p10", "Da_p25", "Da_p50", "Da_p75", "Db_v1", "Db_v2", "Db_v3",
            "Dc_beta", "Dc_gamma", "Dc_normal", "Dc_weibull"};
}

SynthConfig preset_config(const std::string& name) {
    SynthConfig c = default_synth_config();
    auto level = [&](double proportion, double scale, NoiseFamily family) {
        c.proportion = proportion;
        c.variance = scale * scale;
        c.family = family;
        return c;
    };
    if (name == "Da_p10") return level(0.10, 2.0, NoiseFamily::Normal);
    if (name == "Da_p25") return level(0.25, 2.0, NoiseFamily::Normal);
    if (name == "Da_p50") return level(0.50, 2.0, NoiseFamily::Normal);
    if (name == "Da_p75") return level(0.75, 2.0, NoiseFamily::Normal);
    if (name == "Db_v1") return level(0.5, 1.0, NoiseFamily::Normal);
    if (name == "Db_v2") return level(0.5, 2.0, NoiseFamily::Normal);
    if (name == "Db_v3") return level(0.5, 3.0, NoiseFamily::Normal);
    if (name == "Dc_beta") return level(0.5, 2.0, NoiseFamily::Beta);
    if (name == "Dc_gamma") return level(0.5, 2.0, NoiseFamily::Gamma);
    if (name == "Dc_normal") return level(0.5, 2.0, NoiseFamily::Normal);
    if (name == "Dc_weibull") return level(0.5, 2.0, NoiseFamily::Weibull);
    throw UsageError(kModule, "unknown synthetic preset '" + name + "'");
}

SynthSplits generate_gaussian(const SynthConfig& config) {
    const auto d = config.mean.size();
    if (d < 1 || config.covariance.rows() != d || config.covariance.cols() != d)
        throw UsageError(kModule, "mean and covariance dimensions disagree");
    if (!config.covariance.isApprox(config.covariance.transpose(), 1e-12))
        throw UsageError(kModule, "covariance is not symmetric");
    if (config.rows == 0) throw UsageError(kModule, "row count must be positive");
    Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(config.covariance));
    if (llt.info() != Eigen::Success) throw UsageError(kModule, "covariance is not positive definite");
    const Eigen::MatrixXd lower = llt.matrixL();
    auto cols = numbered_columns(static_cast<std::size_t>(d));
    return {TabularDataset("synth-train", cols, draw_gaussian(config.mean, lower, config.rows, config.seed ^ kTrainStream)),
            TabularDataset("synth-test", cols, draw_gaussian(config.mean, lower, config.rows, config.seed ^ kTestStream))};
}

std::vector<double> standardized_noise(NoiseFamily family, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    switch (family) {
        case NoiseFamily::Normal: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (auto& v : out) v = dist(rng);
            break;
        }
        case NoiseFamily::Gamma: {
            // shape 2, scale 1: mean 2, variance 2
            std::gamma_distribution<double> dist(2.0, 1.0);
            for (auto& v : out) v = (dist(rng) - 2.0) / std::sqrt(2.0);
            break;
        }
        case NoiseFamily::Weibull: {
            const double k = 1.5;
            const double m = std::tgamma(1.0 + 1.0 / k);
            const double s = std::sqrt(std::tgamma(1.0 + 2.0 / k) - m * m);
            std::weibull_distribution<double> dist(k, 1.0);
            for (auto& v : out) v = (dist(rng) - m) / s;
            break;
        }
        case NoiseFamily::Beta: {
            // Beta(2,2) via two gammas: mean 1/2, variance 1/20
            std::gamma_distribution<double> g(2.0, 1.0);
            const double s = std::sqrt(0.05);
            for (auto& v : out) {
                const double a = g(rng);
                const double b = g(rng);
                v = (a / (a + b) - 0.5) / s;
            }
            break;
        }
    }
    return out;
}

IndexList Perturbation::perturbed_rows() const {
    IndexList out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

IndexList Perturbation::clean_rows() const {
    IndexList out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!mask[i]) out.push_back(i);
    return out;
}

Perturbation perturb(const TabularDataset& ds, const SynthConfig& config) {
    if (!(config.proportion >= 0.0 && config.proportion <= 1.0))
        throw UsageError(kModule, "perturbation proportion must lie in [0,1]");
    if (!(config.variance > 0.0)) throw UsageError(kModule, "perturbation variance must be positive");
    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();
    const auto count = static_cast<std::size_t>(std::ceil(config.proportion * static_cast<double>(n) - 1e-9));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(config.seed ^ kNoiseStream);
    std::shuffle(perm.begin(), perm.end(), rng);
    Perturbation out;
    out.mask.assign(n, false);
    for (std::size_t k = 0; k < count; ++k) out.mask[perm[k]] = true;
    Matrix v = ds.values();
    const auto noise = standardized_noise(config.family, count * d, rng());
    const double scale = std::sqrt(config.variance);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.mask[i]) continue;
        for (std::size_t j = 0; j < d; ++j)
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += scale * noise[k++];
    }
    out.data = ds.with_values(std::move(v));
    return out;
}

double LinearModel::predict(std::span<const double> inputs) const {
    double y = coefficients(0);
    for (std::size_t j = 0; j < inputs.size(); ++j) y += coefficients(static_cast<Eigen::Index>(j + 1)) * inputs[j];
    return y;
}

LinearModel fit_downstream_regression(const TabularDataset& train) {
    if (train.cols() < 2) throw DataError(kModule, "downstream regression needs inputs and a target column");
    const auto n = static_cast<Eigen::Index>(train.rows());
    const auto p = static_cast<Eigen::Index>(train.cols() - 1);
    Eigen::MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = train.values().leftCols(p);
    const Eigen::VectorXd y = train.values().col(p);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < p + 1) throw NumericalError(kModule, "downstream regression design matrix is singular");
    return {qr.solve(y)};
}

double downstream_regression_mse(const LinearModel& model, const TabularDataset& eval, std::span<const double> target,
                                 std::optional<IndexList> rows) {
    if (target.size() != eval.rows()) throw DataError(kModule, "target length does not match evaluation rows");
    IndexList idx;
    if (rows) {
        idx = *rows;
    } else {
        idx.resize(eval.rows());
        std::iota(idx.begin(), idx.end(), 0);
    }
    if (idx.empty()) return std::nan("");
    const auto p = static_cast<std::size_t>(model.coefficients.size() - 1);
    double sse = 0.0;
    for (auto i : idx) {
        const auto row = eval.values().row(static_cast<Eigen::Index>(i));
        const double r = target[i] - model.predict({row.data(), p});
        sse += r * r;
    }
    return sse / static_cast<double>(idx.size());
}

double downstream_regression_mse(const TabularDataset& train, const TabularDataset& eval) {
    if (eval.cols() != train.cols()) throw DataError(kModule, "train and eval widths differ");
    const auto model = fit_downstream_regression(train);
    const Vector y = eval.column_values(eval.cols() - 1);
    return downstream_regression_mse(model, eval, {y.data(), static_cast<std::size_t>(y.size())});
}

}  // namespace datasuite
