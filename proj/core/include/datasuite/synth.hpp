#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "datasuite/dataset.hpp"

namespace datasuite {

enum class NoiseFamily { Normal, Beta, Gamma, Weibull };

const char* to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

struct SynthConfig {
    std::size_t rows = 1000;  // per split
    Vector mean;
    Matrix covariance;
    double proportion = 0.5;  // fraction of perturbed test rows
    double variance = 2.0;    // noise variance
    NoiseFamily family = NoiseFamily::Normal;
    std::uint64_t seed = 0;
};

// The three-feature Gaussian used throughout the synthetic study.
SynthConfig default_synth_config();

// Named experiment presets: Da_p10, Da_p25, Da_p50, Da_p75, Db_v1, Db_v2, Db_v3,
// Dc_beta, Dc_gamma, Dc_normal, Dc_weibull. The variance level of each preset is a
// noise scale: the noise variance is level^2.
SynthConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

struct SynthSplits {
    TabularDataset train;
    TabularDataset test;
};

SynthSplits generate_gaussian(const SynthConfig& config);

struct Perturbation {
    TabularDataset data;
    std::vector<bool> mask;  // true for perturbed rows

    IndexList perturbed_rows() const;
    IndexList clean_rows() const;
};

// Additive noise on every feature of ceil(p n) randomly chosen rows. Each noise
// family is centred to mean 0 and scaled to `config.variance`.
Perturbation perturb(const TabularDataset& ds, const SynthConfig& config);

// Draws `n` zero-mean, unit-variance noise values from a family (test hook).
std::vector<double> standardized_noise(NoiseFamily family, std::size_t n, std::uint64_t seed);

struct LinearModel {
    Vector coefficients;  // intercept first
    double predict(std::span<const double> inputs) const;
};

// Ordinary least squares of the last column on the preceding ones (X1, X2 -> X3).
LinearModel fit_downstream_regression(const TabularDataset& train);

double downstream_regression_mse(const TabularDataset& train, const TabularDataset& eval);
// Scores predictions from eval's inputs against an explicit target vector.
double downstream_regression_mse(const LinearModel& model, const TabularDataset& eval, std::span<const double> target,
                                 std::optional<IndexList> rows = std::nullopt);

}  // namespace datasuite
