#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "datasuite/pipeline.hpp"

namespace datasuite {

// Resolved settings of one CLI invocation. Built from a JSON document in which
// CLI flags have already been merged over the config file.
struct RunConfig {
    std::optional<std::string> train;
    std::optional<std::string> test;
    std::optional<std::string> model;  // previously written model.json
    std::optional<std::string> label;
    std::string output_dir = ".";
    double lambda = 0.5;
    std::vector<double> proportions;  // Cert_p / Uncert_p groups in reports
    PipelineOptions pipeline;
    std::optional<std::string> preset;  // synthetic experiment
    std::size_t seeds = 5;              // synth-bench repetitions: seed, seed+1, ...
    std::size_t top_k = 100;            // certain-top-k in synth-bench
    std::size_t forest_trees = 100;
};

std::vector<double> default_report_proportions();

// Keys: train, test, model, label, out, alpha, lambda, proper_fraction, truncation,
// augmentation, representer_fit, vine_order, latent_dim, normalizer_input, seed, proportions, preset,
// seeds, top_k, forest_trees. `seed` is mandatory; unknown keys are usage errors.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
// 16 hex digits of FNV-1a over the canonical JSON form of the config.
std::string config_hash(const RunConfig& c);

enum class Command { Fit, Intervals, Stratify, Metrics, SynthBench, LambdaSweep, Run };
const char* to_string(Command c);

struct CommandResult {
    std::vector<std::string> artifacts;
    nlohmann::json summary;
};

// Runs a subcommand and writes its artifacts under config.output_dir. On any
// error, artifacts written so far by this call are removed before rethrowing.
CommandResult run_command(Command command, const RunConfig& config);

struct SynthBenchSeed {
    std::uint64_t seed = 0;
    double baseline_mse = 0.0;
    double test_mse = 0.0;
    double certain_mse = 0.0;
    std::optional<double> inconsistent_mse;
    std::size_t inconsistent_count = 0;
    double clean_coverage = 0.0;        // pooled, unperturbed test rows
    double mean_delta_perturbed = 0.0;
    double mean_delta_clean = 0.0;
};

// One repetition of a synthetic preset: generate, perturb, fit, stratify and
// score the downstream regression against the clean target.
SynthBenchSeed synth_bench_seed(const std::string& preset, std::uint64_t seed, const PipelineOptions& options,
                                double lambda = 0.5, std::size_t top_k = 100);

struct LambdaPoint {
    double lambda = 0.0;
    std::size_t flagged = 0;
    std::optional<double> accuracy;
    std::optional<double> mse;
};

}  // namespace datasuite
