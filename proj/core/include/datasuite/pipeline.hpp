#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "datasuite/conformal.hpp"
#include "datasuite/dataset.hpp"
#include "datasuite/forest.hpp"
#include "datasuite/intervals.hpp"
#include "datasuite/representer.hpp"
#include "datasuite/stratify.hpp"
#include "datasuite/vine.hpp"

namespace datasuite {

// How the copula samples enter the augmented training set.
// None skips the generator entirely (ablation).
enum class AugmentationMode { Union, SyntheticOnly, None };

// What the per-feature normalizers see: the latent f(x) or the standardized features.
enum class NormalizerInput { Latent, Features };

const char* to_string(AugmentationMode m);
const char* to_string(NormalizerInput m);
NormalizerInput normalizer_input_from_string(const std::string& s);
AugmentationMode augmentation_mode_from_string(const std::string& s);

struct PipelineOptions {
    double alpha = 0.05;
    double proper_fraction = 2.0 / 3.0;
    std::optional<std::size_t> truncation;
    VineOrder vine_order = VineOrder::InputOrder;
    AugmentationMode augmentation = AugmentationMode::Union;
    bool representer_on_augmented = true;
    std::size_t latent_dim = 0;  // 0: max(1, d/2)
    TreeParams regressor_tree;
    NormalizerParams normalizer;
    NormalizerInput normalizer_input = NormalizerInput::Features;
    std::uint64_t seed = 0;
};

// Everything needed to score new data; serializable to a single JSON document.
struct FittedPipeline {
    PipelineOptions options;
    std::vector<std::string> input_columns;  // raw feature columns, label excluded
    OneHotEncoder encoder;
    std::vector<std::string> dropped;        // constant columns removed after encoding
    std::vector<FeatureColumn> features;     // encoded schema with training ranges
    std::optional<VineModel> vine;
    Representer representer;
    ConformalModel conformal;
    std::size_t train_rows = 0;
    std::size_t augmented_rows = 0;
    SplitIndices split;  // over the augmented set; not serialized

    std::vector<std::string> feature_names() const;
    std::vector<FeatureRange> ranges() const;
};

// Derives an independent stream seed; stream ids are fixed per pipeline stage.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

FittedPipeline fit_pipeline(const TabularDataset& train, const PipelineOptions& options);

struct PreparedData {
    TabularDataset data;  // encoded and aligned with FittedPipeline::features
    std::size_t unseen_levels = 0;
};

PreparedData prepare(const FittedPipeline& fitted, const TabularDataset& raw);
IntervalSet predict(const FittedPipeline& fitted, const TabularDataset& prepared);
// CSV kind hints so test files parse categorical columns the same way as training.
CsvSchema csv_schema(const FittedPipeline& fitted);

nlohmann::json to_json(const FittedPipeline& fitted);
FittedPipeline fitted_pipeline_from_json(const nlohmann::json& j);

// Class labels extracted from a column. String levels are indexed in sorted order;
// numeric labels must be integral.
struct LabelColumn {
    std::vector<int> labels;
    std::vector<std::string> levels;  // empty for numeric labels
};
std::pair<TabularDataset, LabelColumn> split_label(const TabularDataset& ds, const std::string& column,
                                                   const std::vector<std::string>& levels = {});

}  // namespace datasuite
