#include "datasuite/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "datasuite/error.hpp"
#include "datasuite/serialization.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "cli";

enum Stream : std::uint64_t { kVineSample = 1, kSplit = 2 };

using Json = nlohmann::json;

// Rows fed to the normalizers; empty when they use the latents.
std::optional<Matrix> normalizer_matrix(const PipelineOptions& o, const Representer& rep, const TabularDataset& ds) {
    if (o.normalizer_input == NormalizerInput::Latent) return std::nullopt;
    return standardize(ds, rep.standardization).data.values();
}

const Matrix* ptr(const std::optional<Matrix>& m) { return m ? &*m : nullptr; }

}  // namespace

const char* to_string(AugmentationMode m) {
    switch (m) {
        case AugmentationMode::Union: return "union";
        case AugmentationMode::SyntheticOnly: return "synthetic-only";
        case AugmentationMode::None: return "none";
    }
    return "union";
}

AugmentationMode augmentation_mode_from_string(const std::string& s) {
    if (s == "union") return AugmentationMode::Union;
    if (s == "synthetic-only") return AugmentationMode::SyntheticOnly;
    if (s == "none") return AugmentationMode::None;
    throw UsageError(kModule, "unknown augmentation mode '" + s + "' (expected union, synthetic-only or none)");
}

const char* to_string(NormalizerInput m) { return m == NormalizerInput::Features ? "features" : "latent"; }

NormalizerInput normalizer_input_from_string(const std::string& s) {
    if (s == "latent") return NormalizerInput::Latent;
    if (s == "features") return NormalizerInput::Features;
    throw UsageError(kModule, "unknown normalizer input '" + s + "' (expected latent or features)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over seed and stream
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::string> FittedPipeline::feature_names() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

std::vector<FeatureRange> FittedPipeline::ranges() const {
    std::vector<FeatureRange> out;
    for (const auto& f : features) out.push_back(f.range);
    return out;
}

FittedPipeline fit_pipeline(const TabularDataset& train, const PipelineOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw UsageError(kModule, "alpha must lie in (0, 1)");
    if (!(options.proper_fraction > 0.0 && options.proper_fraction < 1.0))
        throw UsageError(kModule, "proper_fraction must lie in (0, 1)");
    if (train.rows() == 0) throw DataError(kModule, "training set is empty");

    FittedPipeline fp;
    fp.options = options;
    fp.input_columns = train.column_names();
    fp.train_rows = train.rows();
    fp.encoder = OneHotEncoder::fit(train);
    auto [encoded, dropped] = drop_constant_columns(fp.encoder.transform(train).data);
    fp.dropped = std::move(dropped);
    if (encoded.cols() == 0) throw DataError(kModule, "no non-constant features remain after encoding");
    const auto ranges = feature_ranges(encoded);
    encoded = encoded.with_ranges(ranges);
    fp.features = encoded.columns();

    TabularDataset augmented = encoded;
    if (options.augmentation != AugmentationMode::None) {
        VineFitOptions vo;
        vo.order = options.vine_order;
        vo.truncation = options.truncation;
        fp.vine = fit_dvine(encoded, vo);
        auto synthetic = sample_dvine(*fp.vine, encoded, encoded.rows(), derive_seed(options.seed, kVineSample));
        augmented = options.augmentation == AugmentationMode::Union ? encoded.concat_rows(synthetic) : synthetic;
    }
    fp.augmented_rows = augmented.rows();

    fp.representer = fit_representer(options.representer_on_augmented ? augmented : encoded, options.latent_dim);
    fp.split = split_indices(augmented.rows(), {options.proper_fraction, derive_seed(options.seed, kSplit)});
    const auto proper = augmented.select_rows(fp.split.proper);
    const auto calib = augmented.select_rows(fp.split.calibration);
    const Matrix lp = transform(fp.representer, proper);
    auto regs = fit_feature_regressors(lp, proper, options.regressor_tree);
    const auto zp = normalizer_matrix(options, fp.representer, proper);
    auto norms = fit_normalizers(lp, proper, regs, ranges, options.normalizer, ptr(zp));
    const auto zc = normalizer_matrix(options, fp.representer, calib);
    fp.conformal = calibrate(std::move(regs), std::move(norms), encoded.column_names(), ranges,
                             transform(fp.representer, calib), calib.values(), options.alpha, proper.rows(), ptr(zc));
    return fp;
}

PreparedData prepare(const FittedPipeline& fitted, const TabularDataset& raw) {
    std::vector<std::size_t> keep;
    for (const auto& name : fitted.input_columns) {
        auto j = raw.find_column(name);
        if (!j) throw DataError(kModule, "input is missing column '" + name + "'");
        keep.push_back(*j);
    }
    auto enc = fitted.encoder.transform(raw.select_columns(keep));
    std::vector<std::size_t> cols;
    for (const auto& f : fitted.features) {
        auto j = enc.data.find_column(f.name);
        if (!j) throw DataError(kModule, "encoded input is missing feature '" + f.name + "'");
        cols.push_back(*j);
    }
    PreparedData out{enc.data.select_columns(cols).with_ranges(fitted.ranges()), enc.unseen_levels};
    return out;
}

IntervalSet predict(const FittedPipeline& fitted, const TabularDataset& prepared) {
    if (prepared.column_names() != fitted.feature_names())
        throw DataError(kModule, "prepared data does not match the fitted feature schema");
    const auto z = normalizer_matrix(fitted.options, fitted.representer, prepared);
    return predict_intervals(fitted.conformal, transform(fitted.representer, prepared), prepared.values(), ptr(z));
}

CsvSchema csv_schema(const FittedPipeline& fitted) {
    CsvSchema s;
    for (const auto& [col, levels] : fitted.encoder.levels) s.kinds[col] = ColumnKind::Categorical;
    for (const auto& name : fitted.input_columns)
        if (!s.kinds.count(name)) s.kinds[name] = ColumnKind::Continuous;
    return s;
}

Json to_json(const FittedPipeline& fp) {
    const auto& o = fp.options;
    Json opts{{"alpha", o.alpha},
              {"proper_fraction", o.proper_fraction},
              {"truncation", o.truncation ? Json(*o.truncation) : Json(nullptr)},
              {"vine_order", o.vine_order == VineOrder::MaxTauChain ? "max-tau" : "input"},
              {"augmentation", to_string(o.augmentation)},
              {"representer_on_augmented", o.representer_on_augmented},
              {"latent_dim", o.latent_dim},
              {"regressor_tree", {{"max_depth", o.regressor_tree.max_depth},
                                  {"min_samples_split", o.regressor_tree.min_samples_split},
                                  {"min_samples_leaf", o.regressor_tree.min_samples_leaf}}},
              {"normalizer", {{"log_guard", o.normalizer.log_guard},
                              {"floor_fraction", o.normalizer.floor_fraction},
                              {"max_depth", o.normalizer.tree.max_depth},
                              {"min_samples_split", o.normalizer.tree.min_samples_split},
                              {"min_samples_leaf", o.normalizer.tree.min_samples_leaf}}},
              {"normalizer_input", to_string(o.normalizer_input)},
              {"seed", o.seed}};
    Json enc = Json::array();
    for (const auto& [col, levels] : fp.encoder.levels) enc.push_back(Json{{"column", col}, {"levels", levels}});
    Json feats = Json::array();
    for (const auto& f : fp.features) {
        Json fj{{"name", f.name}, {"kind", to_string(f.kind)}, {"range", {f.range.lower, f.range.upper}}};
        if (f.source) fj["source"] = {{"column", f.source->column}, {"level", f.source->level}};
        feats.push_back(std::move(fj));
    }
    return Json{{"options", opts},
                {"input_columns", fp.input_columns},
                {"encoder", enc},
                {"dropped", fp.dropped},
                {"features", feats},
                {"vine", fp.vine ? json::to_json(*fp.vine) : Json(nullptr)},
                {"representer", json::to_json(fp.representer)},
                {"conformal", json::to_json(fp.conformal)},
                {"train_rows", fp.train_rows},
                {"augmented_rows", fp.augmented_rows}};
}

FittedPipeline fitted_pipeline_from_json(const Json& j) {
    try {
        FittedPipeline fp;
        const auto& o = j.at("options");
        fp.options.alpha = o.at("alpha").get<double>();
        fp.options.proper_fraction = o.at("proper_fraction").get<double>();
        if (!o.at("truncation").is_null()) fp.options.truncation = o.at("truncation").get<std::size_t>();
        fp.options.vine_order = o.at("vine_order").get<std::string>() == "max-tau" ? VineOrder::MaxTauChain
                                                                                  : VineOrder::InputOrder;
        fp.options.augmentation = augmentation_mode_from_string(o.at("augmentation").get<std::string>());
        fp.options.representer_on_augmented = o.at("representer_on_augmented").get<bool>();
        fp.options.latent_dim = o.at("latent_dim").get<std::size_t>();
        const auto& rt = o.at("regressor_tree");
        fp.options.regressor_tree = {rt.at("max_depth").get<std::size_t>(), rt.at("min_samples_split").get<std::size_t>(),
                                     rt.at("min_samples_leaf").get<std::size_t>()};
        const auto& nt = o.at("normalizer");
        fp.options.normalizer.log_guard = nt.at("log_guard").get<double>();
        fp.options.normalizer.floor_fraction = nt.at("floor_fraction").get<double>();
        fp.options.normalizer.tree = {nt.at("max_depth").get<std::size_t>(), nt.at("min_samples_split").get<std::size_t>(),
                                      nt.at("min_samples_leaf").get<std::size_t>()};
        fp.options.normalizer_input = normalizer_input_from_string(o.value("normalizer_input", "features"));
        fp.options.seed = o.at("seed").get<std::uint64_t>();
        fp.input_columns = j.at("input_columns").get<std::vector<std::string>>();
        for (const auto& e : j.at("encoder"))
            fp.encoder.levels.emplace_back(e.at("column").get<std::string>(),
                                           e.at("levels").get<std::vector<std::string>>());
        fp.dropped = j.at("dropped").get<std::vector<std::string>>();
        for (const auto& fj : j.at("features")) {
            FeatureColumn f;
            f.name = fj.at("name").get<std::string>();
            f.kind = column_kind_from_string(fj.at("kind").get<std::string>());
            const auto r = fj.at("range").get<std::vector<double>>();
            if (r.size() != 2) throw DataError(kModule, "feature range must have two entries");
            f.range = {r[0], r[1]};
            if (fj.contains("source"))
                f.source = CategorySource{fj["source"].at("column").get<std::string>(),
                                          fj["source"].at("level").get<std::string>()};
            fp.features.push_back(std::move(f));
        }
        if (!j.at("vine").is_null()) fp.vine = json::vine_from_json(j.at("vine"));
        fp.representer = json::representer_from_json(j.at("representer"));
        fp.conformal = json::conformal_from_json(j.at("conformal"));
        fp.train_rows = j.at("train_rows").get<std::size_t>();
        fp.augmented_rows = j.at("augmented_rows").get<std::size_t>();
        if (fp.conformal.features.size() != fp.features.size())
            throw DataError(kModule, "model document has inconsistent feature counts");
        return fp;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(kModule, std::string("malformed model document: ") + e.what());
    }
}

std::pair<TabularDataset, LabelColumn> split_label(const TabularDataset& ds, const std::string& column,
                                                   const std::vector<std::string>& levels) {
    auto j = ds.find_column(column);
    if (!j) throw DataError(kModule, "label column '" + column + "' not found");
    LabelColumn out;
    const auto n = ds.rows();
    out.labels.resize(n);
    if (ds.column(*j).kind == ColumnKind::Categorical) {
        const auto& cells = ds.categories().at(*j);
        if (levels.empty()) {
            std::set<std::string> s(cells.begin(), cells.end());
            out.levels.assign(s.begin(), s.end());
        } else {
            out.levels = levels;
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto it = std::find(out.levels.begin(), out.levels.end(), cells[i]);
            if (it == out.levels.end())
                throw DataError(kModule, "row " + std::to_string(i + 1) + ": unknown label '" + cells[i] + "'");
            out.labels[i] = static_cast<int>(it - out.levels.begin());
        }
    } else {
        if (!levels.empty()) throw DataError(kModule, "label column is numeric here but categorical in training");
        for (std::size_t i = 0; i < n; ++i) {
            const double v = ds(i, *j);
            if (v != std::round(v) || std::abs(v) > 1e9)
                throw DataError(kModule, "row " + std::to_string(i + 1) + ": label is not an integer");
            out.labels[i] = static_cast<int>(v);
        }
    }
    return {ds.drop_column(column), std::move(out)};
}

}  // namespace datasuite
