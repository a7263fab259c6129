#include "datasuite/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "datasuite/error.hpp"
#include "datasuite/metrics.hpp"
#include "datasuite/serialization.hpp"
#include "datasuite/synth.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "cli";

using Json = nlohmann::json;
namespace fs = std::filesystem;

enum Stream : std::uint64_t { kForest = 5, kRandomControl = 6, kRegressionSplit = 7 };

const std::set<std::string> kConfigKeys{
    "train", "test", "model", "label", "out", "alpha", "lambda", "proper_fraction", "truncation", "augmentation",
    "representer_fit", "vine_order", "latent_dim", "normalizer_input", "seed", "proportions", "preset", "seeds", "top_k", "forest_trees"};

template <class T>
T get(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw UsageError(kModule, std::string("config key '") + key + "' has the wrong type");
    }
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return get<std::string>(j, key);
}

Json opt_json(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }
Json opt_json(const std::optional<double>& v) { return v && std::isfinite(*v) ? Json(*v) : Json(nullptr); }

// Removes every registered file unless commit() was reached.
class ArtifactSet {
public:
    explicit ArtifactSet(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw DataError(kModule, "cannot create output directory '" + dir + "': " + ec.message());
    }
    ArtifactSet(const ArtifactSet&) = delete;
    ArtifactSet& operator=(const ArtifactSet&) = delete;
    ~ArtifactSet() {
        if (committed_) return;
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
    std::string add(const std::string& name) {
        auto p = (fs::path(dir_) / name).string();
        written_.push_back(p);
        return p;
    }
    std::vector<std::string> commit() {
        committed_ = true;
        return written_;
    }

private:
    std::string dir_;
    std::vector<std::string> written_;
    bool committed_ = false;
};

Json header(const RunConfig& cfg, Command cmd) {
    return Json{{"command", to_string(cmd)},
                {"config", to_json(cfg)},
                {"config_hash", config_hash(cfg)},
                {"seed", cfg.pipeline.seed}};
}

// Prefixes a CSV with a comment line naming the config hash and seed.
void stamp_csv(const std::string& path, const RunConfig& cfg) {
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    in.close();
    std::ofstream out(path, std::ios::trunc);
    out << "# config_hash=" << config_hash(cfg) << " seed=" << cfg.pipeline.seed << '\n' << body.str();
    if (!out) throw DataError(kModule, "write failure on '" + path + "'");
}

double mean_of(const std::vector<double>& v, const IndexList& rows) {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (auto i : rows) s += v[i];
    return s / static_cast<double>(rows.size());
}

struct Session {
    const RunConfig& cfg;
    std::optional<TabularDataset> train;
    std::optional<LabelColumn> train_labels;
    std::optional<TabularDataset> test;
    std::optional<LabelColumn> test_labels;
    std::optional<FittedPipeline> fitted;
    std::optional<std::vector<std::string>> label_levels;
    std::optional<PreparedData> prepared;
    std::optional<IntervalSet> intervals;
    std::optional<StratificationReport> report;

    explicit Session(const RunConfig& c) : cfg(c) {}

    bool load_train() {
        if (train) return true;
        if (!cfg.train) return false;
        auto raw = load_csv(*cfg.train);
        if (cfg.label) {
            auto [x, y] = split_label(raw, *cfg.label);
            train = std::move(x);
            label_levels = y.levels;
            train_labels = std::move(y);
        } else {
            train = std::move(raw);
        }
        return true;
    }

    const FittedPipeline& model() {
        if (fitted) return *fitted;
        if (cfg.model) {
            const Json doc = json::read_file(*cfg.model);
            if (!doc.contains("model")) throw DataError(kModule, "'" + *cfg.model + "' is not a model document");
            fitted = fitted_pipeline_from_json(doc.at("model"));
            if (doc.contains("label_levels") && !doc["label_levels"].is_null())
                label_levels = doc["label_levels"].get<std::vector<std::string>>();
            return *fitted;
        }
        if (!load_train()) throw UsageError(kModule, "no model available: pass --model or --train");
        fitted = fit_pipeline(*train, cfg.pipeline);
        return *fitted;
    }

    const TabularDataset& test_data() {
        if (test) return *test;
        if (!cfg.test) throw UsageError(kModule, "this command needs --test");
        auto schema = csv_schema(model());
        if (cfg.label) {
            schema.kinds.erase(*cfg.label);
            if (label_levels && !label_levels->empty()) schema.kinds[*cfg.label] = ColumnKind::Categorical;
        }
        auto raw = load_csv(*cfg.test, schema);
        if (cfg.label && raw.find_column(*cfg.label)) {
            auto [x, y] = split_label(raw, *cfg.label, label_levels.value_or(std::vector<std::string>{}));
            test = std::move(x);
            test_labels = std::move(y);
        } else {
            test = std::move(raw);
        }
        return *test;
    }

    const PreparedData& prepared_test() {
        if (!prepared) prepared = prepare(model(), test_data());
        return *prepared;
    }

    const IntervalSet& interval_set() {
        if (!intervals) intervals = predict(model(), prepared_test().data);
        return *intervals;
    }

    const StratificationReport& stratification() {
        if (!report) report = build_report(interval_set(), cfg.lambda, cfg.proportions);
        return *report;
    }

    // Group at p = 0.1 when requested, else the first requested proportion.
    const CertaintyGroups* display_group() {
        const auto& r = stratification();
        if (r.groups.empty()) return nullptr;
        for (const auto& g : r.groups)
            if (std::abs(g.proportion - 0.1) < 1e-12) return &g;
        return &r.groups.front();
    }

    bool has_labels() { return cfg.label && load_train() && train_labels && (test_data(), test_labels.has_value()); }
};

Json vine_summary(const VineModel& v) {
    std::map<std::string, std::size_t> families;
    for (const auto& t : v.trees)
        for (const auto& c : t) ++families[c.independent ? "independence" : to_string(c.family)];
    return Json{{"order", v.order},
                {"trees", v.trees.size()},
                {"pairs", v.pair_count()},
                {"independent_pairs", v.independent_pair_count()},
                {"families", families}};
}

void do_fit(Session& s, ArtifactSet& art, Json& summary) {
    if (!s.load_train()) throw UsageError(kModule, "fit needs --train");
    const auto& fp = s.model();
    Json doc = header(s.cfg, Command::Fit);
    doc["model"] = to_json(fp);
    doc["label_levels"] = s.label_levels ? Json(*s.label_levels) : Json(nullptr);
    json::write_file(art.add("model.json"), doc);

    Json rep = header(s.cfg, Command::Fit);
    std::vector<std::string> warnings;
    if (fp.vine) warnings.insert(warnings.end(), fp.vine->warnings.begin(), fp.vine->warnings.end());
    warnings.insert(warnings.end(), fp.representer.warnings.begin(), fp.representer.warnings.end());
    warnings.insert(warnings.end(), fp.conformal.warnings.begin(), fp.conformal.warnings.end());
    Json eps = Json::object();
    for (const auto& f : fp.conformal.features)
        eps[f.name] = f.epsilon.infinite ? Json(nullptr) : Json(f.epsilon.value);
    std::vector<std::string> encoded;
    for (const auto& f : fp.features)
        if (f.kind == ColumnKind::OneHotDerived) encoded.push_back(f.name);
    rep["train_rows"] = fp.train_rows;
    rep["augmented_rows"] = fp.augmented_rows;
    rep["proper_rows"] = fp.conformal.proper_size;
    rep["calibration_rows"] = fp.conformal.calibration_size;
    rep["features"] = fp.feature_names();
    rep["encoded_columns"] = encoded;
    rep["dropped_columns"] = fp.dropped;
    rep["vine"] = fp.vine ? vine_summary(*fp.vine) : Json(nullptr);
    rep["latent_dim"] = fp.representer.latent_dim;
    rep["explained_variance_ratio"] = fp.representer.explained_variance_ratio(fp.representer.latent_dim);
    rep["epsilon"] = eps;
    rep["warnings"] = warnings;
    json::write_file(art.add("fit_report.json"), rep);
    summary["features"] = fp.features.size();
    summary["warnings"] = warnings.size();
}

void do_intervals(Session& s, ArtifactSet& art, Json& summary) {
    const auto& set = s.interval_set();
    const auto path = art.add("intervals.csv");
    write_intervals_csv(path, set);
    stamp_csv(path, s.cfg);
    Json doc = header(s.cfg, Command::Intervals);
    doc["instances"] = set.instances();
    doc["features"] = set.names;
    doc["unseen_levels"] = s.prepared_test().unseen_levels;
    doc["quality"] = json::to_json(interval_quality(set));
    json::write_file(art.add("intervals.json"), doc);
    summary["instances"] = set.instances();
}

void do_stratify(Session& s, ArtifactSet& art, Json& summary) {
    const auto& report = s.stratification();
    const auto& data = s.prepared_test().data;
    Json doc = header(s.cfg, Command::Stratify);
    doc["report"] = json::to_json(report);
    if (const auto* g = s.display_group()) {
        const auto labels = group_labels(report, *g);
        std::map<std::string, std::size_t> counts;
        for (const auto& l : labels) ++counts[l];
        doc["display_proportion"] = g->proportion;
        doc["label_counts"] = counts;
        std::vector<std::pair<std::string, IndexList>> groups{{"certain", g->certain}, {"uncertain", g->uncertain}};
        if (report.inconsistency.flagged_count() > 0)
            groups.emplace_back("inconsistent", report.inconsistency.flagged_indices());
        std::optional<TabularDataset> reference;
        if (s.load_train()) reference = prepare(s.model(), *s.train).data;
        doc["prototypes"] = json::to_json(prototypes(data, groups, reference ? &*reference : nullptr));
        if (s.model().representer.input_dim() >= 2) {
            const auto path = art.add("projection.csv");
            write_projection_csv(path, project_2d(s.model().representer, data, labels));
            stamp_csv(path, s.cfg);
        }
    }
    json::write_file(art.add("stratification.json"), doc);
    const auto path = art.add("ranking.csv");
    write_ranking_csv(path, report);
    stamp_csv(path, s.cfg);
    summary["inconsistent"] = report.inconsistency.flagged_count();
}

struct Downstream {
    TreeEnsembleClassifier clf;
    std::vector<int> predicted;
};

Downstream fit_downstream(Session& s) {
    ForestParams fp;
    fp.trees = s.cfg.forest_trees;
    const auto train_x = prepare(s.model(), *s.train).data.values();
    auto clf = fit_classifier(train_x, s.train_labels->labels, derive_seed(s.cfg.pipeline.seed, kForest), fp);
    auto pred = clf.predict(s.prepared_test().data.values());
    return {std::move(clf), std::move(pred)};
}

void do_metrics(Session& s, ArtifactSet& art, Json& summary) {
    const auto quality = interval_quality(s.interval_set());
    Json doc = header(s.cfg, Command::Metrics);
    doc["quality"] = json::to_json(quality);
    summary["coverage"] = quality.pooled.coverage;
    if (s.has_labels()) {
        const auto ds = fit_downstream(s);
        const auto& y = s.test_labels->labels;
        const auto& report = s.stratification();
        const auto acc = evaluate_stratification(ds.clf, s.prepared_test().data.values(), y, report, s.cfg.proportions,
                                                 derive_seed(s.cfg.pipeline.seed, kRandomControl));
        const SubsetAccuracy fn = [&](const IndexList& rows) -> std::optional<double> {
            if (rows.empty()) return std::nullopt;
            return accuracy(ds.predicted, y, rows);
        };
        const auto m = mpi(fn, report.ranking);
        doc["accuracy"] = json::to_json(acc);
        doc["mpi"] = json::to_json(m);
        const auto path = art.add("accuracy_curve.csv");
        write_accuracy_curve_csv(path, acc);
        stamp_csv(path, s.cfg);
        summary["mpi"] = m.mpi;
    }
    json::write_file(art.add("metrics.json"), doc);
}

std::vector<double> sweep_lambdas() {
    std::vector<double> out;
    for (int k = 0; k <= 10; ++k) out.push_back(k / 10.0);
    return out;
}

void write_sweep_csv(const std::string& path, const std::vector<LambdaPoint>& pts) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f.precision(17);
    f << "lambda,flagged_count,accuracy,mse\n";
    for (const auto& p : pts) {
        f << p.lambda << ',' << p.flagged << ',';
        if (p.accuracy) f << *p.accuracy;
        f << ',';
        if (p.mse) f << *p.mse;
        f << '\n';
    }
    if (!f) throw DataError(kModule, "write failure on '" + path + "'");
}

void do_lambda_sweep(Session& s, ArtifactSet& art, Json& summary) {
    std::vector<LambdaPoint> pts;
    if (s.cfg.preset) {
        auto sc = preset_config(*s.cfg.preset);
        sc.seed = s.cfg.pipeline.seed;
        const auto splits = generate_gaussian(sc);
        const auto pert = perturb(splits.test, sc);
        const auto fp = fit_pipeline(splits.train, s.cfg.pipeline);
        const auto set = predict(fp, prepare(fp, pert.data).data);
        const auto model = fit_downstream_regression(splits.train);
        const Vector target = splits.test.column_values(splits.test.cols() - 1);
        for (double lam : sweep_lambdas()) {
            const auto inc = inconsistency(set, lam);
            LambdaPoint p{lam, inc.flagged_count(), std::nullopt, std::nullopt};
            if (p.flagged > 0)
                p.mse = downstream_regression_mse(model, pert.data, {target.data(), static_cast<std::size_t>(target.size())},
                                                  inc.flagged_indices());
            pts.push_back(p);
        }
    } else {
        const auto& set = s.interval_set();
        std::optional<Downstream> ds;
        if (s.has_labels()) ds = fit_downstream(s);
        for (double lam : sweep_lambdas()) {
            const auto inc = inconsistency(set, lam);
            LambdaPoint p{lam, inc.flagged_count(), std::nullopt, std::nullopt};
            if (ds && p.flagged > 0) p.accuracy = accuracy(ds->predicted, s.test_labels->labels, inc.flagged_indices());
            pts.push_back(p);
        }
    }
    const auto path = art.add("lambda_sweep.csv");
    write_sweep_csv(path, pts);
    stamp_csv(path, s.cfg);
    summary["points"] = pts.size();
}

Json seed_json(const SynthBenchSeed& r) {
    return Json{{"seed", r.seed},
                {"baseline_mse", r.baseline_mse},
                {"test_mse", r.test_mse},
                {"certain_mse", r.certain_mse},
                {"inconsistent_mse", opt_json(r.inconsistent_mse)},
                {"inconsistent_count", r.inconsistent_count},
                {"clean_coverage", r.clean_coverage},
                {"mean_delta_perturbed", r.mean_delta_perturbed},
                {"mean_delta_clean", r.mean_delta_clean}};
}

Json mean_sd(const std::vector<double>& v) {
    if (v.empty()) return Json{{"mean", nullptr}, {"sd", nullptr}, {"n", 0}};
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return Json{{"mean", m}, {"sd", sd}, {"n", v.size()}};
}

void do_synth_bench(Session& s, ArtifactSet& art, Json& summary) {
    if (!s.cfg.preset) throw UsageError(kModule, "synth-bench needs --preset");
    if (s.cfg.seeds == 0) throw UsageError(kModule, "seeds must be at least 1");
    std::vector<SynthBenchSeed> runs;
    for (std::size_t k = 0; k < s.cfg.seeds; ++k)
        runs.push_back(synth_bench_seed(*s.cfg.preset, s.cfg.pipeline.seed + k, s.cfg.pipeline, s.cfg.lambda,
                                        s.cfg.top_k));
    std::vector<double> base, test, cert, inc, cov;
    Json per = Json::array();
    for (const auto& r : runs) {
        base.push_back(r.baseline_mse);
        test.push_back(r.test_mse);
        cert.push_back(r.certain_mse);
        if (r.inconsistent_mse) inc.push_back(*r.inconsistent_mse);
        cov.push_back(r.clean_coverage);
        per.push_back(seed_json(r));
    }
    Json doc = header(s.cfg, Command::SynthBench);
    doc["preset"] = *s.cfg.preset;
    doc["runs"] = per;
    doc["summary"] = Json{{"baseline_mse", mean_sd(base)},
                          {"test_mse", mean_sd(test)},
                          {"certain_mse", mean_sd(cert)},
                          {"inconsistent_mse", mean_sd(inc)},
                          {"clean_coverage", mean_sd(cov)}};
    json::write_file(art.add("synth_bench.json"), doc);
    summary = doc["summary"];
}

}  // namespace

std::vector<double> default_report_proportions() {
    std::vector<double> out;
    for (int k = 1; k <= 10; ++k) out.push_back(0.05 * k);
    return out;
}

RunConfig run_config_from_json(const Json& j) {
    if (!j.is_object()) throw UsageError(kModule, "config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!kConfigKeys.count(k)) throw UsageError(kModule, "unknown config key '" + k + "'");
    if (!j.contains("seed") || j["seed"].is_null()) throw UsageError(kModule, "a seed is required (--seed or config)");
    RunConfig c;
    c.train = opt_string(j, "train");
    c.test = opt_string(j, "test");
    c.model = opt_string(j, "model");
    c.label = opt_string(j, "label");
    if (j.contains("out")) c.output_dir = get<std::string>(j, "out");
    auto& p = c.pipeline;
    p.seed = get<std::uint64_t>(j, "seed");
    if (j.contains("alpha")) p.alpha = get<double>(j, "alpha");
    if (j.contains("lambda")) c.lambda = get<double>(j, "lambda");
    if (j.contains("proper_fraction")) p.proper_fraction = get<double>(j, "proper_fraction");
    if (j.contains("truncation") && !j["truncation"].is_null()) {
        p.truncation = get<std::size_t>(j, "truncation");
        if (*p.truncation == 0) throw UsageError(kModule, "truncation must be at least 1");
    }
    if (j.contains("augmentation")) p.augmentation = augmentation_mode_from_string(get<std::string>(j, "augmentation"));
    if (j.contains("representer_fit")) {
        const auto v = get<std::string>(j, "representer_fit");
        if (v != "augmented" && v != "train") throw UsageError(kModule, "representer_fit must be augmented or train");
        p.representer_on_augmented = v == "augmented";
    }
    if (j.contains("vine_order")) {
        const auto v = get<std::string>(j, "vine_order");
        if (v != "input" && v != "max-tau") throw UsageError(kModule, "vine_order must be input or max-tau");
        p.vine_order = v == "max-tau" ? VineOrder::MaxTauChain : VineOrder::InputOrder;
    }
    if (j.contains("latent_dim")) p.latent_dim = get<std::size_t>(j, "latent_dim");
    if (j.contains("normalizer_input"))
        p.normalizer_input = normalizer_input_from_string(get<std::string>(j, "normalizer_input"));
    c.proportions = j.contains("proportions") ? get<std::vector<double>>(j, "proportions") : default_report_proportions();
    c.preset = opt_string(j, "preset");
    if (j.contains("seeds")) c.seeds = get<std::size_t>(j, "seeds");
    if (j.contains("top_k")) c.top_k = get<std::size_t>(j, "top_k");
    if (j.contains("forest_trees")) c.forest_trees = get<std::size_t>(j, "forest_trees");

    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw UsageError(kModule, "alpha must lie in (0, 1)");
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw UsageError(kModule, "lambda must lie in [0, 1]");
    if (!(p.proper_fraction > 0.0 && p.proper_fraction < 1.0))
        throw UsageError(kModule, "proper_fraction must lie in (0, 1)");
    for (double q : c.proportions)
        if (!(q > 0.0 && q <= 0.5)) throw UsageError(kModule, "report proportions must lie in (0, 0.5]");
    if (c.forest_trees == 0) throw UsageError(kModule, "forest_trees must be at least 1");
    return c;
}

Json to_json(const RunConfig& c) {
    const auto& p = c.pipeline;
    return Json{{"train", opt_json(c.train)},
                {"test", opt_json(c.test)},
                {"model", opt_json(c.model)},
                {"label", opt_json(c.label)},
                {"out", c.output_dir},
                {"alpha", p.alpha},
                {"lambda", c.lambda},
                {"proper_fraction", p.proper_fraction},
                {"truncation", p.truncation ? Json(*p.truncation) : Json(nullptr)},
                {"augmentation", to_string(p.augmentation)},
                {"representer_fit", p.representer_on_augmented ? "augmented" : "train"},
                {"vine_order", p.vine_order == VineOrder::MaxTauChain ? "max-tau" : "input"},
                {"latent_dim", p.latent_dim},
                {"normalizer_input", to_string(p.normalizer_input)},
                {"seed", p.seed},
                {"proportions", c.proportions},
                {"preset", opt_json(c.preset)},
                {"seeds", c.seeds},
                {"top_k", c.top_k},
                {"forest_trees", c.forest_trees}};
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* to_string(Command c) {
    switch (c) {
        case Command::Fit: return "fit";
        case Command::Intervals: return "intervals";
        case Command::Stratify: return "stratify";
        case Command::Metrics: return "metrics";
        case Command::SynthBench: return "synth-bench";
        case Command::LambdaSweep: return "lambda-sweep";
        case Command::Run: return "run";
    }
    return "run";
}

CommandResult run_command(Command command, const RunConfig& config) {
    ArtifactSet art(config.output_dir);
    Session s(config);
    CommandResult result;
    result.summary = Json::object();
    switch (command) {
        case Command::Fit: do_fit(s, art, result.summary); break;
        case Command::Intervals: do_intervals(s, art, result.summary); break;
        case Command::Stratify: do_stratify(s, art, result.summary); break;
        case Command::Metrics: do_metrics(s, art, result.summary); break;
        case Command::SynthBench: do_synth_bench(s, art, result.summary); break;
        case Command::LambdaSweep: do_lambda_sweep(s, art, result.summary); break;
        case Command::Run:
            if (!config.model) do_fit(s, art, result.summary);
            do_intervals(s, art, result.summary);
            do_stratify(s, art, result.summary);
            do_metrics(s, art, result.summary);
            break;
    }
    result.artifacts = art.commit();
    return result;
}

SynthBenchSeed synth_bench_seed(const std::string& preset, std::uint64_t seed, const PipelineOptions& options,
                                double lambda, std::size_t top_k) {
    auto sc = preset_config(preset);
    sc.seed = seed;
    const auto splits = generate_gaussian(sc);
    const auto pert = perturb(splits.test, sc);
    auto opts = options;
    opts.seed = seed;
    const auto fp = fit_pipeline(splits.train, opts);
    const auto set = predict(fp, prepare(fp, pert.data).data);
    const auto report = build_report(set, lambda, {});

    SynthBenchSeed r;
    r.seed = seed;
    const auto last = splits.train.cols() - 1;
    const auto reg_split = split_indices(splits.train.rows(), {0.8, derive_seed(seed, kRegressionSplit)});
    const auto model = fit_downstream_regression(splits.train.select_rows(reg_split.proper));
    const auto holdout = splits.train.select_rows(reg_split.calibration);
    const Vector hold_y = holdout.column_values(last);
    r.baseline_mse = downstream_regression_mse(model, holdout, {hold_y.data(), static_cast<std::size_t>(hold_y.size())});

    const Vector clean_y = splits.test.column_values(last);
    const std::span<const double> target{clean_y.data(), static_cast<std::size_t>(clean_y.size())};
    r.test_mse = downstream_regression_mse(model, pert.data, target);
    const auto tails = ranking_tails(report.ranking, std::min(top_k, report.instances()));
    r.certain_mse = downstream_regression_mse(model, pert.data, target, tails.certain);
    const auto flagged = report.inconsistency.flagged_indices();
    r.inconsistent_count = flagged.size();
    if (!flagged.empty()) r.inconsistent_mse = downstream_regression_mse(model, pert.data, target, flagged);

    const auto clean = pert.clean_rows();
    if (!clean.empty()) r.clean_coverage = interval_quality(set.select_rows(clean)).pooled.coverage;
    r.mean_delta_perturbed = mean_of(report.uncertainty, pert.perturbed_rows());
    r.mean_delta_clean = mean_of(report.uncertainty, clean);
    return r;
}

}  // namespace datasuite
