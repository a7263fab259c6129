#include "datasuite/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "datasuite/error.hpp"

namespace datasuite::json {

namespace {

constexpr const char* kModule = "serialization";

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(r.size()) != cols) throw DataError(kModule, "ragged matrix in JSON");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r.at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

// JSON has no infinity; non-finite values become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

template <class T>
T require(const Json& j, const char* key) {
    if (!j.contains(key)) throw DataError(kModule, std::string("missing key '") + key + "'");
    return j.at(key).get<T>();
}

}  // namespace

Json to_json(const PairCopula& c) {
    return Json{{"family", to_string(c.family)},
                {"theta", c.theta},
                {"independent", c.independent},
                {"near_comonotone", c.near_comonotone},
                {"log_likelihood", number(c.log_likelihood)}};
}

PairCopula pair_copula_from_json(const Json& j) {
    if (require<bool>(j, "independent")) return PairCopula::independence();
    auto c = PairCopula::make(copula_family_from_string(require<std::string>(j, "family")), require<double>(j, "theta"));
    c.near_comonotone = j.value("near_comonotone", false);
    if (j.contains("log_likelihood") && j["log_likelihood"].is_number()) c.log_likelihood = j["log_likelihood"].get<double>();
    return c;
}

Json to_json(const EmpiricalMarginal& m) {
    return Json{{"support", m.support()},
                {"probabilities", m.probabilities()},
                {"sample_size", m.sample_size()},
                {"discrete", m.discrete()}};
}

EmpiricalMarginal marginal_from_json(const Json& j) {
    return EmpiricalMarginal::from_table(require<std::vector<double>>(j, "support"),
                                         require<std::vector<double>>(j, "probabilities"),
                                         require<std::size_t>(j, "sample_size"), j.value("discrete", false));
}

Json to_json(const VineModel& m) {
    Json trees = Json::array();
    for (const auto& t : m.trees) {
        Json level = Json::array();
        for (const auto& c : t) level.push_back(to_json(c));
        trees.push_back(std::move(level));
    }
    Json marg = Json::array();
    for (const auto& mm : m.marginals) marg.push_back(to_json(mm));
    return Json{{"type", "d-vine"}, {"names", m.names}, {"order", m.order}, {"trees", trees},
                {"marginals", marg}, {"warnings", m.warnings}};
}

VineModel vine_from_json(const Json& j) {
    VineModel m;
    m.names = require<std::vector<std::string>>(j, "names");
    m.order = require<std::vector<std::size_t>>(j, "order");
    for (const auto& mm : j.at("marginals")) m.marginals.push_back(marginal_from_json(mm));
    for (const auto& level : j.at("trees")) {
        std::vector<PairCopula> t;
        for (const auto& c : level) t.push_back(pair_copula_from_json(c));
        m.trees.push_back(std::move(t));
    }
    m.warnings = j.value("warnings", std::vector<std::string>{});
    const std::size_t d = m.marginals.size();
    if (m.names.size() != d || m.order.size() != d || m.trees.size() > (d ? d - 1 : 0))
        throw DataError(kModule, "vine document has inconsistent dimensions");
    for (std::size_t t = 0; t < m.trees.size(); ++t)
        if (m.trees[t].size() != d - 1 - t) throw DataError(kModule, "vine tree has the wrong number of edges");
    return m;
}

Json to_json(const StandardizationParams& p) {
    return Json{{"names", p.names}, {"mean", p.mean}, {"stddev", p.stddev}, {"dropped", p.dropped}};
}

StandardizationParams standardization_from_json(const Json& j) {
    StandardizationParams p;
    p.names = require<std::vector<std::string>>(j, "names");
    p.mean = require<std::vector<double>>(j, "mean");
    p.stddev = require<std::vector<double>>(j, "stddev");
    p.dropped = j.value("dropped", std::vector<std::string>{});
    if (p.mean.size() != p.names.size() || p.stddev.size() != p.names.size())
        throw DataError(kModule, "standardization document has inconsistent lengths");
    return p;
}

Json to_json(const Representer& r) {
    return Json{{"standardization", to_json(r.standardization)},
                {"components", matrix_to_json(r.components)},
                {"explained_variance", r.explained_variance},
                {"latent_dim", r.latent_dim},
                {"warnings", r.warnings}};
}

Representer representer_from_json(const Json& j) {
    Representer r;
    r.standardization = standardization_from_json(j.at("standardization"));
    r.components = matrix_from_json(j.at("components"));
    r.explained_variance = require<std::vector<double>>(j, "explained_variance");
    r.latent_dim = require<std::size_t>(j, "latent_dim");
    r.warnings = j.value("warnings", std::vector<std::string>{});
    if (static_cast<std::size_t>(r.components.rows()) != r.standardization.size() ||
        r.latent_dim > static_cast<std::size_t>(r.components.cols()))
        throw DataError(kModule, "representer document has inconsistent dimensions");
    return r;
}

Json to_json(const RegressionTree& t) {
    Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
         value = Json::array(), samples = Json::array();
    for (const auto& n : t.nodes()) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(n.value);
        samples.push_back(n.samples);
    }
    return Json{{"feature", feature}, {"threshold", threshold}, {"left", left},
                {"right", right},     {"value", value},         {"samples", samples}};
}

RegressionTree regression_tree_from_json(const Json& j) {
    const auto feature = require<std::vector<int>>(j, "feature");
    const auto threshold = require<std::vector<double>>(j, "threshold");
    const auto left = require<std::vector<std::int32_t>>(j, "left");
    const auto right = require<std::vector<std::int32_t>>(j, "right");
    const auto value = require<std::vector<double>>(j, "value");
    const auto samples = require<std::vector<std::size_t>>(j, "samples");
    const std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || samples.size() != n)
        throw DataError(kModule, "tree document has inconsistent lengths");
    std::vector<TreeNode> nodes(n);
    for (std::size_t k = 0; k < n; ++k) nodes[k] = {feature[k], threshold[k], left[k], right[k], value[k], samples[k]};
    return RegressionTree(std::move(nodes));
}

Json to_json(const ConformalModel& m) {
    Json features = Json::array();
    for (const auto& f : m.features) {
        Json norm{{"beta", f.normalizer.beta}, {"zero_residual", f.normalizer.zero_residual}};
        if (!f.normalizer.zero_residual) norm["log_residual_model"] = to_json(f.normalizer.log_residual_model);
        features.push_back(Json{{"name", f.name},
                                {"range", {f.range.lower, f.range.upper}},
                                {"regressor", to_json(f.regressor)},
                                {"normalizer", norm},
                                {"epsilon", number(f.epsilon.value)},
                                {"epsilon_rank", f.epsilon.rank},
                                {"epsilon_infinite", f.epsilon.infinite}});
    }
    return Json{{"alpha", m.alpha},
                {"calibration_size", m.calibration_size},
                {"proper_size", m.proper_size},
                {"features", features},
                {"warnings", m.warnings}};
}

ConformalModel conformal_from_json(const Json& j) {
    ConformalModel m;
    m.alpha = require<double>(j, "alpha");
    m.calibration_size = require<std::size_t>(j, "calibration_size");
    m.proper_size = j.value("proper_size", std::size_t{0});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    for (const auto& fj : j.at("features")) {
        FeatureConformal f;
        f.name = require<std::string>(fj, "name");
        const auto range = require<std::vector<double>>(fj, "range");
        if (range.size() != 2) throw DataError(kModule, "feature range must have two entries");
        f.range = {range[0], range[1]};
        f.regressor = regression_tree_from_json(fj.at("regressor"));
        const auto& nj = fj.at("normalizer");
        f.normalizer.beta = require<double>(nj, "beta");
        f.normalizer.zero_residual = require<bool>(nj, "zero_residual");
        if (!f.normalizer.zero_residual)
            f.normalizer.log_residual_model = regression_tree_from_json(nj.at("log_residual_model"));
        f.epsilon.infinite = require<bool>(fj, "epsilon_infinite");
        f.epsilon.rank = require<std::size_t>(fj, "epsilon_rank");
        f.epsilon.value = f.epsilon.infinite ? std::numeric_limits<double>::infinity() : require<double>(fj, "epsilon");
        m.features.push_back(std::move(f));
    }
    return m;
}

Json to_json(const StratificationReport& r) {
    Json groups = Json::array();
    for (const auto& g : r.groups)
        groups.push_back(Json{{"proportion", g.proportion}, {"certain", g.certain}, {"uncertain", g.uncertain}});
    std::vector<int> flagged(r.inconsistency.flagged.begin(), r.inconsistency.flagged.end());
    return Json{{"instances", r.instances()},
                {"lambda", r.inconsistency.lambda},
                {"inconsistency", r.inconsistency.fraction},
                {"inconsistent", flagged},
                {"inconsistent_count", r.inconsistency.flagged_count()},
                {"uncertainty", r.uncertainty},
                {"ranking", r.ranking},
                {"groups", groups}};
}

Json to_json(const IntervalQuality& q) {
    auto triple = [](const QualityTriple& t) {
        return Json{{"coverage", t.coverage}, {"deficit", t.deficit}, {"excess", t.excess}};
    };
    Json per = Json::object();
    for (std::size_t j = 0; j < q.names.size(); ++j) per[q.names[j]] = triple(q.per_feature[j]);
    return Json{{"pooled", triple(q.pooled)}, {"per_feature", per}};
}

Json to_json(const MpiResult& r) {
    Json pts = Json::array();
    for (const auto& p : r.points)
        pts.push_back(Json{{"proportion", p.proportion},
                           {"group_size", p.group_size},
                           {"certain_accuracy", p.certain_accuracy},
                           {"uncertain_accuracy", p.uncertain_accuracy}});
    return Json{{"mpi", r.mpi}, {"points", pts}, {"skipped", r.skipped}};
}

Json to_json(const PrototypeTable& t) {
    Json protos = Json::array();
    for (const auto& p : t.prototypes) {
        Json pj{{"group", p.group}, {"members", p.members}, {"centroid", p.centroid}};
        if (p.nearest_reference) pj["nearest_reference"] = *p.nearest_reference;
        protos.push_back(std::move(pj));
    }
    return Json{{"names", t.names}, {"prototypes", protos}};
}

Json to_json(const StratificationAccuracy& a) {
    Json groups = Json::array();
    for (const auto& g : a.groups)
        groups.push_back(Json{{"proportion", g.proportion},
                              {"group_size", g.group_size},
                              {"certain", optional_number(g.certain)},
                              {"uncertain", optional_number(g.uncertain)},
                              {"random", optional_number(g.random_control)}});
    return Json{{"baseline", a.baseline},
                {"inconsistent", optional_number(a.inconsistent)},
                {"groups", groups},
                {"skipped", a.skipped}};
}

Json read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError(kModule, "cannot open '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const Json::exception& e) {
        throw DataError(kModule, "invalid JSON in '" + path + "': " + e.what());
    }
}

void write_file(const std::string& path, const Json& j) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f << j.dump(2) << '\n';
    if (!f) throw DataError(kModule, "write failure on '" + path + "'");
}

}  // namespace datasuite::json
