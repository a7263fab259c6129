#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "datasuite/conformal.hpp"
#include "datasuite/forest.hpp"
#include "datasuite/metrics.hpp"
#include "datasuite/representer.hpp"
#include "datasuite/stratify.hpp"
#include "datasuite/vine.hpp"

// JSON documents for every fitted model and report. Keys are emitted in sorted
// order so identical inputs produce byte-identical files.
namespace datasuite::json {

using Json = nlohmann::json;

Json to_json(const PairCopula& c);
PairCopula pair_copula_from_json(const Json& j);

Json to_json(const EmpiricalMarginal& m);
EmpiricalMarginal marginal_from_json(const Json& j);

Json to_json(const VineModel& m);
VineModel vine_from_json(const Json& j);

Json to_json(const StandardizationParams& p);
StandardizationParams standardization_from_json(const Json& j);

Json to_json(const Representer& r);
Representer representer_from_json(const Json& j);

Json to_json(const RegressionTree& t);
RegressionTree regression_tree_from_json(const Json& j);

Json to_json(const ConformalModel& m);
ConformalModel conformal_from_json(const Json& j);

Json to_json(const StratificationReport& r);
Json to_json(const IntervalQuality& q);
Json to_json(const MpiResult& r);
Json to_json(const PrototypeTable& t);
Json to_json(const StratificationAccuracy& a);

Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& j);

}  // namespace datasuite::json
