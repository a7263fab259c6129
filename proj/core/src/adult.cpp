#include "datasuite/adult.hpp"

#include <algorithm>
#include <map>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "core-data";

std::size_t require_column(const TabularDataset& ds, std::initializer_list<const char*> names) {
    for (const char* n : names)
        if (auto j = ds.find_column(n)) return *j;
    throw DataError(kModule, std::string("adult input is missing column '") + *names.begin() + "'");
}

const std::string& cell(const TabularDataset& ds, std::size_t i, std::size_t j) {
    auto it = ds.categories().find(j);
    if (it == ds.categories().end())
        throw DataError(kModule, "adult column '" + ds.column(j).name + "' must be categorical");
    return it->second[i];
}

double code(const std::map<std::string, double>& table, const std::string& v, const std::string& col) {
    auto it = table.find(v);
    if (it == table.end()) throw DataError(kModule, "unexpected " + col + " level '" + v + "'");
    return it->second;
}

}  // namespace

TabularDataset prepare_adult(const TabularDataset& raw) {
    const auto age = require_column(raw, {"age"});
    const auto edu = require_column(raw, {"education-num", "education_num"});
    const auto marital = require_column(raw, {"marital-status", "marital_status"});
    const auto rel = require_column(raw, {"relationship"});
    const auto race = require_column(raw, {"race"});
    const auto sex = require_column(raw, {"sex"});
    const auto gain = require_column(raw, {"capital-gain", "capital_gain"});
    const auto loss = require_column(raw, {"capital-loss", "capital_loss"});
    const auto hours = require_column(raw, {"hours-per-week", "hours_per_week"});
    const auto country = require_column(raw, {"native-country", "native_country", "country"});
    const auto work = require_column(raw, {"workclass", "employment-type"});
    const auto label = require_column(raw, {"salary", "income", "class"});

    static const std::map<std::string, double> relationship{{"Husband", 0},       {"Wife", 0},
                                                             {"Not-in-family", 1}, {"Own-child", 2},
                                                             {"Other-relative", 3}, {"Unmarried", 4}};
    static const std::map<std::string, double> races{{"Amer-Indian-Eskimo", 0}, {"Asian-Pac-Islander", 1},
                                                     {"Black", 2}, {"Other", 3}, {"White", 4}};
    static const std::map<std::string, double> employment{
        {"Federal-gov", 0}, {"Local-gov", 0},     {"State-gov", 0},   {"Private", 1},
        {"Self-emp-inc", 2}, {"Self-emp-not-inc", 2}, {"Without-pay", 3}, {"Never-worked", 3}};

    const std::vector<std::string> names{"age",  "education-num", "marital-status", "relationship",
                                         "race", "sex",           "capital-gain",   "capital-loss",
                                         "hours-per-week", "country", "employment-type", "salary"};
    const std::vector<std::size_t> categorical{marital, rel, race, sex, country, work, label};

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        bool missing = false;
        for (auto j : categorical) missing = missing || cell(raw, i, j) == "?";
        if (missing) continue;
        std::string y = cell(raw, i, label);
        if (!y.empty() && y.back() == '.') y.pop_back();
        if (y != ">50K" && y != "<=50K") throw DataError(kModule, "unexpected salary level '" + y + "'");
        const std::string& ms = cell(raw, i, marital);
        rows.push_back({raw(i, age), raw(i, edu),
                        (ms == "Married-civ-spouse" || ms == "Married-AF-spouse") ? 1.0 : 0.0,
                        code(relationship, cell(raw, i, rel), "relationship"), code(races, cell(raw, i, race), "race"),
                        cell(raw, i, sex) == "Male" ? 1.0 : 0.0, raw(i, gain) > 0 ? 1.0 : 0.0,
                        raw(i, loss) > 0 ? 1.0 : 0.0, raw(i, hours),
                        cell(raw, i, country) == "United-States" ? 1.0 : 0.0,
                        code(employment, cell(raw, i, work), "workclass"), y == ">50K" ? 1.0 : 0.0});
    }
    if (rows.empty()) throw DataError(kModule, "no complete rows in adult input");
    Matrix v(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j)
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    std::vector<FeatureColumn> cols;
    for (const auto& n : names) cols.push_back({n, ColumnKind::Continuous, {}, std::nullopt});
    TabularDataset out("adult", std::move(cols), std::move(v));
    return out.with_ranges(feature_ranges(out));
}

std::pair<TabularDataset, TabularDataset> adult_split(const TabularDataset& prepared, std::uint64_t seed) {
    const auto s = split_indices(prepared.rows(), {0.5, seed});
    return {prepared.select_rows(s.proper), prepared.select_rows(s.calibration)};
}

}  // namespace datasuite
