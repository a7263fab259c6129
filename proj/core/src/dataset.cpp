#include "datasuite/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "core-data";

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
}

// Rows are reported 1-based, header excluded.
std::string location(std::size_t row, const std::string& col) {
    return "row " + std::to_string(row + 1) + ", column '" + col + "'";
}

}  // namespace

const char* to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Continuous: return "continuous";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::OneHotDerived: return "one-hot";
    }
    return "continuous";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::Continuous;
    if (s == "categorical") return ColumnKind::Categorical;
    if (s == "one-hot") return ColumnKind::OneHotDerived;
    throw UsageError(kModule, "unknown column kind '" + s + "'");
}

TabularDataset::TabularDataset(std::string name, std::vector<FeatureColumn> columns, Matrix values)
    : name_(std::move(name)), columns_(std::move(columns)), values_(std::move(values)) {
    validate();
}

void TabularDataset::validate() const {
    if (columns_.empty()) throw DataError(kModule, "dataset '" + name_ + "' has no columns");
    if (static_cast<std::size_t>(values_.cols()) != columns_.size())
        throw DataError(kModule, "dataset '" + name_ + "': value matrix width does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (!seen.insert(c.name).second) throw DataError(kModule, "duplicate column name '" + c.name + "'");
        if (c.range.lower > c.range.upper) throw DataError(kModule, "column '" + c.name + "' has an inverted range");
    }
    if (!values_.allFinite()) {
        for (Eigen::Index i = 0; i < values_.rows(); ++i)
            for (Eigen::Index j = 0; j < values_.cols(); ++j)
                if (!std::isfinite(values_(i, j)))
                    throw DataError(kModule, "non-finite value at " +
                                                 location(static_cast<std::size_t>(i), columns_[static_cast<std::size_t>(j)].name));
    }
}

std::optional<std::size_t> TabularDataset::find_column(const std::string& name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (columns_[j].name == name) return j;
    return std::nullopt;
}

std::vector<std::string> TabularDataset::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

bool TabularDataset::has_categorical() const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [](const FeatureColumn& c) { return c.kind == ColumnKind::Categorical; });
}

TabularDataset TabularDataset::with_name(std::string name) const {
    TabularDataset out = *this;
    out.name_ = std::move(name);
    return out;
}

TabularDataset TabularDataset::with_values(Matrix values) const {
    TabularDataset out(name_, columns_, std::move(values));
    if (static_cast<std::size_t>(out.values_.rows()) == rows()) out.categories_ = categories_;
    return out;
}

TabularDataset TabularDataset::with_ranges(const std::vector<FeatureRange>& ranges) const {
    if (ranges.size() != columns_.size()) throw DataError(kModule, "range count does not match column count");
    TabularDataset out = *this;
    for (std::size_t j = 0; j < ranges.size(); ++j) out.columns_[j].range = ranges[j];
    return out;
}

TabularDataset TabularDataset::select_rows(std::span<const std::size_t> rows) const {
    Matrix v(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= this->rows()) throw DataError(kModule, "row index out of range");
        v.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    TabularDataset out(name_, columns_, std::move(v));
    for (const auto& [j, cells] : categories_) {
        std::vector<std::string> sub;
        sub.reserve(rows.size());
        for (auto r : rows) sub.push_back(cells[r]);
        out.categories_[j] = std::move(sub);
    }
    return out;
}

TabularDataset TabularDataset::select_columns(std::span<const std::size_t> cols) const {
    std::vector<FeatureColumn> c;
    Matrix v(values_.rows(), static_cast<Eigen::Index>(cols.size()));
    std::map<std::size_t, std::vector<std::string>> cats;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        c.push_back(columns_.at(cols[k]));
        v.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(cols[k]));
        if (auto it = categories_.find(cols[k]); it != categories_.end()) cats[k] = it->second;
    }
    TabularDataset out(name_, std::move(c), std::move(v));
    out.categories_ = std::move(cats);
    return out;
}

TabularDataset TabularDataset::drop_column(const std::string& name) const {
    IndexList keep;
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (columns_[j].name != name) keep.push_back(j);
    if (keep.size() == columns_.size()) throw DataError(kModule, "no column named '" + name + "'");
    return select_columns(keep);
}

TabularDataset TabularDataset::concat_rows(const TabularDataset& other) const {
    if (other.column_names() != column_names())
        throw DataError(kModule, "cannot concatenate datasets with different schemas");
    Matrix v(values_.rows() + other.values_.rows(), values_.cols());
    v << values_, other.values_;
    TabularDataset out(name_, columns_, std::move(v));
    for (const auto& [j, cells] : categories_) {
        auto merged = cells;
        const auto& rhs = other.categories_.at(j);
        merged.insert(merged.end(), rhs.begin(), rhs.end());
        out.categories_[j] = std::move(merged);
    }
    return out;
}

TabularDataset parse_csv(const std::string& text, const std::string& name, const CsvSchema& schema) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw DataError(kModule, "'" + name + "' is empty (no header row)");
    const std::size_t d = header.size();
    for (const auto& [col, kind] : schema.kinds)
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw DataError(kModule, "schema names column '" + col + "' which is not in the header");

    std::vector<std::vector<std::string>> cells;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != d)
            throw DataError(kModule, "ragged row " + std::to_string(row + 1) + ": expected " + std::to_string(d) +
                                         " cells, found " + std::to_string(fields.size()));
        for (std::size_t j = 0; j < d; ++j)
            if (fields[j].empty()) throw DataError(kModule, "missing cell at " + location(row, header[j]));
        cells.push_back(std::move(fields));
        ++row;
    }
    if (cells.empty()) throw DataError(kModule, "'" + name + "' has a header but no data rows");

    std::vector<FeatureColumn> columns(d);
    Matrix values = Matrix::Zero(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(d));
    std::map<std::size_t, std::vector<std::string>> categories;
    for (std::size_t j = 0; j < d; ++j) {
        columns[j].name = header[j];
        ColumnKind kind = ColumnKind::Continuous;
        bool hinted = false;
        if (auto it = schema.kinds.find(header[j]); it != schema.kinds.end()) {
            kind = it->second;
            hinted = true;
        }
        if (!hinted) {
            for (const auto& r : cells) {
                if (!parse_number(r[j])) {
                    kind = ColumnKind::Categorical;
                    break;
                }
            }
        }
        columns[j].kind = kind;
        if (kind == ColumnKind::Categorical) {
            std::vector<std::string> col;
            col.reserve(cells.size());
            for (const auto& r : cells) col.push_back(r[j]);
            categories[j] = std::move(col);
            continue;
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto v = parse_number(cells[i][j]);
            if (!v) throw DataError(kModule, "non-numeric cell '" + cells[i][j] + "' at " + location(i, header[j]));
            if (!std::isfinite(*v)) throw DataError(kModule, "non-finite cell at " + location(i, header[j]));
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
        }
    }
    TabularDataset ds(name, std::move(columns), std::move(values));
    ds.set_categories(std::move(categories));
    return ds;
}

TabularDataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError(kModule, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw DataError(kModule, "read failure on '" + path + "'");
    return parse_csv(ss.str(), path, schema);
}

void write_csv(const std::string& path, const TabularDataset& ds) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f.precision(17);
    const auto names = ds.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) f << (j ? "," : "") << names[j];
    f << '\n';
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            if (j) f << ',';
            if (auto it = ds.categories().find(j); it != ds.categories().end())
                f << it->second[i];
            else
                f << ds(i, j);
        }
        f << '\n';
    }
}

OneHotEncoder OneHotEncoder::fit(const TabularDataset& ds) {
    OneHotEncoder enc;
    for (const auto& [j, cells] : ds.categories()) {
        std::set<std::string> levels(cells.begin(), cells.end());
        enc.levels.emplace_back(ds.column(j).name, std::vector<std::string>(levels.begin(), levels.end()));
    }
    return enc;
}

OneHotEncoder::Result OneHotEncoder::transform(const TabularDataset& ds) const {
    if (!ds.has_categorical()) return {ds, 0};
    std::vector<FeatureColumn> columns;
    std::vector<Vector> data;
    std::size_t unseen = 0;
    const auto n = static_cast<Eigen::Index>(ds.rows());
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto& col = ds.column(j);
        if (col.kind != ColumnKind::Categorical) {
            columns.push_back(col);
            data.push_back(ds.column_values(j));
            continue;
        }
        auto it = std::find_if(levels.begin(), levels.end(), [&](const auto& l) { return l.first == col.name; });
        if (it == levels.end()) throw DataError(kModule, "encoder has no levels for column '" + col.name + "'");
        const auto& cells = ds.categories().at(j);
        const auto& lv = it->second;
        std::vector<Vector> ind(lv.size(), Vector::Zero(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            auto pos = std::lower_bound(lv.begin(), lv.end(), cells[static_cast<std::size_t>(i)]);
            if (pos == lv.end() || *pos != cells[static_cast<std::size_t>(i)]) {
                ++unseen;
                continue;
            }
            ind[static_cast<std::size_t>(pos - lv.begin())](i) = 1.0;
        }
        for (std::size_t k = 0; k < lv.size(); ++k) {
            FeatureColumn c;
            c.name = col.name + "=" + lv[k];
            c.kind = ColumnKind::OneHotDerived;
            c.range = {0.0, 1.0};
            c.source = CategorySource{col.name, lv[k]};
            columns.push_back(std::move(c));
            data.push_back(std::move(ind[k]));
        }
    }
    Matrix values(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < data.size(); ++k) values.col(static_cast<Eigen::Index>(k)) = data[k];
    return {TabularDataset(ds.name(), std::move(columns), std::move(values)), unseen};
}

TabularDataset encode_onehot(const TabularDataset& ds) {
    if (!ds.has_categorical()) return ds;
    return OneHotEncoder::fit(ds).transform(ds).data;
}

StandardizeResult standardize(const TabularDataset& ds, const std::optional<StandardizationParams>& params) {
    if (ds.has_categorical()) throw DataError(kModule, "standardize requires encoded (numeric) data");
    if (!params) {
        if (ds.rows() == 0) throw DataError(kModule, "cannot standardize an empty dataset");
        StandardizationParams p;
        IndexList keep;
        const double n = static_cast<double>(ds.rows());
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            const Vector col = ds.column_values(j);
            const double mean = col.sum() / n;
            const double var = (col.array() - mean).square().sum() / n;
            const double sd = std::sqrt(var);
            if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
                p.dropped.push_back(ds.column(j).name);
                continue;
            }
            keep.push_back(j);
            p.names.push_back(ds.column(j).name);
            p.mean.push_back(mean);
            p.stddev.push_back(sd);
        }
        if (keep.empty()) throw DataError(kModule, "every feature has zero variance");
        auto kept = ds.select_columns(keep);
        Matrix z = standardize_matrix(kept.values(), p);
        auto out = kept.with_values(std::move(z));
        return {out.with_ranges(feature_ranges(out)), std::move(p)};
    }
    IndexList cols;
    for (const auto& nm : params->names) {
        auto j = ds.find_column(nm);
        if (!j) throw DataError(kModule, "standardization expects column '" + nm + "' which is missing");
        cols.push_back(*j);
    }
    auto kept = ds.select_columns(cols);
    Matrix z = standardize_matrix(kept.values(), *params);
    return {kept.with_values(std::move(z)), *params};
}

Matrix standardize_matrix(const Matrix& x, const StandardizationParams& p) {
    if (static_cast<std::size_t>(x.cols()) != p.size()) throw DataError(kModule, "standardization width mismatch");
    Matrix z(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        z.col(j) = (x.col(j).array() - p.mean[k]) / p.stddev[k];
    }
    return z;
}

Matrix unstandardize_matrix(const Matrix& z, const StandardizationParams& p) {
    if (static_cast<std::size_t>(z.cols()) != p.size()) throw DataError(kModule, "standardization width mismatch");
    Matrix x(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        x.col(j) = z.col(j).array() * p.stddev[k] + p.mean[k];
    }
    return x;
}

std::vector<FeatureRange> feature_ranges(const TabularDataset& ds) {
    if (ds.rows() == 0) throw DataError(kModule, "feature ranges of an empty dataset");
    std::vector<FeatureRange> out(ds.cols());
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.column(j).kind == ColumnKind::OneHotDerived) {
            out[j] = {0.0, 1.0};
            continue;
        }
        const auto col = ds.values().col(static_cast<Eigen::Index>(j));
        out[j] = {col.minCoeff(), col.maxCoeff()};
    }
    return out;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
    if (!(spec.proper_fraction > 0.0 && spec.proper_fraction < 1.0))
        throw UsageError(kModule, "proper_fraction must lie in (0,1)");
    if (n < 4) throw DataError(kModule, "need at least 4 rows to split, got " + std::to_string(n));
    const auto n_proper = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.proper_fraction));
    if (n_proper == 0 || n_proper == n)
        throw DataError(kModule, "proper_fraction " + std::to_string(spec.proper_fraction) + " leaves an empty partition");
    IndexList perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    SplitIndices out;
    out.proper.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_proper));
    out.calibration.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_proper), perm.end());
    std::sort(out.proper.begin(), out.proper.end());
    std::sort(out.calibration.begin(), out.calibration.end());
    return out;
}

std::pair<TabularDataset, TabularDataset> split_proper_calibration(const TabularDataset& ds, const SplitSpec& spec) {
    auto idx = split_indices(ds.rows(), spec);
    return {ds.select_rows(idx.proper), ds.select_rows(idx.calibration)};
}

std::pair<TabularDataset, std::vector<std::string>> drop_constant_columns(const TabularDataset& ds) {
    IndexList keep;
    std::vector<std::string> dropped;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.column(j).kind == ColumnKind::Categorical) {
            keep.push_back(j);
            continue;
        }
        const auto col = ds.values().col(static_cast<Eigen::Index>(j));
        if (ds.rows() > 0 && col.maxCoeff() > col.minCoeff())
            keep.push_back(j);
        else
            dropped.push_back(ds.column(j).name);
    }
    if (keep.empty()) throw DataError(kModule, "every feature is constant");
    if (dropped.empty()) return {ds, {}};
    return {ds.select_columns(keep), std::move(dropped)};
}

}  // namespace datasuite
