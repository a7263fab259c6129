#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace datasuite {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<std::size_t>;

enum class ColumnKind { Continuous, Categorical, OneHotDerived };

struct FeatureRange {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double x) const { return x >= lower && x <= upper; }
};

struct CategorySource {
    std::string column;
    std::string level;
};

struct FeatureColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    FeatureRange range;
    std::optional<CategorySource> source;
};

// Row-major numeric table. Categorical columns (before one-hot encoding) keep
// their raw strings in `categories`, keyed by column index, and hold 0 in `values`.
class TabularDataset {
public:
    TabularDataset() = default;
    TabularDataset(std::string name, std::vector<FeatureColumn> columns, Matrix values);

    const std::string& name() const { return name_; }
    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<FeatureColumn>& columns() const { return columns_; }
    const FeatureColumn& column(std::size_t j) const { return columns_.at(j); }
    const Matrix& values() const { return values_; }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

    std::optional<std::size_t> find_column(const std::string& name) const;
    std::vector<std::string> column_names() const;
    bool has_categorical() const;
    const std::map<std::size_t, std::vector<std::string>>& categories() const { return categories_; }

    TabularDataset with_name(std::string name) const;
    TabularDataset with_values(Matrix values) const;
    TabularDataset with_ranges(const std::vector<FeatureRange>& ranges) const;
    TabularDataset select_rows(std::span<const std::size_t> rows) const;
    TabularDataset select_columns(std::span<const std::size_t> cols) const;
    TabularDataset drop_column(const std::string& name) const;
    Vector column_values(std::size_t j) const { return values_.col(static_cast<Eigen::Index>(j)); }

    // Appends rows of `other`; schemas must match by name and count.
    TabularDataset concat_rows(const TabularDataset& other) const;

    void set_categories(std::map<std::size_t, std::vector<std::string>> cats) { categories_ = std::move(cats); }

private:
    void validate() const;

    std::string name_;
    std::vector<FeatureColumn> columns_;
    Matrix values_;
    std::map<std::size_t, std::vector<std::string>> categories_;
};

// Explicit kind hints for CSV columns; unlisted columns are inferred.
struct CsvSchema {
    std::map<std::string, ColumnKind> kinds;
};

TabularDataset load_csv(const std::string& path, const CsvSchema& schema = {});
TabularDataset parse_csv(const std::string& text, const std::string& name, const CsvSchema& schema = {});
void write_csv(const std::string& path, const TabularDataset& ds);

// Per categorical column, the sorted levels seen in the fitting data.
struct OneHotEncoder {
    std::vector<std::pair<std::string, std::vector<std::string>>> levels;

    static OneHotEncoder fit(const TabularDataset& ds);
    struct Result;
    Result transform(const TabularDataset& ds) const;
};

struct OneHotEncoder::Result {
    TabularDataset data;
    std::size_t unseen_levels = 0;
};

// Fits the encoder on `ds` and applies it. Datasets without categorical columns are returned unchanged.
TabularDataset encode_onehot(const TabularDataset& ds);

struct StandardizationParams {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<std::string> dropped;

    std::size_t size() const { return mean.size(); }
};

struct StandardizeResult {
    TabularDataset data;
    StandardizationParams params;
};

// Fits on `ds` when `params` is empty, else applies the given parameters
// (columns are matched by name; dropped columns are removed).
StandardizeResult standardize(const TabularDataset& ds, const std::optional<StandardizationParams>& params = std::nullopt);
Matrix standardize_matrix(const Matrix& x, const StandardizationParams& params);
Matrix unstandardize_matrix(const Matrix& z, const StandardizationParams& params);

std::vector<FeatureRange> feature_ranges(const TabularDataset& ds);

struct SplitSpec {
    double proper_fraction = 2.0 / 3.0;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    IndexList proper;
    IndexList calibration;
};

SplitIndices split_indices(std::size_t n, const SplitSpec& spec);
std::pair<TabularDataset, TabularDataset> split_proper_calibration(const TabularDataset& ds, const SplitSpec& spec);

// Drops zero-variance columns; returns the names dropped.
std::pair<TabularDataset, std::vector<std::string>> drop_constant_columns(const TabularDataset& ds);

const char* to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

}  // namespace datasuite
