#pragma once

#include <string>
#include <vector>

#include "datasuite/dataset.hpp"

namespace datasuite {

// Per instance x feature conformal intervals [l_i(x), r_i(x)] together with the
// observed values and the training ranges [a_i, b_i]. Intervals are kept
// unclipped; `clipped_*` give copies restricted to the range for reporting.
struct IntervalSet {
    std::vector<std::string> names;
    std::vector<FeatureRange> ranges;
    Matrix lower;
    Matrix upper;
    Matrix observed;
    Matrix center;  // g_i(f(x))
    Matrix sigma;   // sigma_i(x)
    std::vector<double> epsilon;

    std::size_t instances() const { return static_cast<std::size_t>(observed.rows()); }
    std::size_t features() const { return names.size(); }

    bool contains(std::size_t i, std::size_t j) const;
    double gamma(std::size_t i, std::size_t j) const;  // |x - g| / sigma
    Matrix clipped_lower() const;
    Matrix clipped_upper() const;

    IntervalSet select_rows(std::span<const std::size_t> rows) const;
    void validate() const;
};

void write_intervals_csv(const std::string& path, const IntervalSet& set);

}  // namespace datasuite
