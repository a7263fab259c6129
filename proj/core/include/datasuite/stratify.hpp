#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "datasuite/dataset.hpp"
#include "datasuite/intervals.hpp"
#include "datasuite/representer.hpp"

namespace datasuite {

struct InconsistencyScores {
    std::vector<double> fraction;  // nu(x)
    std::vector<bool> flagged;     // nu(x) > lambda
    double lambda = 0.5;

    std::size_t flagged_count() const;
    IndexList flagged_indices() const;
};

struct CertaintyGroups {
    double proportion = 0.0;
    IndexList certain;    // ascending uncertainty
    IndexList uncertain;  // the ceil(p n) largest, ascending uncertainty
};

struct StratificationReport {
    InconsistencyScores inconsistency;
    std::vector<double> uncertainty;  // Delta(x)
    IndexList ranking;                // instance indices sorted by ascending Delta, ties by index
    std::vector<CertaintyGroups> groups;

    std::size_t instances() const { return uncertainty.size(); }
};

InconsistencyScores inconsistency(const IntervalSet& intervals, double lambda = 0.5);

// Range-normalized width per feature averaged over features.
std::vector<double> uncertainty(const IntervalSet& intervals);

IndexList rank_by_uncertainty(const std::vector<double>& delta);

// The first and last `count` entries of the ranking (they overlap when 2 * count > n).
CertaintyGroups ranking_tails(const IndexList& ranking, std::size_t count);

// Cert_p / Uncert_p with |group| = ceil(p n); requires p in (0, 0.5] and p n >= 1.
CertaintyGroups stratify_by_uncertainty(const IndexList& ranking, double proportion);

StratificationReport build_report(const IntervalSet& intervals, double lambda, const std::vector<double>& proportions);

// Per-instance labels: "inconsistent" takes precedence, then "uncertain", "certain", else "neutral".
std::vector<std::string> group_labels(const StratificationReport& report, const CertaintyGroups& groups);

struct Prototype {
    std::string group;
    std::size_t members = 0;
    std::vector<double> centroid;
    std::optional<std::vector<double>> nearest_reference;
};

struct PrototypeTable {
    std::vector<std::string> names;
    std::vector<Prototype> prototypes;
};

// Raw-space centroids (one-hot blocks collapsed to their argmax level). With a reference set,
// each member's nearest reference row in standardized space is averaged into a second prototype.
PrototypeTable prototypes(const TabularDataset& ds, const std::vector<std::pair<std::string, IndexList>>& groups,
                          const TabularDataset* reference = nullptr,
                          const StandardizationParams* params = nullptr);

// Index of the nearest row of `reference` to `row` (both already standardized).
std::size_t nearest_row(const Matrix& reference, std::span<const double> row);

struct Projection2D {
    Matrix coords;  // n x 2
    std::vector<std::string> labels;
};

Projection2D project_2d(const Representer& rep, const TabularDataset& ds, const std::vector<std::string>& labels);

void write_ranking_csv(const std::string& path, const StratificationReport& report);
void write_projection_csv(const std::string& path, const Projection2D& proj);

}  // namespace datasuite
