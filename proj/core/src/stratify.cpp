#include "datasuite/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {
constexpr const char* kModule = "stratify";
}

std::size_t InconsistencyScores::flagged_count() const {
    return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

IndexList InconsistencyScores::flagged_indices() const {
    IndexList out;
    for (std::size_t i = 0; i < flagged.size(); ++i)
        if (flagged[i]) out.push_back(i);
    return out;
}

InconsistencyScores inconsistency(const IntervalSet& intervals, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError(kModule, "lambda must lie in [0,1]");
    InconsistencyScores out;
    out.lambda = lambda;
    const std::size_t n = intervals.instances();
    const std::size_t d = intervals.features();
    out.fraction.resize(n);
    out.flagged.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t outside = 0;
        for (std::size_t j = 0; j < d; ++j) outside += intervals.contains(i, j) ? 0 : 1;
        out.fraction[i] = static_cast<double>(outside) / static_cast<double>(d);
        out.flagged[i] = out.fraction[i] > lambda;
    }
    return out;
}

std::vector<double> uncertainty(const IntervalSet& intervals) {
    const std::size_t n = intervals.instances();
    const std::size_t d = intervals.features();
    for (const auto& r : intervals.ranges)
        if (!(r.width() > 0.0)) throw DataError(kModule, "feature range has zero width");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            s += (intervals.upper(r, c) - intervals.lower(r, c)) / intervals.ranges[j].width();
        }
        out[i] = s / static_cast<double>(d);
    }
    return out;
}

IndexList rank_by_uncertainty(const std::vector<double>& delta) {
    IndexList order(delta.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta[a] < delta[b]; });
    return order;
}

CertaintyGroups ranking_tails(const IndexList& ranking, std::size_t count) {
    if (count == 0) throw DataError(kModule, "group size is zero");
    if (count > ranking.size()) throw DataError(kModule, "group larger than the number of instances");
    CertaintyGroups g;
    g.proportion = static_cast<double>(count) / static_cast<double>(ranking.size());
    g.certain.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(count));
    g.uncertain.assign(ranking.end() - static_cast<std::ptrdiff_t>(count), ranking.end());
    return g;
}

CertaintyGroups stratify_by_uncertainty(const IndexList& ranking, double proportion) {
    if (!(proportion > 0.0 && proportion <= 0.5)) throw UsageError(kModule, "proportion must lie in (0, 0.5]");
    const double raw = proportion * static_cast<double>(ranking.size());
    if (raw < 1.0) throw DataError(kModule, "proportion selects fewer than one instance");
    // snap representation error so that 0.05 * 100 is 5, not 6
    double snapped = std::round(raw);
    if (std::abs(raw - snapped) > 1e-9 * raw) snapped = std::ceil(raw);
    auto g = ranking_tails(ranking, static_cast<std::size_t>(snapped));
    g.proportion = proportion;
    return g;
}

StratificationReport build_report(const IntervalSet& intervals, double lambda, const std::vector<double>& proportions) {
    intervals.validate();
    StratificationReport r;
    r.inconsistency = inconsistency(intervals, lambda);
    r.uncertainty = uncertainty(intervals);
    r.ranking = rank_by_uncertainty(r.uncertainty);
    for (double p : proportions) r.groups.push_back(stratify_by_uncertainty(r.ranking, p));
    return r;
}

std::vector<std::string> group_labels(const StratificationReport& report, const CertaintyGroups& groups) {
    std::vector<std::string> labels(report.instances(), "neutral");
    for (auto i : groups.certain) labels[i] = "certain";
    for (auto i : groups.uncertain) labels[i] = "uncertain";
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (report.inconsistency.flagged[i]) labels[i] = "inconsistent";
    return labels;
}

namespace {

// Column blocks for one-hot-derived features, keyed by source column.
std::vector<IndexList> onehot_blocks(const TabularDataset& ds) {
    std::vector<std::pair<std::string, IndexList>> blocks;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto& c = ds.column(j);
        if (c.kind != ColumnKind::OneHotDerived || !c.source) continue;
        auto it = std::find_if(blocks.begin(), blocks.end(), [&](const auto& b) { return b.first == c.source->column; });
        if (it == blocks.end())
            blocks.emplace_back(c.source->column, IndexList{j});
        else
            it->second.push_back(j);
    }
    std::vector<IndexList> out;
    for (auto& b : blocks) out.push_back(std::move(b.second));
    return out;
}

void collapse_blocks(std::vector<double>& v, const std::vector<IndexList>& blocks) {
    for (const auto& b : blocks) {
        std::size_t arg = b.front();
        for (auto j : b)
            if (v[j] > v[arg]) arg = j;
        for (auto j : b) v[j] = j == arg ? 1.0 : 0.0;
    }
}

std::vector<double> mean_rows(const Matrix& m, const IndexList& rows) {
    std::vector<double> c(static_cast<std::size_t>(m.cols()), 0.0);
    for (auto i : rows)
        for (Eigen::Index j = 0; j < m.cols(); ++j) c[static_cast<std::size_t>(j)] += m(static_cast<Eigen::Index>(i), j);
    for (auto& v : c) v /= static_cast<double>(rows.size());
    return c;
}

}  // namespace

std::size_t nearest_row(const Matrix& reference, std::span<const double> row) {
    if (reference.rows() == 0) throw DataError(kModule, "reference set is empty");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < reference.rows(); ++r) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < reference.cols(); ++j) {
            const double t = reference(r, j) - row[static_cast<std::size_t>(j)];
            d += t * t;
        }
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(r);
        }
    }
    return best;
}

PrototypeTable prototypes(const TabularDataset& ds, const std::vector<std::pair<std::string, IndexList>>& groups,
                          const TabularDataset* reference, const StandardizationParams* params) {
    PrototypeTable table;
    table.names = ds.column_names();
    const auto blocks = onehot_blocks(ds);
    Matrix ds_std, ref_std;
    if (reference) {
        if (reference->column_names() != table.names)
            throw DataError(kModule, "reference set schema does not match");
        if (params) {
            ds_std = standardize(ds, *params).data.values();
            ref_std = standardize(*reference, *params).data.values();
            if (ds_std.cols() != ds.values().cols())
                throw DataError(kModule, "standardization drops features; prototypes need the full schema");
        } else {
            auto fitted = standardize(*reference);
            if (!fitted.params.dropped.empty())
                throw DataError(kModule, "reference set has constant features; pass standardization parameters");
            ds_std = standardize(ds, fitted.params).data.values();
            ref_std = fitted.data.values();
        }
    }
    for (const auto& [name, rows] : groups) {
        if (rows.empty()) throw DataError(kModule, "prototype group '" + name + "' is empty");
        Prototype p;
        p.group = name;
        p.members = rows.size();
        p.centroid = mean_rows(ds.values(), rows);
        collapse_blocks(p.centroid, blocks);
        if (reference) {
            IndexList nn;
            for (auto i : rows)
                nn.push_back(nearest_row(ref_std, {ds_std.row(static_cast<Eigen::Index>(i)).data(),
                                                   static_cast<std::size_t>(ds_std.cols())}));
            auto proto = mean_rows(reference->values(), nn);
            collapse_blocks(proto, blocks);
            p.nearest_reference = std::move(proto);
        }
        table.prototypes.push_back(std::move(p));
    }
    return table;
}

Projection2D project_2d(const Representer& rep, const TabularDataset& ds, const std::vector<std::string>& labels) {
    if (rep.input_dim() < 2) throw DataError(kModule, "2-D projection needs at least 2 features");
    if (labels.size() != ds.rows()) throw DataError(kModule, "one label per instance is required");
    Projection2D out;
    out.coords = transform(rep, ds, 2);
    out.labels = labels;
    return out;
}

void write_ranking_csv(const std::string& path, const StratificationReport& report) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f.precision(17);
    f << "rank,instance,uncertainty,inconsistency,inconsistent\n";
    for (std::size_t r = 0; r < report.ranking.size(); ++r) {
        const auto i = report.ranking[r];
        f << r << ',' << i << ',' << report.uncertainty[i] << ',' << report.inconsistency.fraction[i] << ','
          << (report.inconsistency.flagged[i] ? 1 : 0) << '\n';
    }
}

void write_projection_csv(const std::string& path, const Projection2D& proj) {
    std::ofstream f(path);
    if (!f) throw DataError(kModule, "cannot write '" + path + "'");
    f.precision(17);
    f << "instance,pc1,pc2,group\n";
    for (Eigen::Index i = 0; i < proj.coords.rows(); ++i)
        f << i << ',' << proj.coords(i, 0) << ',' << proj.coords(i, 1) << ',' << proj.labels[static_cast<std::size_t>(i)]
          << '\n';
}

}  // namespace datasuite
