#include "datasuite/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "datasuite/error.hpp"
#include "datasuite/stratify.hpp"

namespace datasuite {

IntervalQuality interval_quality(const IntervalSet& intervals) {
    intervals.validate();
    const std::size_t n = intervals.instances();
    const std::size_t d = intervals.features();
    IntervalQuality q;
    q.names = intervals.names;
    q.per_feature.assign(d, {});
    for (std::size_t j = 0; j < d; ++j) {
        auto& t = q.per_feature[j];
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            const double x = intervals.observed(r, c);
            const double l = intervals.lower(r, c);
            const double u = intervals.upper(r, c);
            if (intervals.contains(i, j)) {
                t.coverage += 1.0;
                t.excess += std::min(x - l, u - x);
            } else {
                t.deficit += std::min(std::abs(x - l), std::abs(x - u));
            }
        }
        q.pooled.coverage += t.coverage;
        q.pooled.deficit += t.deficit;
        q.pooled.excess += t.excess;
        if (n > 0) {
            t.coverage /= static_cast<double>(n);
            t.deficit /= static_cast<double>(n);
            t.excess /= static_cast<double>(n);
        }
    }
    const double total = static_cast<double>(n * d);
    if (total > 0) {
        q.pooled.coverage /= total;
        q.pooled.deficit /= total;
        q.pooled.excess /= total;
    }
    return q;
}

std::vector<double> mpi_proportions() {
    std::vector<double> p;
    for (int k = 1; k <= 20; ++k) p.push_back(0.05 * k);
    return p;
}

std::size_t group_size(double proportion, std::size_t n) {
    const double raw = proportion * static_cast<double>(n);
    const double r = std::round(raw);
    if (std::abs(raw - r) <= 1e-9 * std::max(1.0, raw)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(raw));
}

MpiResult mpi(const SubsetAccuracy& accuracy, const IndexList& ranking, const std::vector<double>& proportions) {
    MpiResult out;
    double sum = 0.0;
    for (double p : proportions) {
        const std::size_t count = std::min(group_size(p, ranking.size()), ranking.size());
        if (count == 0) {
            out.skipped.push_back(p);
            continue;
        }
        const auto g = ranking_tails(ranking, count);
        const auto ac = accuracy(g.certain);
        const auto au = accuracy(g.uncertain);
        if (!ac || !au) {
            out.skipped.push_back(p);
            continue;
        }
        out.points.push_back({p, count, *ac, *au});
        sum += *ac - *au;
    }
    out.mpi = out.points.empty() ? 0.0 : sum / static_cast<double>(out.points.size());
    return out;
}

}  // namespace datasuite
