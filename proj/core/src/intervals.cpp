#include "datasuite/intervals.hpp"

#include <cmath>
#include <fstream>

#include "datasuite/error.hpp"

namespace datasuite {

bool IntervalSet::contains(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
    const double x = observed(r, c);
    return x >= lower(r, c) && x <= upper(r, c);
}

double IntervalSet::gamma(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
    return std::abs(observed(r, c) - center(r, c)) / sigma(r, c);
}

Matrix IntervalSet::clipped_lower() const {
    Matrix out = lower;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        out.col(j) = out.col(j).cwiseMax(ranges[static_cast<std::size_t>(j)].lower).cwiseMin(ranges[static_cast<std::size_t>(j)].upper);
    return out;
}

Matrix IntervalSet::clipped_upper() const {
    Matrix out = upper;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        out.col(j) = out.col(j).cwiseMin(ranges[static_cast<std::size_t>(j)].upper).cwiseMax(ranges[static_cast<std::size_t>(j)].lower);
    return out;
}

IntervalSet IntervalSet::select_rows(std::span<const std::size_t> rows) const {
    IntervalSet out;
    out.names = names;
    out.ranges = ranges;
    out.epsilon = epsilon;
    const auto n = static_cast<Eigen::Index>(rows.size());
    auto pick = [&](const Matrix& m) {
        Matrix s(n, m.cols());
        for (Eigen::Index k = 0; k < n; ++k) s.row(k) = m.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k)]));
        return s;
    };
    out.lower = pick(lower);
    out.upper = pick(upper);
    out.observed = pick(observed);
    out.center = center.size() ? pick(center) : Matrix();
    out.sigma = sigma.size() ? pick(sigma) : Matrix();
    return out;
}

void IntervalSet::validate() const {
    const auto d = static_cast<Eigen::Index>(names.size());
    if (ranges.size() != names.size() || lower.cols() != d || upper.cols() != d || observed.cols() != d ||
        lower.rows() != observed.rows() || upper.rows() != observed.rows())
        throw DataError("stratify", "interval set has inconsistent shapes");
    for (Eigen::Index i = 0; i < lower.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (!(lower(i, j) <= upper(i, j))) throw DataError("stratify", "interval with lower bound above upper bound");
}

void write_intervals_csv(const std::string& path, const IntervalSet& set) {
    std::ofstream f(path);
    if (!f) throw DataError("conformal", "cannot write '" + path + "'");
    f.precision(17);
    f << "instance,feature,lower,upper,observed,gamma,lower_clipped,upper_clipped\n";
    const Matrix cl = set.clipped_lower();
    const Matrix cu = set.clipped_upper();
    for (std::size_t i = 0; i < set.instances(); ++i)
        for (std::size_t j = 0; j < set.features(); ++j) {
            const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            f << i << ',' << set.names[j] << ',' << set.lower(r, c) << ',' << set.upper(r, c) << ','
              << set.observed(r, c) << ',' << (set.sigma.size() ? set.gamma(i, j) : std::nan("")) << ',' << cl(r, c)
              << ',' << cu(r, c) << '\n';
        }
}

}  // namespace datasuite
