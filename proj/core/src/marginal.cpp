#include "datasuite/marginal.hpp"

#include <algorithm>
#include <cmath>

#include "datasuite/error.hpp"

namespace datasuite {

EmpiricalMarginal EmpiricalMarginal::fit(std::span<const double> values, bool discrete) {
    if (values.empty()) throw DataError("generator", "cannot fit a marginal to an empty column");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    EmpiricalMarginal m;
    m.n_ = sorted.size();
    m.discrete_ = discrete;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        // ranks i+1..j+1, positions (k - 0.5)/n averaged over the tie group
        const double pos = (0.5 * static_cast<double>(i + j) + 0.5) / n;
        m.support_.push_back(sorted[i]);
        m.probs_.push_back(pos);
        i = j + 1;
    }
    return m;
}

EmpiricalMarginal EmpiricalMarginal::from_table(std::vector<double> support, std::vector<double> probs,
                                                std::size_t n, bool discrete) {
    if (support.empty() || support.size() != probs.size() || n == 0)
        throw DataError("generator", "malformed marginal table");
    for (std::size_t k = 1; k < support.size(); ++k)
        if (!(support[k] > support[k - 1]) || probs[k] < probs[k - 1])
            throw DataError("generator", "marginal table is not increasing");
    EmpiricalMarginal m;
    m.support_ = std::move(support);
    m.probs_ = std::move(probs);
    m.n_ = n;
    m.discrete_ = discrete;
    return m;
}

double EmpiricalMarginal::cdf(double x) const {
    const double n = static_cast<double>(n_);
    const double lo = 0.5 / n;
    const double hi = 1.0 - 0.5 / n;
    double u;
    if (support_.size() == 1) {
        u = 0.5;
    } else if (x <= support_.front()) {
        u = probs_.front();
    } else if (x >= support_.back()) {
        u = probs_.back();
    } else {
        auto it = std::upper_bound(support_.begin(), support_.end(), x);
        const auto k = static_cast<std::size_t>(it - support_.begin());
        const double t = (x - support_[k - 1]) / (support_[k] - support_[k - 1]);
        u = probs_[k - 1] + t * (probs_[k] - probs_[k - 1]);
    }
    return std::clamp(u, lo, hi);
}

double EmpiricalMarginal::quantile(double u) const {
    if (support_.size() == 1) return support_.front();
    double x;
    if (u <= probs_.front()) {
        x = support_.front();
    } else if (u >= probs_.back()) {
        x = support_.back();
    } else {
        auto it = std::upper_bound(probs_.begin(), probs_.end(), u);
        const auto k = static_cast<std::size_t>(it - probs_.begin());
        const double t = (u - probs_[k - 1]) / (probs_[k] - probs_[k - 1]);
        x = support_[k - 1] + t * (support_[k] - support_[k - 1]);
    }
    if (discrete_) {
        auto it = std::lower_bound(support_.begin(), support_.end(), x);
        if (it == support_.end()) return support_.back();
        if (it != support_.begin() && (x - *(it - 1)) < (*it - x)) --it;
        return *it;
    }
    return x;
}

}  // namespace datasuite
