#pragma once

#include <span>
#include <vector>

namespace datasuite {

// Empirical CDF over the distinct training values with (k - 0.5)/n plotting
// positions (tied values share the mean position) and linear interpolation.
// Outputs are clamped to [0.5/n, 1 - 0.5/n]; the inverse never extrapolates
// beyond the training min/max.
class EmpiricalMarginal {
public:
    EmpiricalMarginal() = default;
    static EmpiricalMarginal fit(std::span<const double> values, bool discrete = false);
    static EmpiricalMarginal from_table(std::vector<double> support, std::vector<double> probs, std::size_t n,
                                        bool discrete);

    double cdf(double x) const;
    double quantile(double u) const;

    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probabilities() const { return probs_; }
    std::size_t sample_size() const { return n_; }
    bool discrete() const { return discrete_; }
    // Fewer than 10 distinct values.
    bool low_resolution() const { return support_.size() < 10; }

private:
    std::vector<double> support_;
    std::vector<double> probs_;
    std::size_t n_ = 0;
    bool discrete_ = false;
};

}  // namespace datasuite
