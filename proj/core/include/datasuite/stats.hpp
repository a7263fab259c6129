#pragma once

#include <span>
#include <vector>

namespace datasuite::stats {

double normal_cdf(double x);
double normal_quantile(double p);

// Kendall tau-b in O(n log n) (Knight's merge-sort algorithm).
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Average ranks (1-based), ties receive the mean rank.
std::vector<double> ranks(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

}  // namespace datasuite::stats
