#pragma once

#include <span>
#include <string>
#include <vector>

namespace datasuite {

enum class CopulaFamily { Gaussian, Frank, Clayton, Gumbel };

const char* to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(const std::string& s);

struct ParameterBounds {
    double lower;
    double upper;
};

// Search bounds used when fitting each family by maximum likelihood.
ParameterBounds parameter_bounds(CopulaFamily f);

// Bivariate copula C(u, v; theta). The independence copula is represented as
// Frank with `independent` set, theta = 0.
//
// h(u | v) is the conditional distribution P(U <= u | V = v) = dC/dv. All four
// families are exchangeable, so P(V <= v | U = u) is h(v | u).
struct PairCopula {
    CopulaFamily family = CopulaFamily::Frank;
    double theta = 0.0;
    double log_likelihood = 0.0;
    bool independent = true;
    bool near_comonotone = false;
    std::vector<std::string> warnings;

    static PairCopula independence();
    static PairCopula make(CopulaFamily family, double theta);

    double log_pdf(double u, double v) const;
    double pdf(double u, double v) const;
    double h(double u, double v) const;
    double h_inverse(double w, double v) const;
    double kendall_tau() const;
    double log_likelihood_of(std::span<const double> u, std::span<const double> v) const;
};

struct PairFitOptions {
    double independence_tau = 0.02;
    double tolerance = 1e-6;
};

// Family selection by maximized log-likelihood over {Gaussian, Frank, Clayton, Gumbel}.
PairCopula fit_pair_copula(std::span<const double> u, std::span<const double> v, const PairFitOptions& options = {});

// Fits one family (no selection); throws NumericalError if the likelihood is not finite.
PairCopula fit_pair_family(CopulaFamily family, std::span<const double> u, std::span<const double> v,
                           double tau, const PairFitOptions& options = {});

// Family parameter implied by a Kendall tau, clamped into the search bounds.
double theta_from_tau(CopulaFamily family, double tau);
double tau_from_theta(CopulaFamily family, double theta);

}  // namespace datasuite
