#include "datasuite/pair_copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "datasuite/error.hpp"
#include "datasuite/stats.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "generator";
constexpr double kEdge = 1e-12;

double clamp_unit(double u) { return std::clamp(u, kEdge, 1.0 - kEdge); }

double log_add_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Debye function D1(x) = (1/x) * integral_0^x t / (e^t - 1) dt, by composite Simpson.
double debye1(double x) {
    if (std::abs(x) < 1e-8) return 1.0;
    const int n = 400;
    const double h = x / n;
    auto f = [](double t) { return std::abs(t) < 1e-12 ? 1.0 : t / std::expm1(t); };
    double s = f(0.0) + f(x);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return s * h / 3.0 / x;
}

// ---- Gaussian ----
double gauss_log_pdf(double rho, double u, double v) {
    const double x = stats::normal_quantile(u);
    const double y = stats::normal_quantile(v);
    const double r2 = 1.0 - rho * rho;
    return -0.5 * std::log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2);
}

double gauss_h(double rho, double u, double v) {
    const double x = stats::normal_quantile(u);
    const double y = stats::normal_quantile(v);
    return stats::normal_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

double gauss_h_inv(double rho, double w, double v) {
    const double z = stats::normal_quantile(w);
    const double y = stats::normal_quantile(v);
    return stats::normal_cdf(z * std::sqrt(1.0 - rho * rho) + rho * y);
}

// ---- Clayton (theta > 0) ----
// log(u^-t + v^-t - 1)
double clayton_log_sum(double t, double lu, double lv) {
    const double a = -t * lu;
    const double b = -t * lv;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

double clayton_log_pdf(double t, double u, double v) {
    const double lu = std::log(u), lv = std::log(v);
    return std::log1p(t) + (-1.0 - t) * (lu + lv) + (-1.0 / t - 2.0) * clayton_log_sum(t, lu, lv);
}

double clayton_h(double t, double u, double v) {
    const double lu = std::log(u), lv = std::log(v);
    return std::exp((-t - 1.0) * lv + (-1.0 / t - 1.0) * clayton_log_sum(t, lu, lv));
}

double clayton_h_inv(double t, double w, double v) {
    const double b = -t * std::log(v);
    const double a_minus_b = -t / (t + 1.0) * std::log(w);
    const double log_s = b + std::log(std::expm1(a_minus_b) + std::exp(-b));
    return std::exp(-log_s / t);
}

// ---- Gumbel (theta >= 1) ----
double gumbel_log_pdf(double t, double u, double v) {
    const double lu = std::log(u), lv = std::log(v);
    const double lx = std::log(-lu), ly = std::log(-lv);
    const double log_s = log_add_exp(t * lx, t * ly);
    const double a = std::exp(log_s / t);
    return -a - lu - lv + (t - 1.0) * (lx + ly) + (1.0 / t - 2.0) * log_s + std::log(a + t - 1.0);
}

double gumbel_h(double t, double u, double v) {
    const double lv = std::log(v);
    const double lx = std::log(-std::log(u)), ly = std::log(-lv);
    const double log_s = log_add_exp(t * lx, t * ly);
    const double a = std::exp(log_s / t);
    return std::exp(-a - lv + (t - 1.0) * ly + (1.0 / t - 1.0) * log_s);
}

// ---- Frank (theta != 0) ----
double frank_log_pdf(double t, double u, double v) {
    const double em = -std::expm1(-t);  // 1 - e^-t
    const double den = em - std::expm1(-t * u) * std::expm1(-t * v);
    return std::log(t * em) - t * (u + v) - 2.0 * std::log(std::abs(den));
}

double frank_h(double t, double u, double v) {
    const double num = std::exp(-t * v) * std::expm1(-t * u);
    const double den = std::expm1(-t) + std::expm1(-t * u) * std::expm1(-t * v);
    return num / den;
}

double frank_h_inv(double t, double w, double v) {
    const double a = w * std::expm1(-t) / (std::exp(-t * v) - w * std::expm1(-t * v));
    return -std::log1p(a) / t;
}

double bisect_h_inverse(const PairCopula& c, double w, double v) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (c.h(mid, v) < w)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Gaussian: return "gaussian";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Gumbel: return "gumbel";
    }
    return "frank";
}

CopulaFamily copula_family_from_string(const std::string& s) {
    if (s == "gaussian") return CopulaFamily::Gaussian;
    if (s == "frank") return CopulaFamily::Frank;
    if (s == "clayton") return CopulaFamily::Clayton;
    if (s == "gumbel") return CopulaFamily::Gumbel;
    throw DataError(kModule, "unknown copula family '" + s + "'");
}

ParameterBounds parameter_bounds(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Gaussian: return {-0.999, 0.999};
        case CopulaFamily::Frank: return {-35.0, 35.0};
        case CopulaFamily::Clayton: return {1e-6, 28.0};
        case CopulaFamily::Gumbel: return {1.0, 17.0};
    }
    return {0.0, 0.0};
}

PairCopula PairCopula::independence() { return PairCopula{}; }

PairCopula PairCopula::make(CopulaFamily family, double theta) {
    const auto b = parameter_bounds(family);
    if (theta < b.lower || theta > b.upper)
        throw UsageError(kModule, std::string("theta outside the valid domain of the ") + to_string(family) +
                                      " family");
    PairCopula c;
    c.family = family;
    c.theta = theta;
    c.independent = false;
    if (family == CopulaFamily::Frank && std::abs(theta) < 1e-10) {
        c.independent = true;
        c.theta = 0.0;
    }
    return c;
}

double PairCopula::log_pdf(double u, double v) const {
    if (independent) return 0.0;
    u = clamp_unit(u);
    v = clamp_unit(v);
    switch (family) {
        case CopulaFamily::Gaussian: return gauss_log_pdf(theta, u, v);
        case CopulaFamily::Frank: return frank_log_pdf(theta, u, v);
        case CopulaFamily::Clayton: return clayton_log_pdf(theta, u, v);
        case CopulaFamily::Gumbel:
            return theta == 1.0 ? 0.0 : gumbel_log_pdf(theta, u, v);
    }
    return 0.0;
}

double PairCopula::pdf(double u, double v) const { return std::exp(log_pdf(u, v)); }

double PairCopula::h(double u, double v) const {
    if (independent) return u;
    u = clamp_unit(u);
    v = clamp_unit(v);
    double out = u;
    switch (family) {
        case CopulaFamily::Gaussian: out = gauss_h(theta, u, v); break;
        case CopulaFamily::Frank: out = frank_h(theta, u, v); break;
        case CopulaFamily::Clayton: out = clayton_h(theta, u, v); break;
        case CopulaFamily::Gumbel: out = theta == 1.0 ? u : gumbel_h(theta, u, v); break;
    }
    return clamp_unit(out);
}

double PairCopula::h_inverse(double w, double v) const {
    if (independent) return w;
    w = clamp_unit(w);
    v = clamp_unit(v);
    double out = w;
    switch (family) {
        case CopulaFamily::Gaussian: out = gauss_h_inv(theta, w, v); break;
        case CopulaFamily::Frank: out = frank_h_inv(theta, w, v); break;
        case CopulaFamily::Clayton: out = clayton_h_inv(theta, w, v); break;
        case CopulaFamily::Gumbel: out = theta == 1.0 ? w : bisect_h_inverse(*this, w, v); break;
    }
    if (!std::isfinite(out)) out = bisect_h_inverse(*this, w, v);
    return clamp_unit(out);
}

double PairCopula::kendall_tau() const {
    if (independent) return 0.0;
    return tau_from_theta(family, theta);
}

double PairCopula::log_likelihood_of(std::span<const double> u, std::span<const double> v) const {
    if (independent) return 0.0;
    double ll = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) ll += log_pdf(u[i], v[i]);
    return ll;
}

double tau_from_theta(CopulaFamily family, double theta) {
    switch (family) {
        case CopulaFamily::Gaussian: return 2.0 * std::asin(theta) / std::numbers::pi;
        case CopulaFamily::Clayton: return theta / (theta + 2.0);
        case CopulaFamily::Gumbel: return 1.0 - 1.0 / theta;
        case CopulaFamily::Frank:
            if (std::abs(theta) < 1e-8) return 0.0;
            return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
    }
    return 0.0;
}

double theta_from_tau(CopulaFamily family, double tau) {
    const auto b = parameter_bounds(family);
    double theta = 0.0;
    switch (family) {
        case CopulaFamily::Gaussian: theta = std::sin(std::numbers::pi * tau / 2.0); break;
        case CopulaFamily::Clayton: theta = tau >= 1.0 ? b.upper : 2.0 * tau / (1.0 - tau); break;
        case CopulaFamily::Gumbel: theta = tau >= 1.0 ? b.upper : 1.0 / (1.0 - tau); break;
        case CopulaFamily::Frank: {
            // tau is increasing in theta; bisect on the bounded domain
            double lo = b.lower, hi = b.upper;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (tau_from_theta(CopulaFamily::Frank, mid) < tau)
                    lo = mid;
                else
                    hi = mid;
            }
            theta = 0.5 * (lo + hi);
            break;
        }
    }
    return std::clamp(theta, b.lower, b.upper);
}

PairCopula fit_pair_family(CopulaFamily family, std::span<const double> u, std::span<const double> v, double tau,
                           const PairFitOptions& options) {
    const auto b = parameter_bounds(family);
    auto negll = [&](double theta) {
        const double ll = PairCopula::make(family, theta).log_likelihood_of(u, v);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };
    const int bits = static_cast<int>(std::ceil(-std::log2(options.tolerance))) + 1;
    std::uintmax_t max_iter = 200;
    auto [theta, nll] = boost::math::tools::brent_find_minima(negll, b.lower, b.upper, bits, max_iter);
    const double theta0 = theta_from_tau(family, tau);
    const double nll0 = negll(theta0);
    if (nll0 < nll) {
        // Brent landed in a worse basin than the tau-inversion start; refine around theta0.
        const double width = 0.25 * (b.upper - b.lower);
        max_iter = 200;
        auto refined = boost::math::tools::brent_find_minima(negll, std::max(b.lower, theta0 - width),
                                                             std::min(b.upper, theta0 + width), bits, max_iter);
        theta = refined.first;
        nll = refined.second;
        if (nll0 < nll) {
            theta = theta0;
            nll = nll0;
        }
    }
    if (!(nll < std::numeric_limits<double>::max()))
        throw NumericalError(kModule, std::string("likelihood of the ") + to_string(family) + " family is not finite");
    PairCopula c = PairCopula::make(family, theta);
    c.log_likelihood = -nll;
    const double span = b.upper - b.lower;
    c.near_comonotone = theta >= b.upper - 1e-3 * span;
    return c;
}

PairCopula fit_pair_copula(std::span<const double> u, std::span<const double> v, const PairFitOptions& options) {
    if (u.size() != v.size()) throw UsageError(kModule, "pair copula inputs differ in length");
    if (u.size() < 10) throw DataError(kModule, "pair copula fit needs at least 10 observations");
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0))
            throw DataError(kModule, "pair copula inputs must lie strictly inside (0,1)");

    const double tau = stats::kendall_tau(u, v);
    if (std::abs(tau) < options.independence_tau) return PairCopula::independence();

    std::vector<CopulaFamily> candidates{CopulaFamily::Gaussian, CopulaFamily::Frank};
    if (tau > 0.0) {
        candidates.push_back(CopulaFamily::Clayton);
        candidates.push_back(CopulaFamily::Gumbel);
    }
    PairCopula best = PairCopula::independence();
    std::vector<std::string> warnings;
    bool any = false;
    for (auto fam : candidates) {
        try {
            auto c = fit_pair_family(fam, u, v, tau, options);
            if (!any || c.log_likelihood > best.log_likelihood) {
                best = std::move(c);
                any = true;
            }
        } catch (const NumericalError& e) {
            warnings.push_back(std::string(to_string(fam)) + " skipped: " + e.what());
        }
    }
    if (!any) {
        best = PairCopula::independence();
        warnings.push_back("all families failed; using independence");
    } else if (best.log_likelihood < 0.0) {
        // Nothing beats independence.
        best = PairCopula::independence();
    }
    best.warnings = std::move(warnings);
    return best;
}

}  // namespace datasuite
