#include "datasuite/vine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "datasuite/error.hpp"
#include "datasuite/stats.hpp"

namespace datasuite {

namespace {

constexpr const char* kModule = "generator";

const PairCopula& edge(const VineModel& m, std::size_t tree, std::size_t i) {
    static const PairCopula indep = PairCopula::independence();
    if (tree >= m.trees.size()) return indep;
    return m.trees[tree][i];
}

}  // namespace

std::size_t VineModel::pair_count() const {
    std::size_t n = 0;
    for (const auto& t : trees) n += t.size();
    return n;
}

std::size_t VineModel::independent_pair_count() const {
    std::size_t n = 0;
    for (const auto& t : trees)
        for (const auto& c : t) n += c.independent ? 1 : 0;
    return n;
}

double VineModel::log_copula_density(std::span<const double> u) const {
    const std::size_t d = dimension();
    if (u.size() != d) throw UsageError(kModule, "density argument has the wrong dimension");
    std::vector<double> fwd(d), bwd(d);
    for (std::size_t p = 0; p < d; ++p) fwd[p] = bwd[p] = u[order[p]];
    double ll = 0.0;
    for (std::size_t t = 0; t + 1 < d && t < trees.size(); ++t) {
        std::vector<double> nf(d - 1 - t), nb(d - 1 - t);
        for (std::size_t i = 0; i + t + 1 < d; ++i) {
            const auto& c = trees[t][i];
            const double a = fwd[i], b = bwd[i + 1];
            ll += c.log_pdf(a, b);
            nf[i] = c.h(a, b);
            nb[i] = c.h(b, a);
        }
        fwd = std::move(nf);
        bwd = std::move(nb);
    }
    return ll;
}

std::vector<std::size_t> max_tau_chain(const Matrix& u) {
    const auto d = static_cast<std::size_t>(u.cols());
    if (d < 2) {
        std::vector<std::size_t> one(d);
        if (d == 1) one[0] = 0;
        return one;
    }
    std::vector<std::vector<double>> tau(d, std::vector<double>(d, 0.0));
    std::vector<std::vector<double>> cols(d);
    for (std::size_t j = 0; j < d; ++j) {
        const Vector c = u.col(static_cast<Eigen::Index>(j));
        cols[j].assign(c.data(), c.data() + c.size());
    }
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            tau[i][j] = tau[j][i] = std::abs(stats::kendall_tau(cols[i], cols[j]));
            if (tau[i][j] > tau[bi][bj]) {
                bi = i;
                bj = j;
            }
        }
    std::deque<std::size_t> path{bi, bj};
    std::vector<bool> used(d, false);
    used[bi] = used[bj] = true;
    while (path.size() < d) {
        double best = -1.0;
        std::size_t cand = 0;
        bool front = false;
        for (std::size_t k = 0; k < d; ++k) {
            if (used[k]) continue;
            if (tau[path.front()][k] > best) {
                best = tau[path.front()][k];
                cand = k;
                front = true;
            }
            if (tau[path.back()][k] > best) {
                best = tau[path.back()][k];
                cand = k;
                front = false;
            }
        }
        used[cand] = true;
        if (front)
            path.push_front(cand);
        else
            path.push_back(cand);
    }
    return {path.begin(), path.end()};
}

VineModel fit_dvine(const TabularDataset& ds, const VineFitOptions& options) {
    const std::size_t d = ds.cols();
    const std::size_t n = ds.rows();
    if (d < 2) throw DataError(kModule, "a vine needs at least 2 features, got " + std::to_string(d));
    if (ds.has_categorical()) throw DataError(kModule, "vine fitting requires encoded numeric data");
    if (n < 10) throw DataError(kModule, "vine fitting needs at least 10 rows");

    VineModel model;
    model.names = ds.column_names();
    Matrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        const Vector col = ds.column_values(j);
        auto m = EmpiricalMarginal::fit({col.data(), static_cast<std::size_t>(col.size())},
                                        ds.column(j).kind == ColumnKind::OneHotDerived);
        if (m.low_resolution())
            model.warnings.push_back("feature '" + ds.column(j).name + "' has fewer than 10 distinct values");
        for (std::size_t i = 0; i < n; ++i)
            u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.cdf(col(static_cast<Eigen::Index>(i)));
        model.marginals.push_back(std::move(m));
    }

    if (options.order == VineOrder::MaxTauChain) {
        model.order = max_tau_chain(u);
    } else {
        model.order.resize(d);
        for (std::size_t j = 0; j < d; ++j) model.order[j] = j;
    }

    const std::size_t depth = std::min(d - 1, options.truncation.value_or(d - 1));
    std::vector<std::vector<double>> fwd(d), bwd(d);
    for (std::size_t p = 0; p < d; ++p) {
        const Vector c = u.col(static_cast<Eigen::Index>(model.order[p]));
        fwd[p].assign(c.data(), c.data() + c.size());
        bwd[p] = fwd[p];
    }
    for (std::size_t t = 0; t < depth; ++t) {
        const std::size_t edges = d - 1 - t;
        std::vector<PairCopula> tree;
        tree.reserve(edges);
        std::vector<std::vector<double>> nf(edges), nb(edges);
        for (std::size_t i = 0; i < edges; ++i) {
            const auto& a = fwd[i];
            const auto& b = bwd[i + 1];
            PairCopula c = fit_pair_copula(a, b, options.pair);
            for (const auto& w : c.warnings)
                model.warnings.push_back("tree " + std::to_string(t + 1) + " edge " + std::to_string(i) + ": " + w);
            nf[i].resize(n);
            nb[i].resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                nf[i][r] = c.h(a[r], b[r]);
                nb[i][r] = c.h(b[r], a[r]);
            }
            tree.push_back(std::move(c));
        }
        model.trees.push_back(std::move(tree));
        fwd = std::move(nf);
        bwd = std::move(nb);
    }
    return model;
}

Matrix sample_dvine_uniforms(const VineModel& model, std::size_t n, std::uint64_t seed) {
    const std::size_t d = model.dimension();
    if (d < 2 || model.order.size() != d) throw UsageError(kModule, "vine model is not fitted");
    if (n == 0) throw UsageError(kModule, "sample size must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    constexpr int kRetries = 10;

    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<std::vector<double>> fwd(d, std::vector<double>(d)), bwd(d, std::vector<double>(d));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < d; ++k) {
            bool ok = false;
            for (int attempt = 0; attempt < kRetries && !ok; ++attempt) {
                double v = std::clamp(unif(rng), 1e-12, 1.0 - 1e-12);
                for (std::size_t step = k; step-- > 0;) {
                    const std::size_t t = step;
                    const std::size_t i = k - t - 1;
                    v = edge(model, t, i).h_inverse(v, fwd[t][i]);
                    bwd[t][k - t] = v;
                }
                if (k == 0) bwd[0][0] = v;
                ok = std::isfinite(v);
                fwd[0][k] = bwd[0][k];
                for (std::size_t t = 0; t < k && ok; ++t) {
                    const std::size_t i = k - t - 1;
                    const auto& c = edge(model, t, i);
                    fwd[t + 1][i] = c.h(fwd[t][i], bwd[t][i + 1]);
                    ok = std::isfinite(fwd[t + 1][i]);
                }
            }
            if (!ok) throw NumericalError(kModule, "inverse h-function failed repeatedly while sampling");
        }
        for (std::size_t p = 0; p < d; ++p)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(model.order[p])) = bwd[0][p];
    }
    return out;
}

TabularDataset sample_dvine(const VineModel& model, const TabularDataset& schema, std::size_t n, std::uint64_t seed) {
    if (schema.column_names() != model.names) throw DataError(kModule, "schema does not match the vine's features");
    const Matrix u = sample_dvine_uniforms(model, n, seed);
    Matrix x(u.rows(), u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const auto& m = model.marginals[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < u.rows(); ++i) x(i, j) = m.quantile(u(i, j));
    }
    return TabularDataset(schema.name() + "+copula", schema.columns(), std::move(x));
}

}  // namespace datasuite
