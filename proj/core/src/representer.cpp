#include "datasuite/representer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "datasuite/error.hpp"

namespace datasuite {

namespace {
constexpr const char* kModule = "representer";
}

std::size_t default_latent_dim(std::size_t input_dim) { return std::max<std::size_t>(1, input_dim / 2); }

double Representer::explained_variance_ratio(std::size_t k) const {
    if (k > explained_variance.size()) throw UsageError(kModule, "more components requested than fitted");
    double total = 0.0, lead = 0.0;
    for (std::size_t i = 0; i < explained_variance.size(); ++i) {
        total += explained_variance[i];
        if (i < k) lead += explained_variance[i];
    }
    return total > 0.0 ? lead / total : 0.0;
}

Representer fit_representer(const TabularDataset& augmented, std::size_t latent_dim) {
    if (augmented.rows() <= augmented.cols())
        throw DataError(kModule, "PCA needs more rows than features (" + std::to_string(augmented.rows()) + " <= " +
                                     std::to_string(augmented.cols()) + ")");
    auto [z, params] = standardize(augmented);
    Representer rep;
    rep.standardization = params;
    for (const auto& name : params.dropped) rep.warnings.push_back("dropped zero-variance feature '" + name + "'");

    const Matrix& x = z.values();
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::MatrixXd v = svd.matrixV();

    const auto d = static_cast<std::size_t>(x.cols());
    const double tol = std::max<double>(x.rows(), x.cols()) * std::numeric_limits<double>::epsilon() *
                       (s.size() ? s(0) : 0.0);
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) rank += s(k) > tol ? 1 : 0;

    // Deterministic sign: the largest-magnitude loading of each component is positive.
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        Eigen::Index arg = 0;
        v.col(k).cwiseAbs().maxCoeff(&arg);
        if (v(arg, k) < 0.0) v.col(k) *= -1.0;
    }
    rep.components = v;
    const double denom = static_cast<double>(x.rows() - 1);
    for (Eigen::Index k = 0; k < s.size(); ++k) rep.explained_variance.push_back(s(k) * s(k) / denom);

    std::size_t want = latent_dim == 0 ? default_latent_dim(d) : latent_dim;
    if (want > d) throw UsageError(kModule, "latent dimension exceeds input dimension");
    if (rank < want) {
        rep.warnings.push_back("rank-deficient input: keeping " + std::to_string(std::max<std::size_t>(rank, 1)) +
                               " of " + std::to_string(want) + " components");
        want = std::max<std::size_t>(rank, 1);
    }
    rep.latent_dim = want;
    return rep;
}

Matrix transform_standardized(const Representer& rep, const Matrix& z, std::size_t dims) {
    const std::size_t k = dims == 0 ? rep.latent_dim : dims;
    if (k > static_cast<std::size_t>(rep.components.cols()))
        throw UsageError(kModule, "requested more components than the basis holds");
    if (static_cast<std::size_t>(z.cols()) != rep.input_dim())
        throw DataError(kModule, "input width does not match the representer");
    return z * rep.components.leftCols(static_cast<Eigen::Index>(k));
}

Matrix transform(const Representer& rep, const TabularDataset& ds, std::size_t dims) {
    auto z = standardize(ds, rep.standardization);
    return transform_standardized(rep, z.data.values(), dims);
}

}  // namespace datasuite
