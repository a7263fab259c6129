#pragma once

#include <string>
#include <vector>

#include "datasuite/dataset.hpp"

namespace datasuite {

// Standardization followed by a PCA projection onto the leading `latent_dim`
// components. The full orthonormal basis is retained so 2-D projections and
// reconstruction studies do not need the training data.
struct Representer {
    StandardizationParams standardization;
    Matrix components;              // d_X x r, orthonormal columns, descending variance
    std::vector<double> explained_variance;  // per component, sample variance of the scores
    std::size_t latent_dim = 0;
    std::vector<std::string> warnings;

    std::size_t input_dim() const { return standardization.size(); }
    Matrix basis() const { return components.leftCols(static_cast<Eigen::Index>(latent_dim)); }
    // Share of total variance captured by the leading k components.
    double explained_variance_ratio(std::size_t k) const;
};

std::size_t default_latent_dim(std::size_t input_dim);

// `latent_dim` of 0 selects the default max(1, floor(d_X / 2)).
Representer fit_representer(const TabularDataset& augmented, std::size_t latent_dim = 0);

// f(x) = W^T standardize(x); `dims` of 0 uses the representer's latent_dim.
Matrix transform(const Representer& rep, const TabularDataset& ds, std::size_t dims = 0);
Matrix transform_standardized(const Representer& rep, const Matrix& z, std::size_t dims = 0);

}  // namespace datasuite
