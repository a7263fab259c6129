#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datasuite/dataset.hpp"
#include "datasuite/marginal.hpp"
#include "datasuite/pair_copula.hpp"

namespace datasuite {

enum class VineOrder { InputOrder, MaxTauChain };

struct VineFitOptions {
    VineOrder order = VineOrder::InputOrder;
    // Number of trees fitted; deeper pairs are independence. Empty means all d-1 trees.
    std::optional<std::size_t> truncation;
    PairFitOptions pair;
};

// D-vine: tree t (0-based) holds d-1-t pair copulas. Edge (t, i) couples the
// variables at positions i and i+t+1 of `order`, conditioned on the positions
// strictly between them.
struct VineModel {
    std::vector<std::string> names;
    std::vector<std::size_t> order;
    std::vector<std::vector<PairCopula>> trees;
    std::vector<EmpiricalMarginal> marginals;
    std::vector<std::string> warnings;

    std::size_t dimension() const { return marginals.size(); }
    std::size_t pair_count() const;
    std::size_t independent_pair_count() const;

    // Log copula density of uniforms given in input column order.
    double log_copula_density(std::span<const double> u) const;
};

VineModel fit_dvine(const TabularDataset& ds, const VineFitOptions& options = {});

// Greedy Hamiltonian path over |Kendall tau| (starting at the strongest pair, extending either end).
std::vector<std::size_t> max_tau_chain(const Matrix& pseudo_obs);

// Pseudo-uniform draws from the copula only, in input column order.
Matrix sample_dvine_uniforms(const VineModel& model, std::size_t n, std::uint64_t seed);

// Draws n rows on the data scale (inverse PIT through each marginal).
TabularDataset sample_dvine(const VineModel& model, const TabularDataset& schema, std::size_t n, std::uint64_t seed);

}  // namespace datasuite
