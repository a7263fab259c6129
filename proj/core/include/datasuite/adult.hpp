#pragma once

#include <cstdint>
#include <utility>

#include "datasuite/dataset.hpp"

namespace datasuite {

// Maps the raw census-income attributes onto 11 integer-coded features plus a
// binary `salary` label. Rows with a missing ('?') attribute are dropped.
// Recognised label headers: salary, income, class.
TabularDataset prepare_adult(const TabularDataset& raw);

// Random split into two halves of approximately equal size.
std::pair<TabularDataset, TabularDataset> adult_split(const TabularDataset& prepared, std::uint64_t seed);

}  // namespace datasuite
