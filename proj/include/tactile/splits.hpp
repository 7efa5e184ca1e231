#pragma once

#include <cstdint>
#include <vector>

namespace tactile {

/// Disjoint perturbation-index sets; shared across all objects, so splits are
/// class-balanced by construction.
struct Splits {
  std::vector<std::size_t> development;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Partitions {0..perturbations-1}: round(dev_fraction*P) development indices
/// and round(val_fraction*P) validation indices drawn uniformly at random,
/// the remainder as test. Each returned set is sorted.
Splits make_splits(std::size_t perturbations, double dev_fraction, double val_fraction,
                   std::uint64_t seed);

}  // namespace tactile
