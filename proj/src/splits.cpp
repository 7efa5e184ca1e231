#include "tactile/splits.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

Splits make_splits(std::size_t perturbations, double dev_fraction, double val_fraction,
                   std::uint64_t seed) {
  if (perturbations < 3) throw ConfigError("need at least 3 perturbations to split");
  if (!(dev_fraction > 0.0) || !(val_fraction > 0.0) || dev_fraction + val_fraction >= 1.0) {
    throw ConfigError("split fractions must be positive with dev + val < 1");
  }
  const auto p = static_cast<double>(perturbations);
  const auto dev_count = static_cast<std::size_t>(std::llround(dev_fraction * p));
  const auto val_count = static_cast<std::size_t>(std::llround(val_fraction * p));
  if (dev_count == 0 || val_count == 0 || dev_count + val_count >= perturbations) {
    throw ConfigError("split fractions leave an empty development, validation or test set");
  }

  Rng rng(seed);
  const auto order = rng.permutation(perturbations);
  Splits splits;
  splits.development.assign(order.begin(), order.begin() + dev_count);
  splits.validation.assign(order.begin() + dev_count, order.begin() + dev_count + val_count);
  splits.test.assign(order.begin() + dev_count + val_count, order.end());
  std::sort(splits.development.begin(), splits.development.end());
  std::sort(splits.validation.begin(), splits.validation.end());
  std::sort(splits.test.begin(), splits.test.end());
  return splits;
}

}  // namespace tactile
