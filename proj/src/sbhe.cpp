#include "tactile/sbhe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void validate_params(std::size_t n, std::size_t m, std::size_t block_size) {
  if (!is_power_of_two(block_size)) throw InvalidInput("block size must be a power of 2");
  if (n == 0 || n % block_size != 0) throw DimensionError("block size must divide n");
  if (m > n) throw SelectionError("cannot select more rows than n");
  if (m < 1) throw InvalidInput("need at least one measurement");
}

// Selected rows grouped by Hadamard block.
std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> rows_by_block(
    const SbheMatrix& matrix) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> blocks;
  for (std::size_t r = 0; r < matrix.m; ++r) {
    const std::size_t row = matrix.selected_rows[r];
    blocks[row / matrix.block_size].push_back({row % matrix.block_size, r});
  }
  return blocks;
}

}  // namespace

SbheMatrix build_sbhe(std::size_t n, std::size_t m, std::size_t block_size,
                      std::uint64_t seed) {
  validate_params(n, m, block_size);
  Rng rng(seed);
  SbheMatrix matrix;
  matrix.n = n;
  matrix.m = m;
  matrix.block_size = block_size;
  matrix.seed = seed;
  matrix.scale = 1.0 / std::sqrt(static_cast<double>(block_size));
  matrix.permutation = rng.permutation(n);
  matrix.selected_rows = rng.sample_without_replacement(n, m);
  matrix.seeded = true;
  return matrix;
}

SbheMatrix sbhe_with_layout(std::size_t n, std::size_t m, std::size_t block_size,
                            std::vector<std::uint32_t> permutation,
                            std::vector<std::uint32_t> selected_rows) {
  validate_params(n, m, block_size);
  if (permutation.size() != n) throw DimensionError("permutation must have n entries");
  if (selected_rows.size() != m) throw DimensionError("need exactly m selected rows");
  std::vector<bool> seen(n, false);
  for (std::uint32_t p : permutation) {
    if (p >= n || seen[p]) throw InvalidInput("permutation is not a bijection");
    seen[p] = true;
  }
  std::vector<bool> used(n, false);
  for (std::uint32_t r : selected_rows) {
    if (r >= n || used[r]) throw SelectionError("selected rows must be distinct");
    used[r] = true;
  }
  SbheMatrix matrix;
  matrix.n = n;
  matrix.m = m;
  matrix.block_size = block_size;
  matrix.seed = 0;
  matrix.scale = 1.0 / std::sqrt(static_cast<double>(block_size));
  matrix.permutation = std::move(permutation);
  matrix.selected_rows = std::move(selected_rows);
  matrix.seeded = false;
  return matrix;
}

void fwht(std::span<double> data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw DimensionError("transform length must be a power of 2");
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double u = data[j];
        const double v = data[j + len];
        data[j] = u + v;
        data[j + len] = u - v;
      }
    }
  }
}

std::vector<double> sbhe_apply(const SbheMatrix& matrix, const std::vector<double>& x) {
  if (x.size() != matrix.n) throw DimensionError("signal length must equal n");
  std::vector<double> y(matrix.m, 0.0);
  std::vector<double> block(matrix.block_size);
  for (const auto& [b, rows] : rows_by_block(matrix)) {
    const std::size_t base = b * matrix.block_size;
    for (std::size_t i = 0; i < matrix.block_size; ++i) {
      block[i] = x[matrix.permutation[base + i]];
    }
    fwht(block);
    for (const auto& [local, out] : rows) {
      y[out] = matrix.scale * block[local];
    }
  }
  return y;
}

std::vector<double> sbhe_apply_adjoint(const SbheMatrix& matrix, const std::vector<double>& y) {
  if (y.size() != matrix.m) throw DimensionError("measurement length must equal m");
  std::vector<double> out(matrix.n, 0.0);
  std::vector<double> block(matrix.block_size);
  for (const auto& [b, rows] : rows_by_block(matrix)) {
    std::fill(block.begin(), block.end(), 0.0);
    for (const auto& [local, idx] : rows) {
      block[local] = y[idx];
    }
    fwht(block);  // Hadamard blocks are symmetric
    const std::size_t base = b * matrix.block_size;
    for (std::size_t i = 0; i < matrix.block_size; ++i) {
      out[matrix.permutation[base + i]] += matrix.scale * block[i];
    }
  }
  return out;
}

CompressedSignal compress(const SbheMatrix& matrix, const TactileFrame& frame) {
  if (frame.values.size() != matrix.n) {
    throw DimensionError("frame length does not match the measurement matrix");
  }
  CompressedSignal signal;
  signal.values = sbhe_apply(matrix, frame.values);
  signal.matrix_seed = matrix.seed;
  signal.m = matrix.m;
  signal.n = matrix.n;
  signal.block_size = matrix.block_size;
  signal.label = frame.label;
  return signal;
}

double input_coverage(const SbheMatrix& matrix) {
  // All rows of one block share the same support: the permuted positions of
  // that block. Coverage is therefore block_size * (#blocks touched) / n.
  std::vector<bool> touched(matrix.n / matrix.block_size, false);
  for (std::uint32_t r : matrix.selected_rows) touched[r / matrix.block_size] = true;
  const auto blocks = static_cast<std::size_t>(
      std::count(touched.begin(), touched.end(), true));
  return static_cast<double>(blocks * matrix.block_size) / static_cast<double>(matrix.n);
}

IsometrySummary isometry_check(const SbheMatrix& matrix, const SynthesisFn& synthesize,
                               std::size_t k, std::size_t trials, std::uint64_t seed) {
  if (k < 1) throw InvalidInput("sparsity k must be >= 1");
  if (k > matrix.n) throw InvalidInput("sparsity k cannot exceed n");
  if (trials < 1) throw InvalidInput("need at least one trial");

  Rng rng(seed);
  IsometrySummary summary;
  summary.min_ratio = std::numeric_limits<double>::infinity();
  summary.max_ratio = 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> s(matrix.n, 0.0);
    double norm2 = 0.0;
    for (std::uint32_t idx : rng.sample_without_replacement(matrix.n, k)) {
      const double v = rng.gaussian();
      s[idx] = v;
      norm2 += v * v;
    }
    if (norm2 == 0.0) {
      --t;  // all-zero draw is immeasurable; redraw
      continue;
    }
    const std::vector<double> x = synthesize ? synthesize(s) : s;
    const std::vector<double> y = sbhe_apply(matrix, x);
    double ynorm2 = 0.0;
    for (double v : y) ynorm2 += v * v;
    const double ratio = std::sqrt(ynorm2 / norm2);
    summary.min_ratio = std::min(summary.min_ratio, ratio);
    summary.max_ratio = std::max(summary.max_ratio, ratio);
    summary.delta_hat = std::max(summary.delta_hat, std::abs(ratio * ratio - 1.0));
    sum += ratio;
  }
  summary.mean_ratio = sum / static_cast<double>(trials);
  return summary;
}

}  // namespace tactile
