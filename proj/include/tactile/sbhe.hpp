#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tactile/simulator.hpp"

namespace tactile {

/// Measurement counts used with 4096-taxel signals.
constexpr std::array<std::size_t, 6> kDefaultMeasurementCounts{1024, 256, 64, 16, 4, 1};

/// Scrambled block Hadamard measurement operator: m rows selected from a
/// block-diagonal Hadamard transform applied after a column permutation.
/// Stored as index maps + seed only, never as a dense matrix.
///
/// Row r of the implied dense matrix has exactly `block_size` nonzeros of
/// magnitude `scale` = 1/sqrt(block_size): entry +-scale at column
/// permutation[i] for each position i inside r's block.
struct SbheMatrix {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t block_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> permutation;    // scrambled position i reads input permutation[i]
  std::vector<std::uint32_t> selected_rows;  // m distinct indices into {0..n-1}
  double scale = 0.0;
  bool seeded = true;  // false when built from an explicit layout
};

/// Draws the column permutation (Fisher-Yates) and the m row indices
/// (uniform, without replacement) from a generator seeded with `seed`.
SbheMatrix build_sbhe(std::size_t n, std::size_t m, std::size_t block_size,
                      std::uint64_t seed);

/// Explicit layout construction (diagnostics and tests).
SbheMatrix sbhe_with_layout(std::size_t n, std::size_t m, std::size_t block_size,
                            std::vector<std::uint32_t> permutation,
                            std::vector<std::uint32_t> selected_rows);

/// In-place unnormalized Walsh-Hadamard transform (Sylvester ordering);
/// length must be a power of 2.
void fwht(std::span<double> data);

/// y = Phi x without materializing Phi: gather by the permutation, fast
/// Walsh-Hadamard per block (only blocks owning selected rows), scale, select.
std::vector<double> sbhe_apply(const SbheMatrix& matrix, const std::vector<double>& x);

/// Phi^T y (scatter to selected rows, per-block transform, un-permute).
std::vector<double> sbhe_apply_adjoint(const SbheMatrix& matrix, const std::vector<double>& y);

/// Compressed measurement vector with provenance.
struct CompressedSignal {
  std::vector<double> values;  // length m
  std::uint64_t matrix_seed = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t block_size = 0;
  int label = -1;
};

CompressedSignal compress(const SbheMatrix& matrix, const TactileFrame& frame);

/// Fraction of input components read by at least one selected row.
double input_coverage(const SbheMatrix& matrix);

struct IsometrySummary {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double delta_hat = 0.0;  // max |ratio^2 - 1| over trials
};

/// Synthesis operator mapping sparse coefficients to a signal (Psi s); an
/// empty function means the identity basis.
using SynthesisFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Empirical isometry diagnostic: for `trials` random k-sparse coefficient
/// vectors s (uniform support, Gaussian values) reports the distribution of
/// ||Phi Psi s||_2 / ||s||_2.
IsometrySummary isometry_check(const SbheMatrix& matrix, const SynthesisFn& synthesize,
                               std::size_t k, std::size_t trials, std::uint64_t seed);

}  // namespace tactile
