#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace tactile {

/// Separable 2-D Daubechies-2 wavelet basis on a square power-of-two grid,
/// with periodic boundary extension (keeps the transform orthonormal).
struct WaveletBasis {
  std::size_t size = 0;  // grid side length, power of 2
  int levels = 0;        // decomposition depth, 1..log2(size)
  std::array<double, 4> lowpass{};
  std::array<double, 4> highpass{};

  /// levels < 0 selects full depth log2(size).
  static WaveletBasis daubechies2(std::size_t size, int levels = -1);
};

/// Wavelet-domain coefficients, flat row-major over the Mallat layout.
struct SparseCoeffs {
  std::vector<double> values;
  std::size_t sparsity = 0;  // count of nonzero entries
};

/// Multilevel 2-D analysis of a size x size grid (row-major n-vector).
SparseCoeffs dwt2(const std::vector<double>& grid, const WaveletBasis& basis);

/// Exact inverse of dwt2.
std::vector<double> idwt2(const SparseCoeffs& coeffs, const WaveletBasis& basis);
std::vector<double> idwt2(const std::vector<double>& coeffs, const WaveletBasis& basis);

}  // namespace tactile
