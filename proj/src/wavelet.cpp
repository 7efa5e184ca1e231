#include "tactile/wavelet.hpp"

#include <cmath>
#include <cstdint>

#include "tactile/errors.hpp"

namespace tactile {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_of(std::size_t v) {
  int l = 0;
  while ((std::size_t{1} << l) < v) ++l;
  return l;
}

// One periodic analysis step on a strided sequence of even length.
void analyze(double* data, std::size_t len, std::size_t stride,
             const std::array<double, 4>& h, const std::array<double, 4>& g,
             std::vector<double>& scratch) {
  const std::size_t half = len / 2;
  scratch.resize(len);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = data[((2 * i + k) % len) * stride];
      a += h[k] * v;
      d += g[k] * v;
    }
    scratch[i] = a;
    scratch[half + i] = d;
  }
  for (std::size_t i = 0; i < len; ++i) data[i * stride] = scratch[i];
}

// Transpose of analyze (exact inverse for an orthonormal filter pair).
void synthesize(double* data, std::size_t len, std::size_t stride,
                const std::array<double, 4>& h, const std::array<double, 4>& g,
                std::vector<double>& scratch) {
  const std::size_t half = len / 2;
  scratch.assign(len, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    const double a = data[i * stride];
    const double d = data[(half + i) * stride];
    for (std::size_t k = 0; k < 4; ++k) {
      scratch[(2 * i + k) % len] += h[k] * a + g[k] * d;
    }
  }
  for (std::size_t i = 0; i < len; ++i) data[i * stride] = scratch[i];
}

void check_input(const std::vector<double>& values, const WaveletBasis& basis) {
  if (basis.size == 0 || !is_power_of_two(basis.size)) {
    throw InvalidInput("basis size must be a power of 2");
  }
  if (basis.levels < 1 || basis.levels > log2_of(basis.size)) {
    throw InvalidInput("decomposition depth out of range");
  }
  if (values.size() != basis.size * basis.size) {
    throw DimensionError("grid must be size x size");
  }
}

std::size_t count_nonzeros(const std::vector<double>& v) {
  std::size_t k = 0;
  for (double x : v) k += (x != 0.0);
  return k;
}

}  // namespace

WaveletBasis WaveletBasis::daubechies2(std::size_t size, int levels) {
  if (size == 0 || !is_power_of_two(size)) throw InvalidInput("size must be a power of 2");
  const int max_levels = log2_of(size);
  if (levels < 0) levels = max_levels;
  if (levels < 1 || levels > max_levels) throw InvalidInput("decomposition depth out of range");

  WaveletBasis basis;
  basis.size = size;
  basis.levels = levels;
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  basis.lowpass = {(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm};
  for (std::size_t k = 0; k < 4; ++k) {
    basis.highpass[k] = (k % 2 == 0 ? 1.0 : -1.0) * basis.lowpass[3 - k];
  }
  return basis;
}

SparseCoeffs dwt2(const std::vector<double>& grid, const WaveletBasis& basis) {
  check_input(grid, basis);
  SparseCoeffs coeffs;
  coeffs.values = grid;
  std::vector<double> scratch;
  std::size_t side = basis.size;
  for (int level = 0; level < basis.levels; ++level) {
    for (std::size_t r = 0; r < side; ++r) {
      analyze(coeffs.values.data() + r * basis.size, side, 1, basis.lowpass, basis.highpass,
              scratch);
    }
    for (std::size_t c = 0; c < side; ++c) {
      analyze(coeffs.values.data() + c, side, basis.size, basis.lowpass, basis.highpass,
              scratch);
    }
    side /= 2;
  }
  coeffs.sparsity = count_nonzeros(coeffs.values);
  return coeffs;
}

std::vector<double> idwt2(const std::vector<double>& coeffs, const WaveletBasis& basis) {
  check_input(coeffs, basis);
  std::vector<double> grid = coeffs;
  std::vector<double> scratch;
  std::size_t side = basis.size >> (basis.levels - 1);
  for (int level = 0; level < basis.levels; ++level) {
    for (std::size_t c = 0; c < side; ++c) {
      synthesize(grid.data() + c, side, basis.size, basis.lowpass, basis.highpass, scratch);
    }
    for (std::size_t r = 0; r < side; ++r) {
      synthesize(grid.data() + r * basis.size, side, 1, basis.lowpass, basis.highpass, scratch);
    }
    side *= 2;
  }
  return grid;
}

std::vector<double> idwt2(const SparseCoeffs& coeffs, const WaveletBasis& basis) {
  return idwt2(coeffs.values, basis);
}

}  // namespace tactile
