#pragma once

#include <cstddef>
#include <vector>

#include "tactile/sbhe.hpp"
#include "tactile/wavelet.hpp"

namespace tactile {

struct ReconstructionResult {
  std::vector<double> values;  // recovered full signal, length n
  SparseCoeffs coeffs;         // sparse wavelet-domain estimate
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // norm after each iteration
  bool converged = false;
};

/// Orthogonal matching pursuit over the composite operator Phi * Psi:
/// greedily selects the coefficient with maximal residual correlation (ties
/// broken toward the lowest index), re-solves least squares on the active set
/// each iteration, and stops at k_max atoms or ||residual|| <= residual_tol.
/// Non-convergence is not an error; the best iterate is returned flagged.
ReconstructionResult reconstruct(const std::vector<double>& measurements,
                                 const SbheMatrix& matrix, const WaveletBasis& basis,
                                 std::size_t k_max, double residual_tol);

/// Validates the signal's provenance against `matrix` before recovering.
ReconstructionResult reconstruct(const CompressedSignal& signal, const SbheMatrix& matrix,
                                 const WaveletBasis& basis, std::size_t k_max,
                                 double residual_tol);

}  // namespace tactile
