#include "tactile/recovery.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "tactile/errors.hpp"

namespace tactile {

ReconstructionResult reconstruct(const std::vector<double>& measurements,
                                 const SbheMatrix& matrix, const WaveletBasis& basis,
                                 std::size_t k_max, double residual_tol) {
  if (measurements.size() != matrix.m) throw DimensionError("measurement length must equal m");
  if (basis.size * basis.size != matrix.n) {
    throw DimensionError("basis grid does not match the measurement matrix");
  }
  if (k_max > matrix.m) throw OverBudgetError("sparsity budget exceeds measurement count");

  const auto m = static_cast<Eigen::Index>(matrix.m);
  Eigen::VectorXd y(m);
  for (std::size_t i = 0; i < matrix.m; ++i) y[static_cast<Eigen::Index>(i)] = measurements[i];

  ReconstructionResult result;
  result.coeffs.values.assign(matrix.n, 0.0);

  Eigen::VectorXd residual = y;
  double rnorm = residual.norm();

  std::vector<std::size_t> active;
  Eigen::MatrixXd columns(m, 0);
  Eigen::VectorXd solution;

  std::vector<double> res_vec(matrix.m);
  while (rnorm > residual_tol && active.size() < k_max) {
    // Correlations of the residual with every atom: (Phi Psi)^T r.
    for (std::size_t i = 0; i < matrix.m; ++i) {
      res_vec[i] = residual[static_cast<Eigen::Index>(i)];
    }
    const std::vector<double> corr = dwt2(sbhe_apply_adjoint(matrix, res_vec), basis).values;
    std::size_t best = 0;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < corr.size(); ++i) {
      const double a = std::abs(corr[i]);
      if (a > best_abs) {  // strict: ties keep the lowest index
        best_abs = a;
        best = i;
      }
    }
    if (best_abs == 0.0) break;  // residual orthogonal to every atom

    std::vector<double> unit(matrix.n, 0.0);
    unit[best] = 1.0;
    const std::vector<double> column = sbhe_apply(matrix, idwt2(unit, basis));
    columns.conservativeResize(Eigen::NoChange, columns.cols() + 1);
    for (std::size_t i = 0; i < matrix.m; ++i) {
      columns(static_cast<Eigen::Index>(i), columns.cols() - 1) = column[i];
    }
    active.push_back(best);

    solution = columns.colPivHouseholderQr().solve(y);
    residual = y - columns * solution;
    rnorm = residual.norm();
    result.residual_history.push_back(rnorm);
    ++result.iterations;
  }

  for (std::size_t i = 0; i < active.size(); ++i) {
    result.coeffs.values[active[i]] = solution[static_cast<Eigen::Index>(i)];
  }
  result.coeffs.sparsity = active.size();
  result.residual_norm = rnorm;
  result.converged = rnorm <= residual_tol;
  result.values = idwt2(result.coeffs, basis);
  return result;
}

ReconstructionResult reconstruct(const CompressedSignal& signal, const SbheMatrix& matrix,
                                 const WaveletBasis& basis, std::size_t k_max,
                                 double residual_tol) {
  if (signal.n != matrix.n || signal.m != matrix.m || signal.block_size != matrix.block_size) {
    throw DimensionError("compressed signal provenance does not match the matrix");
  }
  if (matrix.seeded && signal.matrix_seed != matrix.seed) {
    throw InvalidInput("compressed signal was produced by a different matrix seed");
  }
  return reconstruct(signal.values, matrix, basis, k_max, residual_tol);
}

}  // namespace tactile
