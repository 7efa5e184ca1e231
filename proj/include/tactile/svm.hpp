#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <utility>
#include <vector>

#include "tactile/labeled_set.hpp"

namespace tactile {

/// Linear soft-margin binary classifier. classes = (negative label, positive
/// label); the prediction rule is sign(w.x + b), ties going to the positive
/// class.
struct BinarySvm {
  Eigen::VectorXd w;
  double b = 0.0;
  double c = 1.0;
  std::pair<int, int> classes{0, 0};
  std::vector<std::size_t> support_indices;

  // Training diagnostics, kept so optimality can be re-checked.
  Eigen::VectorXd alpha;  // dual variables, one per training observation
  double kkt_gap = 0.0;   // max KKT violation at termination
  std::size_t iterations = 0;

  double decision(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
  int predict(const Eigen::VectorXd& x) const {
    return decision(x) >= 0.0 ? classes.second : classes.first;
  }
};

/// Trains the soft-margin problem through its dual with SMO-style pairwise
/// coordinate ascent; terminates when the maximal KKT violation is <= tol.
/// The set must contain exactly the two classes; the smaller class id maps
/// to -1 and the larger to +1.
BinarySvm train_binary(const LabeledSet& set, double c, double tol);

/// Mean hinge loss (1/N) sum max(0, 1 - l_i (w.x_i + b)).
double hinge_loss(const BinarySvm& model, const LabeledSet& set);

/// Primal objective 0.5 ||w||^2 + C sum_i max(0, 1 - l_i (w.x_i + b)).
double primal_objective(const BinarySvm& model, const LabeledSet& set);

}  // namespace tactile
