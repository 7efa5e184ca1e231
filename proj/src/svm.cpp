#include "tactile/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tactile/errors.hpp"

namespace tactile {

std::vector<int> LabeledSet::class_ids() const {
  std::set<int> ids(labels.begin(), labels.end());
  return {ids.begin(), ids.end()};
}

LabeledSet LabeledSet::subset(const std::vector<std::size_t>& indices) const {
  LabeledSet out;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(indices[i]));
    out.labels.push_back(labels[indices[i]]);
  }
  return out;
}

namespace {

constexpr double kTau = 1e-12;  // curvature floor for degenerate pairs

struct SignedProblem {
  Eigen::MatrixXd x;   // N x d
  Eigen::VectorXd y;   // +-1
  int neg_label = 0;
  int pos_label = 0;
};

SignedProblem to_signed(const LabeledSet& set) {
  if (!set.x.allFinite()) throw InvalidInput("features must be finite");
  const auto ids = set.class_ids();
  if (ids.size() != 2) {
    throw DegenerateInput("binary training requires exactly two classes");
  }
  SignedProblem p;
  p.x = set.x;
  p.neg_label = ids[0];
  p.pos_label = ids[1];
  p.y.resize(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    p.y[static_cast<Eigen::Index>(i)] = set.labels[i] == p.pos_label ? 1.0 : -1.0;
  }
  return p;
}

}  // namespace

BinarySvm train_binary(const LabeledSet& set, double c, double tol) {
  if (!(c > 0.0)) throw InvalidInput("C must be positive");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  const SignedProblem p = to_signed(set);
  const auto n = static_cast<Eigen::Index>(set.size());

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p.x.cols());
  // cand_i = y_i - w.x_i is both the KKT certificate and the bias candidate.
  Eigen::VectorXd cand = p.y;
  const Eigen::VectorXd norms = p.x.rowwise().squaredNorm();

  const std::size_t max_iterations = 200000 + 2000 * static_cast<std::size_t>(n);
  std::size_t iterations = 0;
  double gap = std::numeric_limits<double>::infinity();

  while (iterations < max_iterations) {
    // Working pair: most violating candidates among the bound-feasible sets.
    Eigen::Index i = -1, j = -1;
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool in_up = p.y[t] > 0.0 ? alpha[t] < c : alpha[t] > 0.0;
      const bool in_low = p.y[t] > 0.0 ? alpha[t] > 0.0 : alpha[t] < c;
      if (in_up && cand[t] > up) {
        up = cand[t];
        i = t;
      }
      if (in_low && cand[t] < low) {
        low = cand[t];
        j = t;
      }
    }
    gap = up - low;
    if (i < 0 || j < 0 || gap <= tol) break;

    // Analytic two-variable step (box-clipped, equality preserved).
    const double kij = p.x.row(i).dot(p.x.row(j));
    double eta = norms[i] + norms[j] - 2.0 * kij;
    if (eta <= kTau) eta = kTau;
    const double ei = -cand[i];  // w.x_i - y_i
    const double ej = -cand[j];

    double lo_bound, hi_bound;
    if (p.y[i] != p.y[j]) {
      lo_bound = std::max(0.0, alpha[j] - alpha[i]);
      hi_bound = std::min(c, c + alpha[j] - alpha[i]);
    } else {
      lo_bound = std::max(0.0, alpha[i] + alpha[j] - c);
      hi_bound = std::min(c, alpha[i] + alpha[j]);
    }
    if (hi_bound - lo_bound < kTau && hi_bound - lo_bound <= 0.0) {
      // Pair cannot move; treat as converged to avoid cycling.
      break;
    }

    const double old_i = alpha[i], old_j = alpha[j];
    double new_j = std::clamp(old_j + p.y[j] * (ei - ej) / eta, lo_bound, hi_bound);
    const double new_i = old_i + p.y[i] * p.y[j] * (old_j - new_j);
    if (std::abs(new_j - old_j) < kTau * (std::abs(new_j) + std::abs(old_j) + kTau)) break;

    alpha[i] = new_i;
    alpha[j] = new_j;
    w += p.y[i] * (new_i - old_i) * p.x.row(i).transpose() +
         p.y[j] * (new_j - old_j) * p.x.row(j).transpose();
    cand = p.y - p.x * w;
    ++iterations;
  }

  BinarySvm model;
  model.w = w;
  model.c = c;
  model.classes = {p.neg_label, p.pos_label};
  model.alpha = alpha;
  model.kkt_gap = gap;
  model.iterations = iterations;

  // Bias: average over free support vectors, else the KKT interval midpoint.
  double bias_sum = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > kTau && alpha[t] < c - kTau) {
      bias_sum += cand[t];
      ++free_count;
    }
    if (alpha[t] > kTau) model.support_indices.push_back(static_cast<std::size_t>(t));
  }
  if (free_count > 0) {
    model.b = bias_sum / static_cast<double>(free_count);
  } else {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool in_up = p.y[t] > 0.0 ? alpha[t] < c : alpha[t] > 0.0;
      const bool in_low = p.y[t] > 0.0 ? alpha[t] > 0.0 : alpha[t] < c;
      if (in_up) up = std::max(up, cand[t]);
      if (in_low) low = std::min(low, cand[t]);
    }
    model.b = (up + low) / 2.0;
  }
  return model;
}

double hinge_loss(const BinarySvm& model, const LabeledSet& set) {
  if (set.dim() != static_cast<std::size_t>(model.w.size())) {
    throw DimensionError("feature dimension does not match the model");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    double sign;
    if (set.labels[i] == model.classes.second) {
      sign = 1.0;
    } else if (set.labels[i] == model.classes.first) {
      sign = -1.0;
    } else {
      throw InvalidInput("label not covered by this binary model");
    }
    const double margin = sign * model.decision(set.x.row(static_cast<Eigen::Index>(i)));
    total += std::max(0.0, 1.0 - margin);
  }
  return total / static_cast<double>(set.size());
}

double primal_objective(const BinarySvm& model, const LabeledSet& set) {
  return 0.5 * model.w.squaredNorm() +
         model.c * hinge_loss(model, set) * static_cast<double>(set.size());
}

}  // namespace tactile
