#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tactile/svm.hpp"

namespace tactile {

/// All-pairs linear SVMs with DAG elimination: classification evaluates
/// exactly M-1 of the M(M-1)/2 pairwise models.
struct DagSvmModel {
  std::vector<int> class_list;  // ascending canonical order
  std::map<std::pair<int, int>, BinarySvm> pairwise;  // keyed (a, b), a < b
  std::uint64_t seed = 0;

  std::size_t pair_count() const { return pairwise.size(); }
};

/// For each class pair: trains on the development subset for every C in
/// c_grid, keeps the C with the best validation accuracy on that pair (ties
/// to the smaller C), then retrains at that C on development + validation.
/// `development` and `validation` are disjoint observation indices into set.
DagSvmModel train_dag(const LabeledSet& set, const std::vector<double>& c_grid,
                      const std::vector<std::size_t>& development,
                      const std::vector<std::size_t>& validation, double tol,
                      std::uint64_t seed);

/// Sequential elimination over a candidate list in canonical ascending order:
/// each step evaluates the (first, last) pairwise model and removes the loser.
/// If `evaluations` is given it receives the number of pairwise decisions.
int classify(const DagSvmModel& model, const Eigen::VectorXd& x,
             std::size_t* evaluations = nullptr);

struct Evaluation {
  double accuracy = 0.0;        // percent
  Eigen::MatrixXd confusion;    // M x M row percentages
  std::vector<int> classes;     // row/column order
  std::size_t pair_evaluations = 0;  // total pairwise decisions
};

/// Accuracy and row-normalized confusion percentages over a test set.
Evaluation evaluate(const DagSvmModel& model, const LabeledSet& test);

/// Diagnostic: fraction of observations whose label is unchanged when the
/// DAG elimination order is randomized.
double dag_order_agreement(const DagSvmModel& model, const LabeledSet& set,
                           std::size_t random_orders, std::uint64_t seed);

void save_dag_model(const DagSvmModel& model, const std::string& path);
DagSvmModel load_dag_model(const std::string& path);

}  // namespace tactile
