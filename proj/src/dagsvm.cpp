#include "tactile/dagsvm.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

namespace {

using json = nlohmann::json;

std::vector<std::size_t> indices_of_pair(const LabeledSet& set,
                                         const std::vector<std::size_t>& pool, int a, int b) {
  std::vector<std::size_t> out;
  for (std::size_t idx : pool) {
    if (set.labels[idx] == a || set.labels[idx] == b) out.push_back(idx);
  }
  return out;
}

double pair_accuracy(const BinarySvm& model, const LabeledSet& set,
                     const std::vector<std::size_t>& indices) {
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t idx : indices) {
    if (model.predict(set.x.row(static_cast<Eigen::Index>(idx))) == set.labels[idx]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

int eliminate(const DagSvmModel& model, const Eigen::VectorXd& x,
              std::vector<int> candidates, std::size_t* evaluations) {
  std::size_t evals = 0;
  while (candidates.size() > 1) {
    const int a = candidates.front();
    const int b = candidates.back();
    const auto it = model.pairwise.find({std::min(a, b), std::max(a, b)});
    if (it == model.pairwise.end()) throw InvalidInput("missing pairwise model");
    const int winner = it->second.predict(x);
    ++evals;
    if (winner == a) {
      candidates.pop_back();
    } else {
      candidates.erase(candidates.begin());
    }
  }
  if (evaluations) *evaluations = evals;
  return candidates.front();
}

}  // namespace

DagSvmModel train_dag(const LabeledSet& set, const std::vector<double>& c_grid,
                      const std::vector<std::size_t>& development,
                      const std::vector<std::size_t>& validation, double tol,
                      std::uint64_t seed) {
  if (c_grid.empty()) throw InvalidInput("C grid must be non-empty");
  const std::vector<int> classes = set.class_ids();
  if (classes.size() < 2) throw DegenerateInput("need at least two classes");

  // Every class must appear in the development set.
  for (int cls : classes) {
    const bool present = std::any_of(development.begin(), development.end(),
                                     [&](std::size_t i) { return set.labels[i] == cls; });
    if (!present) throw DegenerateInput("class missing from the development set");
  }

  std::vector<double> grid = c_grid;
  std::sort(grid.begin(), grid.end());

  DagSvmModel model;
  model.class_list = classes;
  model.seed = seed;

  std::vector<std::size_t> full = development;
  full.insert(full.end(), validation.begin(), validation.end());

  for (std::size_t ai = 0; ai < classes.size(); ++ai) {
    for (std::size_t bi = ai + 1; bi < classes.size(); ++bi) {
      const int a = classes[ai], b = classes[bi];
      const auto dev_idx = indices_of_pair(set, development, a, b);
      const auto val_idx = indices_of_pair(set, validation, a, b);
      const LabeledSet dev_set = set.subset(dev_idx);

      double best_c = grid.front();
      double best_acc = -1.0;
      for (double c : grid) {
        const BinarySvm candidate = train_binary(dev_set, c, tol);
        const double acc = pair_accuracy(candidate, set, val_idx);
        if (acc > best_acc) {  // strict: ties keep the smaller C
          best_acc = acc;
          best_c = c;
        }
      }
      const auto full_idx = indices_of_pair(set, full, a, b);
      model.pairwise.emplace(std::make_pair(a, b),
                             train_binary(set.subset(full_idx), best_c, tol));
    }
  }
  return model;
}

int classify(const DagSvmModel& model, const Eigen::VectorXd& x, std::size_t* evaluations) {
  if (model.class_list.empty()) throw InvalidInput("empty model");
  if (model.class_list.size() == 1) {
    if (evaluations) *evaluations = 0;
    return model.class_list.front();
  }
  return eliminate(model, x, model.class_list, evaluations);
}

Evaluation evaluate(const DagSvmModel& model, const LabeledSet& test) {
  if (test.size() == 0) throw InvalidInput("test set is empty");
  const auto m = static_cast<Eigen::Index>(model.class_list.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
  std::map<int, Eigen::Index> row_of;
  for (Eigen::Index i = 0; i < m; ++i) row_of[model.class_list[static_cast<std::size_t>(i)]] = i;

  Evaluation eval;
  eval.classes = model.class_list;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::size_t evals = 0;
    const int predicted = classify(model, test.x.row(static_cast<Eigen::Index>(i)), &evals);
    eval.pair_evaluations += evals;
    const auto it = row_of.find(test.labels[i]);
    if (it == row_of.end()) throw InvalidInput("test label unknown to the model");
    counts(it->second, row_of.at(predicted)) += 1.0;
    if (predicted == test.labels[i]) ++correct;
  }

  eval.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
  eval.confusion = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double total = counts.row(r).sum();
    if (total > 0.0) eval.confusion.row(r) = counts.row(r) * (100.0 / total);
  }
  return eval;
}

double dag_order_agreement(const DagSvmModel& model, const LabeledSet& set,
                           std::size_t random_orders, std::uint64_t seed) {
  if (set.size() == 0 || random_orders == 0) return 1.0;
  Rng rng(seed);
  std::size_t agreements = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    const int canonical = classify(model, x);
    for (std::size_t o = 0; o < random_orders; ++o) {
      std::vector<int> order = model.class_list;
      rng.shuffle(order);
      agreements += (eliminate(model, x, order, nullptr) == canonical);
      ++total;
    }
  }
  return static_cast<double>(agreements) / static_cast<double>(total);
}

void save_dag_model(const DagSvmModel& model, const std::string& path) {
  json doc;
  doc["classes"] = model.class_list;
  doc["seed"] = model.seed;
  doc["pairs"] = json::array();
  for (const auto& [key, svm] : model.pairwise) {
    json pair;
    pair["negative"] = key.first;
    pair["positive"] = key.second;
    pair["b"] = svm.b;
    pair["c"] = svm.c;
    pair["w"] = std::vector<double>(svm.w.data(), svm.w.data() + svm.w.size());
    doc["pairs"].push_back(std::move(pair));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  out << doc.dump(2) << '\n';
}

DagSvmModel load_dag_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed model file: " + std::string(e.what()));
  }
  DagSvmModel model;
  model.class_list = doc.at("classes").get<std::vector<int>>();
  model.seed = doc.value("seed", std::uint64_t{0});
  for (const auto& pair : doc.at("pairs")) {
    BinarySvm svm;
    svm.classes = {pair.at("negative").get<int>(), pair.at("positive").get<int>()};
    svm.b = pair.at("b").get<double>();
    svm.c = pair.at("c").get<double>();
    const auto w = pair.at("w").get<std::vector<double>>();
    svm.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model.pairwise.emplace(svm.classes, std::move(svm));
  }
  return model;
}

}  // namespace tactile
