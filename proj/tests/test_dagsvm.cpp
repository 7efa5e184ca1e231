#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "tactile/dagsvm.hpp"
#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

using namespace tactile;

namespace {

// Well-separated Gaussian blobs, one per class, laid out on a circle.
LabeledSet blobs(std::size_t classes, std::size_t per_class, double spread, Rng& rng,
                 double radius = 10.0) {
  LabeledSet set;
  set.x.resize(static_cast<Eigen::Index>(classes * per_class), 2);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(c) /
                         static_cast<double>(classes);
    for (std::size_t i = 0; i < per_class; ++i) {
      set.x(static_cast<Eigen::Index>(row), 0) = radius * std::cos(angle) + spread * rng.gaussian();
      set.x(static_cast<Eigen::Index>(row), 1) = radius * std::sin(angle) + spread * rng.gaussian();
      set.labels.push_back(static_cast<int>(c));
      ++row;
    }
  }
  return set;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

// Indices striped across classes so every class appears in every split.
void striped_split(std::size_t total, std::vector<std::size_t>& dev,
                   std::vector<std::size_t>& val, std::vector<std::size_t>& test) {
  for (std::size_t i = 0; i < total; ++i) {
    switch (i % 4) {
      case 0:
      case 1:
        dev.push_back(i);
        break;
      case 2:
        val.push_back(i);
        break;
      default:
        test.push_back(i);
        break;
    }
  }
}

}  // namespace

TEST_CASE("16 classes train 120 pairwise models and classify in 15 evaluations") {
  Rng rng(1);
  const auto set = blobs(16, 12, 0.5, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 9);
  CHECK(model.pair_count() == 120);

  std::size_t evals = 0;
  for (std::size_t i : test) {
    std::size_t e = 0;
    classify(model, set.x.row(static_cast<Eigen::Index>(i)), &e);
    CHECK(e == 15);
    evals += e;
  }
  const auto eval = evaluate(model, set.subset(test));
  CHECK(eval.pair_evaluations == 15 * test.size());
  CHECK(evals == eval.pair_evaluations);
}

TEST_CASE("two classes reduce to the single binary sign rule") {
  Rng rng(2);
  const auto set = blobs(2, 30, 0.4, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {0.1, 1.0, 10.0}, dev, val, 1e-4, 3);
  REQUIRE(model.pair_count() == 1);
  const auto& binary = model.pairwise.begin()->second;
  for (std::size_t i : test) {
    std::size_t e = 0;
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    CHECK(classify(model, x, &e) == binary.predict(x));
    CHECK(e == 1);
  }
}

TEST_CASE("separable blobs classify held-out points perfectly") {
  Rng rng(3);
  const auto set = blobs(3, 40, 0.5, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 1);
  const auto eval = evaluate(model, set.subset(test));
  CHECK(eval.accuracy == doctest::Approx(100.0));
  for (Eigen::Index r = 0; r < eval.confusion.rows(); ++r) {
    CHECK(eval.confusion(r, r) == doctest::Approx(100.0));
  }
}

TEST_CASE("DAG labels agree with exhaustive one-vs-one voting") {
  Rng rng(4);
  const auto set = blobs(5, 40, 1.8, rng);  // overlapping enough to be non-trivial
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 1);

  std::size_t agree = 0;
  for (std::size_t i : test) {
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    // Majority vote over all pairs, ties to the smaller class id.
    std::map<int, int> votes;
    for (const auto& [key, svm] : model.pairwise) votes[svm.predict(x)]++;
    int winner = -1, best = -1;
    for (const auto& [cls, count] : votes) {
      if (count > best) {
        best = count;
        winner = cls;
      }
    }
    agree += classify(model, x) == winner;
  }
  CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(test.size()));
}

TEST_CASE("confusion rows are percentages summing to 100") {
  Rng rng(5);
  const auto set = blobs(4, 25, 2.5, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 1);
  const auto eval = evaluate(model, set.subset(test));
  for (Eigen::Index r = 0; r < eval.confusion.rows(); ++r) {
    CHECK(std::abs(eval.confusion.row(r).sum() - 100.0) < 1e-9);
  }
  CHECK(eval.accuracy >= 0.0);
  CHECK(eval.accuracy <= 100.0);
}

TEST_CASE("a constant classifier on a balanced 16-class set scores 100/16") {
  // Pairwise models that always prefer the larger class id: w = 0, b = 0 and
  // the boundary tie resolves to the positive class.
  DagSvmModel model;
  for (int c = 0; c < 16; ++c) model.class_list.push_back(c);
  for (int a = 0; a < 16; ++a) {
    for (int b = a + 1; b < 16; ++b) {
      BinarySvm svm;
      svm.w = Eigen::VectorXd::Zero(2);
      svm.b = 0.0;
      svm.classes = {a, b};
      model.pairwise.emplace(std::make_pair(a, b), std::move(svm));
    }
  }
  Rng rng(6);
  const auto set = blobs(16, 8, 1.0, rng);
  const auto eval = evaluate(model, set);
  CHECK(eval.accuracy == doctest::Approx(100.0 / 16.0).epsilon(1e-9));
}

TEST_CASE("scaling (w, b) by a positive factor never changes labels") {
  Rng rng(7);
  const auto set = blobs(4, 30, 2.0, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  auto model = train_dag(set, {1.0}, dev, val, 1e-4, 1);
  DagSvmModel scaled = model;
  for (auto& [key, svm] : scaled.pairwise) {
    svm.w *= 7.5;
    svm.b *= 7.5;
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    CHECK(classify(model, x) == classify(scaled, x));
  }
}

TEST_CASE("classification is deterministic and mostly order independent") {
  Rng rng(8);
  const auto set = blobs(6, 25, 0.6, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 1);
  for (std::size_t i : test) {
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    CHECK(classify(model, x) == classify(model, x));
  }
  CHECK(dag_order_agreement(model, set.subset(test), 5, 99) >= 0.95);
}

TEST_CASE("development set must contain every class") {
  Rng rng(9);
  const auto set = blobs(3, 10, 0.5, rng);
  // Development indices drawn only from the first two classes.
  const auto dev = range(0, 20);
  const auto val = range(20, 30);
  CHECK_THROWS_AS(train_dag(set, {1.0}, dev, val, 1e-4, 1), DegenerateInput);
}

TEST_CASE("cross-validation prefers the smaller C on ties") {
  Rng rng(10);
  const auto set = blobs(2, 40, 0.3, rng);  // trivially separable: all C tie
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {10.0, 0.01, 1.0}, dev, val, 1e-4, 1);
  CHECK(model.pairwise.begin()->second.c == doctest::Approx(0.01));
}

TEST_CASE("model JSON round trip preserves predictions exactly") {
  Rng rng(11);
  const auto set = blobs(4, 20, 1.2, rng);
  std::vector<std::size_t> dev, val, test;
  striped_split(set.size(), dev, val, test);
  const auto model = train_dag(set, {1.0}, dev, val, 1e-4, 5);

  const auto path = std::filesystem::temp_directory_path() / "dag_model_test.json";
  save_dag_model(model, path.string());
  const auto loaded = load_dag_model(path.string());
  CHECK(loaded.class_list == model.class_list);
  CHECK(loaded.pair_count() == model.pair_count());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Eigen::VectorXd x = set.x.row(static_cast<Eigen::Index>(i));
    CHECK(classify(loaded, x) == classify(model, x));
  }
  std::filesystem::remove(path);
}
