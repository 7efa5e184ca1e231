#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tactile/dagsvm.hpp"
#include "tactile/errors.hpp"
#include "tactile/experiment.hpp"
#include "tactile/splits.hpp"

using namespace tactile;
namespace fs = std::filesystem;

namespace {

ExperimentConfig mini_config(const std::string& out_dir) {
  ExperimentConfig config;
  config.array_sides = {8, 4};
  config.objects = {
      {"ball", "sphere", {40.0}, 6.0, ""},
      {"box", "box", {80.0, 80.0, 40.0}, 6.0, ""},
      {"can", "cylinder", {40.0, 40.0}, 6.0, ""},
  };
  config.row_offsets_mm = {0.0, 6.0};
  config.col_offsets_mm = {0.0, 6.0};
  config.rotations_deg = {0.0, 20.0};
  config.base_seed = 7;
  config.block_size = 16;
  config.matrix_seed = 3;
  config.sizes = {64, 16};
  config.c_grid = {1.0};
  config.svm_tol = 1e-3;
  config.dev_fraction = 0.4;
  config.val_fraction = 0.2;
  config.training_fractions = {{0.4, 0.2}, {0.25, 0.13}};
  config.split_seeds = {11, 22};
  config.output_dir = out_dir;
  config.threads = 2;
  return config;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("mini experiment: cell counts, report shape, determinism") {
  const auto base = fs::temp_directory_path() / "tactile_harness_test";
  fs::remove_all(base);
  auto config = mini_config((base / "run1").string());

  const auto result = run_experiment(config);
  // 2 conditions x 2 sizes x 2 seeds signal cells,
  // plus 2 x 2 x 2 fractions x 2 seeds training cells.
  CHECK(result.cells.size() == 8 + 16);
  for (const auto& cell : result.cells) {
    CHECK(cell.accuracy >= 0.0);
    CHECK(cell.accuracy <= 100.0);
  }
  const auto summary = result.summary(Sweep::kSignalSize, "compressed", 64,
                                      config.dev_fraction, config.val_fraction);
  CHECK(summary.mean >= summary.min);
  CHECK(summary.mean <= summary.max);

  emit_report(result, config);
  const auto signal_csv = slurp(base / "run1" / "results" / "signal_size.csv");
  CHECK(line_count(signal_csv) == 1 + 8);  // header + one row per cell
  const auto training_csv = slurp(base / "run1" / "results" / "training_size.csv");
  CHECK(line_count(training_csv) == 1 + 16);
  CHECK(fs::exists(base / "run1" / "results" / "summary.json"));
  CHECK(fs::exists(base / "run1" / "frames" / "ball.pgm"));

  // Confusion rows re-parse to 100 +- 1e-6.
  const auto confusion = slurp(base / "run1" / "results" / "confusion_compressed_64.csv");
  std::istringstream lines(confusion);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // class name
    double sum = 0.0;
    while (std::getline(cells, cell, ',')) sum += std::stod(cell);
    CHECK(std::abs(sum - 100.0) < 1e-6);
  }

  // Byte-identical outputs for an identical configuration.
  auto config2 = mini_config((base / "run2").string());
  const auto result2 = run_experiment(config2);
  emit_report(result2, config2);
  for (const char* name : {"signal_size.csv", "training_size.csv", "summary.json",
                           "confusion_compressed_64.csv", "confusion_raw_16.csv"}) {
    CHECK(slurp(base / "run1" / "results" / name) == slurp(base / "run2" / "results" / name));
  }
  fs::remove_all(base);
}

TEST_CASE("signal-size-only run skips training cells") {
  const auto base = fs::temp_directory_path() / "tactile_harness_only";
  fs::remove_all(base);
  auto config = mini_config((base).string());
  const auto result = run_experiment(config, Sweep::kSignalSize);
  CHECK(result.cells.size() == 8);
  for (const auto& cell : result.cells) CHECK(cell.sweep == Sweep::kSignalSize);
  fs::remove_all(base);
}

TEST_CASE("empty results refuse to write any report") {
  const auto base = fs::temp_directory_path() / "tactile_harness_empty";
  fs::remove_all(base);
  auto config = mini_config(base.string());
  ExperimentResult empty;
  CHECK_THROWS_AS(emit_report(empty, config), InvalidInput);
  CHECK_FALSE(fs::exists(base));
}

TEST_CASE("configuration validation") {
  auto config = mini_config("unused");
  config.sizes = {32};  // no 32-taxel array (sides are 8 and 4)
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  config = mini_config("unused");
  config.sizes = {128};  // exceeds the finest signal size
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  config = mini_config("unused");
  config.dev_fraction = 0.9;
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  config = mini_config("unused");
  config.split_seeds.clear();
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  config = mini_config("unused");
  config.block_size = 24;
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{}"), ConfigError);
}

TEST_CASE("config JSON round trip drives the same experiment") {
  const auto base = fs::temp_directory_path() / "tactile_harness_json";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string text = R"({
    "array_sides": [8, 4],
    "objects": [
      {"name": "ball", "kind": "sphere", "dimensions_mm": [40.0], "spacing_mm": 6.0},
      {"name": "box", "kind": "box", "dimensions_mm": [80.0, 80.0, 40.0], "spacing_mm": 6.0}
    ],
    "row_offsets_mm": [0.0, 6.0],
    "col_offsets_mm": [0.0],
    "rotations_deg": [0.0, 20.0],
    "base_seed": 7,
    "block_size": 16,
    "matrix_seed": 3,
    "sizes": [16],
    "c_grid": [1.0],
    "split_seeds": [5],
    "output_dir": ")" + (base / "out").string() + R"("
  })";
  const auto config = parse_experiment_config(text);
  CHECK(config.array_sides == std::vector<int>{8, 4});
  CHECK(config.objects.size() == 2);
  CHECK(config.dev_fraction == doctest::Approx(0.4));  // default
  const auto result = run_experiment(config, Sweep::kSignalSize);
  CHECK(result.cells.size() == 2);  // 2 conditions x 1 size x 1 seed
  fs::remove_all(base);
}

TEST_CASE("memorizing the training perturbations is an accuracy upper bound") {
  auto config = mini_config("unused");
  // Build the raw 8x8 observations directly.
  std::vector<SphereModel> models;
  for (const auto& spec : config.objects) models.push_back(build_object(spec));
  const auto array = TaxelArray::square(8);
  const auto frames = generate_dataset(array, models, config.row_offsets_mm,
                                       config.col_offsets_mm, config.rotations_deg, 0.001, 5);
  LabeledSet set;
  set.x.resize(static_cast<Eigen::Index>(frames.size()),
               static_cast<Eigen::Index>(frames.front().values.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    set.x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(
        frames[i].values.data(), static_cast<Eigen::Index>(frames[i].values.size()));
    set.labels.push_back(frames[i].label);
  }

  const std::size_t perturbations = 8;
  const auto splits = make_splits(perturbations, 0.4, 0.2, 3);
  auto expand = [&](const std::vector<std::size_t>& perts) {
    std::vector<std::size_t> out;
    for (std::size_t obj = 0; obj < models.size(); ++obj) {
      for (std::size_t p : perts) out.push_back(obj * perturbations + p);
    }
    return out;
  };
  const auto dev = expand(splits.development);
  const auto val = expand(splits.validation);
  const auto test = expand(splits.test);

  const auto disjoint_model = train_dag(set, {1.0}, dev, val, 1e-3, 1);
  const double disjoint_acc = evaluate(disjoint_model, set.subset(test)).accuracy;

  // Degenerate overlap: evaluate on the very perturbations used to train.
  auto train_all = dev;
  train_all.insert(train_all.end(), val.begin(), val.end());
  const double overlap_acc =
      evaluate(disjoint_model, set.subset(train_all)).accuracy;
  CHECK(overlap_acc >= disjoint_acc - 1e-9);
}
