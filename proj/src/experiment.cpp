#include "tactile/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "tactile/dataset_io.hpp"
#include "tactile/errors.hpp"
#include "tactile/labeled_set.hpp"
#include "tactile/rng.hpp"
#include "tactile/sbhe.hpp"
#include "tactile/splits.hpp"

namespace tactile {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

ObjectSpec object_from_json(const json& j) {
  ObjectSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "mesh") {
    spec.path = j.at("path").get<std::string>();
  } else {
    spec.dimensions = j.at("dimensions_mm").get<std::vector<double>>();
    spec.spacing_mm = j.at("spacing_mm").get<double>();
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config JSON: " + std::string(e.what()));
  }
  try {
    ExperimentConfig config;
    config.array_sides = doc.at("array_sides").get<std::vector<int>>();
    config.substrate_extent_mm = doc.value("substrate_extent_mm", 256.0);
    config.stiffness_n_per_mm = doc.value("stiffness_n_per_mm", 0.001);
    config.press_depth_mm = doc.value("press_depth_mm", 11.0);
    config.noise_sigma_n = doc.value("noise_sigma_n", 0.001);
    for (const auto& obj : doc.at("objects")) config.objects.push_back(object_from_json(obj));
    config.row_offsets_mm = doc.at("row_offsets_mm").get<std::vector<double>>();
    config.col_offsets_mm = doc.at("col_offsets_mm").get<std::vector<double>>();
    config.rotations_deg = doc.at("rotations_deg").get<std::vector<double>>();
    config.base_seed = doc.value("base_seed", std::uint64_t{1});
    config.block_size = doc.value("block_size", std::size_t{32});
    config.matrix_seed = doc.value("matrix_seed", std::uint64_t{1});
    config.sizes = doc.at("sizes").get<std::vector<std::size_t>>();
    if (doc.contains("c_grid")) config.c_grid = doc.at("c_grid").get<std::vector<double>>();
    config.svm_tol = doc.value("svm_tol", 1e-3);
    config.dev_fraction = doc.value("dev_fraction", 0.4);
    config.val_fraction = doc.value("val_fraction", 0.2);
    if (doc.contains("training_fractions")) {
      for (const auto& pair : doc.at("training_fractions")) {
        config.training_fractions.emplace_back(pair.at(0).get<double>(),
                                               pair.at(1).get<double>());
      }
    }
    config.split_seeds = doc.at("split_seeds").get<std::vector<std::uint64_t>>();
    config.output_dir = doc.value("output_dir", std::string{"results"});
    config.threads = doc.value("threads", 0);
    validate_config(config);
    return config;
  } catch (const json::exception& e) {
    throw ConfigError("config field error: " + std::string(e.what()));
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment_config(text);
}

void validate_config(const ExperimentConfig& config) {
  if (config.array_sides.empty()) throw ConfigError("array_sides must be non-empty");
  for (int side : config.array_sides) {
    if (side < 1) throw ConfigError("array sides must be >= 1");
  }
  if (config.objects.empty()) throw ConfigError("object roster is empty");
  if (config.row_offsets_mm.empty() || config.col_offsets_mm.empty() ||
      config.rotations_deg.empty()) {
    throw ConfigError("perturbation grids must be non-empty");
  }
  for (double r : config.rotations_deg) {
    if (r < 0.0 || r >= 360.0) throw ConfigError("rotations must lie in [0, 360)");
  }
  if (!(config.press_depth_mm > 0.0)) throw ConfigError("press depth must be positive");
  if (config.noise_sigma_n < 0.0) throw ConfigError("noise sigma must be nonnegative");
  if (config.sizes.empty()) throw ConfigError("sizes must be non-empty");

  const int finest = *std::max_element(config.array_sides.begin(), config.array_sides.end());
  const auto n = static_cast<std::size_t>(finest) * static_cast<std::size_t>(finest);
  if (!is_power_of_two(config.block_size) || n % config.block_size != 0) {
    throw ConfigError("block size must be a power of 2 dividing the finest signal size");
  }
  for (std::size_t s : config.sizes) {
    if (s < 1 || s > n) throw ConfigError("signal sizes must lie in [1, finest size]");
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s))));
    const bool have_raw = static_cast<std::size_t>(side) * side == s &&
                          std::find(config.array_sides.begin(), config.array_sides.end(),
                                    side) != config.array_sides.end();
    if (!have_raw) {
      throw ConfigError("no array resolution for raw signal size " + std::to_string(s));
    }
  }
  if (config.c_grid.empty()) throw ConfigError("C grid must be non-empty");
  for (double c : config.c_grid) {
    if (!(c > 0.0)) throw ConfigError("C grid entries must be positive");
  }
  if (!(config.svm_tol > 0.0)) throw ConfigError("svm_tol must be positive");
  auto check_fractions = [](double dev, double val) {
    if (!(dev > 0.0) || !(val > 0.0) || dev + val >= 1.0) {
      throw ConfigError("split fractions must be positive with dev + val < 1");
    }
  };
  check_fractions(config.dev_fraction, config.val_fraction);
  for (const auto& [dev, val] : config.training_fractions) check_fractions(dev, val);
  if (config.split_seeds.empty()) throw ConfigError("need at least one split seed");
  if (config.output_dir.empty()) throw ConfigError("output_dir must be set");
}

SphereModel build_object(const ObjectSpec& spec) {
  SphereModel model;
  if (spec.kind == "box") {
    model = make_primitive(PrimitiveKind::kBox, spec.dimensions, spec.spacing_mm, spec.name);
  } else if (spec.kind == "sphere") {
    model = make_primitive(PrimitiveKind::kSphere, spec.dimensions, spec.spacing_mm, spec.name);
  } else if (spec.kind == "cylinder") {
    model =
        make_primitive(PrimitiveKind::kCylinder, spec.dimensions, spec.spacing_mm, spec.name);
  } else if (spec.kind == "mesh") {
    model = spheres_from_vertices(read_vertex_file(spec.path), spec.name);
    center_xy(model);
  } else {
    throw ConfigError("unknown object kind: " + spec.kind);
  }
  return model;
}

namespace {

struct PreparedData {
  std::map<std::size_t, LabeledSet> raw_sets;        // size -> observations
  std::map<std::size_t, LabeledSet> compressed_sets; // m -> observations
  std::map<std::size_t, double> coverage;            // m -> input coverage
  std::size_t perturbations = 0;
  std::size_t object_count = 0;
  std::vector<std::vector<double>> mean_frames;
  int finest_side = 0;
};

LabeledSet frames_to_set(const std::vector<TactileFrame>& frames) {
  LabeledSet set;
  const auto n = static_cast<Eigen::Index>(frames.front().values.size());
  set.x.resize(static_cast<Eigen::Index>(frames.size()), n);
  set.labels.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    set.x.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(frames[i].values.data(), n);
    set.labels.push_back(frames[i].label);
  }
  return set;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData data;
  std::vector<SphereModel> models;
  models.reserve(config.objects.size());
  for (const auto& spec : config.objects) models.push_back(build_object(spec));
  data.object_count = models.size();

  std::vector<int> sides = config.array_sides;
  std::sort(sides.begin(), sides.end());
  sides.erase(std::unique(sides.begin(), sides.end()), sides.end());
  data.finest_side = sides.back();

  const auto grid = enumerate_perturbations(config.row_offsets_mm, config.col_offsets_mm,
                                            config.rotations_deg);
  data.perturbations = grid.size();

  std::vector<TactileFrame> finest_frames;
  for (int side : sides) {
    const TaxelArray array =
        TaxelArray::square(side, config.substrate_extent_mm, config.stiffness_n_per_mm);
    auto frames = generate_dataset(
        array, models, config.row_offsets_mm, config.col_offsets_mm, config.rotations_deg,
        config.noise_sigma_n, hash64({config.base_seed, static_cast<std::uint64_t>(side)}),
        config.press_depth_mm);
    data.raw_sets.emplace(static_cast<std::size_t>(array.size()), frames_to_set(frames));
    if (side == data.finest_side) finest_frames = std::move(frames);
  }

  // Mean noisy frame per object on the finest array.
  const std::size_t n = static_cast<std::size_t>(data.finest_side) * data.finest_side;
  data.mean_frames.assign(data.object_count, std::vector<double>(n, 0.0));
  for (const auto& frame : finest_frames) {
    auto& mean = data.mean_frames[static_cast<std::size_t>(frame.label)];
    for (std::size_t i = 0; i < n; ++i) mean[i] += frame.values[i];
  }
  for (auto& mean : data.mean_frames) {
    for (double& v : mean) v /= static_cast<double>(data.perturbations);
  }

  // One measurement matrix per m, shared by every frame and split.
  for (std::size_t m : config.sizes) {
    const SbheMatrix matrix = build_sbhe(n, m, config.block_size, config.matrix_seed);
    data.coverage.emplace(m, input_coverage(matrix));
    LabeledSet set;
    set.x.resize(static_cast<Eigen::Index>(finest_frames.size()), static_cast<Eigen::Index>(m));
    set.labels.reserve(finest_frames.size());
    for (std::size_t i = 0; i < finest_frames.size(); ++i) {
      const auto y = sbhe_apply(matrix, finest_frames[i].values);
      set.x.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(m));
      set.labels.push_back(finest_frames[i].label);
    }
    data.compressed_sets.emplace(m, std::move(set));
  }
  return data;
}

// Observation indices (object-major layout) for a perturbation-index set.
std::vector<std::size_t> expand_observations(const std::vector<std::size_t>& perturbation_ids,
                                             std::size_t objects, std::size_t perturbations) {
  std::vector<std::size_t> out;
  out.reserve(perturbation_ids.size() * objects);
  for (std::size_t obj = 0; obj < objects; ++obj) {
    for (std::size_t p : perturbation_ids) out.push_back(obj * perturbations + p);
  }
  return out;
}

void check_split_hygiene(const Splits& splits, std::size_t perturbations) {
  std::vector<int> seen(perturbations, 0);
  for (std::size_t p : splits.development) ++seen[p];
  for (std::size_t p : splits.validation) ++seen[p];
  for (std::size_t p : splits.test) ++seen[p];
  for (int count : seen) {
    if (count != 1) throw std::logic_error("split hygiene violated");
  }
}

void run_cell(SweepCell& cell, const PreparedData& data, const ExperimentConfig& config) {
  const LabeledSet& set = cell.condition == "raw" ? data.raw_sets.at(cell.size)
                                                  : data.compressed_sets.at(cell.size);
  const Splits splits =
      make_splits(data.perturbations, cell.dev_fraction, cell.val_fraction, cell.split_seed);
  check_split_hygiene(splits, data.perturbations);

  const auto dev = expand_observations(splits.development, data.object_count, data.perturbations);
  const auto val = expand_observations(splits.validation, data.object_count, data.perturbations);
  const auto test = expand_observations(splits.test, data.object_count, data.perturbations);

  const DagSvmModel model =
      train_dag(set, config.c_grid, dev, val, config.svm_tol, cell.split_seed);
  const Evaluation eval = evaluate(model, set.subset(test));
  cell.accuracy = eval.accuracy;
  if (cell.sweep == Sweep::kSignalSize) cell.confusion = eval.confusion;
}

std::string format_double(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

AxisSummary ExperimentResult::summary(Sweep sweep, const std::string& condition,
                                      std::size_t size, double dev_fraction,
                                      double val_fraction) const {
  AxisSummary s;
  std::vector<double> values;
  for (const auto& cell : cells) {
    if (cell.sweep == sweep && cell.condition == condition && cell.size == size &&
        std::abs(cell.dev_fraction - dev_fraction) < 1e-12 &&
        std::abs(cell.val_fraction - val_fraction) < 1e-12) {
      values.push_back(cell.accuracy);
    }
  }
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<Sweep>& only) {
  validate_config(config);
  const PreparedData data = prepare_data(config);

  ExperimentResult result;
  result.finest_side = data.finest_side;
  result.compressed_coverage = data.coverage;
  result.mean_frames = data.mean_frames;
  for (const auto& spec : config.objects) result.object_names.push_back(spec.name);
  for (std::size_t i = 0; i < data.object_count; ++i) {
    result.class_labels.push_back(static_cast<int>(i));
  }

  std::vector<std::size_t> sizes = config.sizes;
  std::sort(sizes.begin(), sizes.end(), std::greater<>());

  const bool run_signal = !only || *only == Sweep::kSignalSize;
  const bool run_training = (!only && !config.training_fractions.empty()) ||
                            (only && *only == Sweep::kTrainingSize);
  if (run_training && config.training_fractions.empty()) {
    throw ConfigError("training-size sweep requested without training_fractions");
  }

  for (const std::string& condition : {std::string{"compressed"}, std::string{"raw"}}) {
    for (std::size_t size : sizes) {
      if (run_signal) {
        for (std::uint64_t seed : config.split_seeds) {
          SweepCell cell;
          cell.sweep = Sweep::kSignalSize;
          cell.condition = condition;
          cell.size = size;
          cell.dev_fraction = config.dev_fraction;
          cell.val_fraction = config.val_fraction;
          cell.split_seed = seed;
          result.cells.push_back(std::move(cell));
        }
      }
      if (run_training) {
        for (const auto& [dev, val] : config.training_fractions) {
          for (std::uint64_t seed : config.split_seeds) {
            SweepCell cell;
            cell.sweep = Sweep::kTrainingSize;
            cell.condition = condition;
            cell.size = size;
            cell.dev_fraction = dev;
            cell.val_fraction = val;
            cell.split_seed = seed;
            result.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }

  // Cells are independent; results land in preallocated slots so the
  // schedule cannot affect output.
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      try {
        run_cell(result.cells[i], data, config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  unsigned thread_count = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                             : std::thread::hardware_concurrency();
  thread_count = std::max(1u, std::min<unsigned>(thread_count, result.cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

void emit_report(const ExperimentResult& result, const ExperimentConfig& config) {
  if (result.cells.empty()) throw InvalidInput("nothing to report: no sweep cells");

  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir / "results", ec);
  if (!ec) fs::create_directories(out_dir / "frames", ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir);

  std::vector<const SweepCell*> ordered;
  for (const auto& cell : result.cells) ordered.push_back(&cell);
  std::sort(ordered.begin(), ordered.end(), [](const SweepCell* a, const SweepCell* b) {
    const auto key = [](const SweepCell& c) {
      return std::tuple(static_cast<int>(c.sweep), c.condition, -static_cast<long long>(c.size),
                        -c.dev_fraction, c.split_seed);
    };
    return key(*a) < key(*b);
  });

  // Per-cell tables, one sweep per file.
  {
    std::ofstream csv(out_dir / "results" / "signal_size.csv");
    if (!csv) throw IoError("cannot write signal_size.csv");
    csv << "condition,size,seed,accuracy\n";
    for (const SweepCell* cell : ordered) {
      if (cell->sweep != Sweep::kSignalSize) continue;
      csv << cell->condition << ',' << cell->size << ',' << cell->split_seed << ','
          << format_double(cell->accuracy) << '\n';
    }
  }
  {
    std::ofstream csv(out_dir / "results" / "training_size.csv");
    if (!csv) throw IoError("cannot write training_size.csv");
    csv << "condition,size,dev_fraction,val_fraction,training_fraction,seed,accuracy\n";
    for (const SweepCell* cell : ordered) {
      if (cell->sweep != Sweep::kTrainingSize) continue;
      csv << cell->condition << ',' << cell->size << ','
          << format_double(cell->dev_fraction, "%.6g") << ','
          << format_double(cell->val_fraction, "%.6g") << ','
          << format_double(cell->dev_fraction + cell->val_fraction, "%.6g") << ','
          << cell->split_seed << ',' << format_double(cell->accuracy) << '\n';
    }
  }

  // Mean confusion matrices per signal-size condition.
  std::map<std::pair<std::string, std::size_t>, std::pair<Eigen::MatrixXd, int>> confusions;
  for (const auto& cell : result.cells) {
    if (cell.sweep != Sweep::kSignalSize || cell.confusion.size() == 0) continue;
    auto& [sum, count] = confusions[{cell.condition, cell.size}];
    if (sum.size() == 0) sum = Eigen::MatrixXd::Zero(cell.confusion.rows(), cell.confusion.cols());
    sum += cell.confusion;
    ++count;
  }
  for (const auto& [key, value] : confusions) {
    const auto& [condition, size] = key;
    const Eigen::MatrixXd mean = value.first / static_cast<double>(value.second);
    std::ofstream csv(out_dir / "results" /
                      ("confusion_" + condition + "_" + std::to_string(size) + ".csv"));
    if (!csv) throw IoError("cannot write confusion matrix");
    csv << "class";
    for (const auto& name : result.object_names) csv << ',' << name;
    csv << '\n';
    for (Eigen::Index r = 0; r < mean.rows(); ++r) {
      csv << result.object_names[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < mean.cols(); ++c) {
        csv << ',' << format_double(mean(r, c));
      }
      csv << '\n';
    }
  }

  // Aggregates.
  json summary;
  summary["signal_size"] = json::array();
  summary["training_size"] = json::array();
  std::set<std::tuple<int, std::string, std::size_t, double, double>> seen;
  for (const SweepCell* cell : ordered) {
    const auto key = std::tuple(static_cast<int>(cell->sweep), cell->condition, cell->size,
                                cell->dev_fraction, cell->val_fraction);
    if (!seen.insert(key).second) continue;
    const AxisSummary axis = result.summary(cell->sweep, cell->condition, cell->size,
                                            cell->dev_fraction, cell->val_fraction);
    json row{{"condition", cell->condition},
             {"size", cell->size},
             {"mean", axis.mean},
             {"min", axis.min},
             {"max", axis.max},
             {"stddev", axis.stddev}};
    if (cell->sweep == Sweep::kSignalSize) {
      if (cell->condition == "compressed") {
        row["input_coverage"] = result.compressed_coverage.at(cell->size);
      }
      summary["signal_size"].push_back(std::move(row));
    } else {
      row["dev_fraction"] = cell->dev_fraction;
      row["val_fraction"] = cell->val_fraction;
      row["training_fraction"] = cell->dev_fraction + cell->val_fraction;
      summary["training_size"].push_back(std::move(row));
    }
  }
  summary["measurement_input_coverage"] = json::object();
  for (const auto& [m, coverage] : result.compressed_coverage) {
    summary["measurement_input_coverage"][std::to_string(m)] = coverage;
  }
  // Published benchmark accuracies for the 64x64-array / 16-object protocol,
  // recorded for orientation only; they are not asserted by this harness.
  summary["reference_accuracies"] = {
      {"protocol", "64x64 array, 16 objects, offsets 0-10mm, rotations 0-45deg"},
      {"raw_size_64", {{"training_60pct", 93.3}, {"training_3pct", 87.8}}},
      {"compressed_size_16", {{"training_60pct", 93.2}, {"training_3pct", 86.7}}},
      {"random_assignment_pct", 6.25}};

  std::ofstream sf(out_dir / "results" / "summary.json");
  if (!sf) throw IoError("cannot write summary.json");
  sf << summary.dump(2) << '\n';

  for (std::size_t i = 0; i < result.mean_frames.size(); ++i) {
    write_pgm((out_dir / "frames" / (result.object_names[i] + ".pgm")).string(),
              result.mean_frames[i], result.finest_side, result.finest_side);
  }
}

}  // namespace tactile
