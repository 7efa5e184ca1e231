#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tactile/dagsvm.hpp"
#include "tactile/simulator.hpp"
#include "tactile/sphere_model.hpp"

namespace tactile {

/// One object of the experiment roster: a procedural primitive or a mesh
/// vertex file converted to a union of spheres.
struct ObjectSpec {
  std::string name;
  std::string kind;  // "box" | "sphere" | "cylinder" | "mesh"
  std::vector<double> dimensions;  // primitive dimensions (mm)
  double spacing_mm = 5.0;         // primitive lattice spacing
  std::string path;                // mesh vertex file
};

/// Full experiment description; mirrors the JSON config file.
struct ExperimentConfig {
  std::vector<int> array_sides;  // e.g. {32, 8, 4}; the largest is "finest"
  double substrate_extent_mm = 256.0;
  double stiffness_n_per_mm = 0.001;
  double press_depth_mm = 11.0;
  double noise_sigma_n = 0.001;
  std::vector<ObjectSpec> objects;
  std::vector<double> row_offsets_mm;
  std::vector<double> col_offsets_mm;
  std::vector<double> rotations_deg;
  std::uint64_t base_seed = 1;
  std::size_t block_size = 32;
  std::uint64_t matrix_seed = 1;
  std::vector<std::size_t> sizes;  // signal-size axis (raw taxel counts and m)
  std::vector<double> c_grid{1e-2, 1e-1, 1.0, 1e1, 1e2};
  double svm_tol = 1e-3;
  double dev_fraction = 0.4;
  double val_fraction = 0.2;
  std::vector<std::pair<double, double>> training_fractions;  // (dev, val) pairs
  std::vector<std::uint64_t> split_seeds;
  std::string output_dir = "results";
  int threads = 0;  // 0 = hardware concurrency
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
void validate_config(const ExperimentConfig& config);

/// Builds a roster model (centered laterally, resting on z = 0).
SphereModel build_object(const ObjectSpec& spec);

enum class Sweep { kSignalSize, kTrainingSize };

/// One trained/evaluated pipeline cell.
struct SweepCell {
  Sweep sweep = Sweep::kSignalSize;
  std::string condition;  // "raw" | "compressed"
  std::size_t size = 0;   // signal size (taxels or measurements)
  double dev_fraction = 0.0;
  double val_fraction = 0.0;
  std::uint64_t split_seed = 0;
  double accuracy = 0.0;  // percent
  Eigen::MatrixXd confusion;  // row percentages (signal-size sweep only)
};

struct AxisSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;
};

struct ExperimentResult {
  std::vector<SweepCell> cells;
  std::vector<int> class_labels;
  std::vector<std::string> object_names;
  std::map<std::size_t, double> compressed_coverage;  // m -> input coverage
  std::vector<std::vector<double>> mean_frames;       // per object, finest array
  int finest_side = 0;

  /// Mean accuracy per (sweep, condition, size, training fractions).
  AxisSummary summary(Sweep sweep, const std::string& condition, std::size_t size,
                      double dev_fraction, double val_fraction) const;
};

/// Runs the requested sweeps. `only` empty runs both.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<Sweep>& only = std::nullopt);

/// Writes results/*.csv, results/summary.json, per-condition confusion
/// matrices and frames/*.pgm under config.output_dir. Refuses to write
/// anything for an empty result.
void emit_report(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace tactile
