#pragma once

#include <cstdint>
#include <vector>

#include "tactile/sphere_model.hpp"

namespace tactile {

/// Taxel sensing range in newtons; noisy readings are clipped to [0, max].
constexpr double kSensorMaxN = 0.02;

/// Clearance between the lowest taxel surface and the object's highest point
/// at the start of a touch; press_depth is measured from this start height.
constexpr double kStartClearanceMm = 1.0;

/// Planar square-grid tactile array: taxel spheres suspended under a rigid
/// substrate, each free to translate along the substrate normal only.
struct TaxelArray {
  int rows = 0;
  int cols = 0;
  double pitch_mm = 0.0;            // taxel center spacing
  double taxel_radius_mm = 0.0;     // pitch/2 by default
  double stiffness_n_per_mm = 0.0;  // spring constant
  double substrate_extent_mm = 0.0; // overall square side, pitch * rows

  /// Array family used throughout: `side` x `side` taxels over a fixed
  /// substrate extent (256 mm), taxel radius = pitch/2.
  static TaxelArray square(int side, double extent_mm = 256.0,
                           double stiffness_n_per_mm = 0.001);

  int size() const { return rows * cols; }
  double x_of_col(int j) const {
    return (static_cast<double>(j) - (cols - 1) / 2.0) * pitch_mm;
  }
  double y_of_row(int i) const {
    return (static_cast<double>(i) - (rows - 1) / 2.0) * pitch_mm;
  }
};

void validate_array(const TaxelArray& array);

/// One touch: lateral offsets of the array, object rotation about the array's
/// central axis, press depth from the just-clear start height, noise seed.
struct TouchConfig {
  double row_offset_mm = 0.0;
  double col_offset_mm = 0.0;
  double rotation_deg = 0.0;
  double press_depth_mm = 11.0;
  std::uint64_t seed = 0;
};

/// Per-taxel force readings of one touch, row-major over the grid.
struct TactileFrame {
  std::vector<double> values;  // newtons, length rows*cols
  TaxelArray array;
  int label = -1;  // object class id
  TouchConfig touch;
  bool noisy = false;
};

/// True when every sphere of the model lies laterally inside the substrate
/// footprint (touch offsets included).
bool fits_footprint(const TaxelArray& array, const SphereModel& model,
                    const TouchConfig& touch = {});

/// Quasistatic touch: the substrate is lowered by touch.press_depth_mm from
/// the start height; each taxel's upward displacement is the minimum that
/// leaves it penetration-free against every model sphere and the support
/// plane; force = stiffness * displacement. Taxels contacting nothing read 0.
TactileFrame simulate_touch(const TaxelArray& array, const SphereModel& model,
                            const TouchConfig& touch);

/// Adds i.i.d. Gaussian noise (std dev sigma, seeded) and clips readings to
/// the sensor range [0, 0.02] N.
TactileFrame add_noise(const TactileFrame& frame, double sigma, std::uint64_t seed);

struct Perturbation {
  std::size_t index = 0;
  double row_offset_mm = 0.0;
  double col_offset_mm = 0.0;
  double rotation_deg = 0.0;
};

/// Row-major grid over (row offsets x col offsets x rotations).
std::vector<Perturbation> enumerate_perturbations(const std::vector<double>& row_offsets_mm,
                                                  const std::vector<double>& col_offsets_mm,
                                                  const std::vector<double>& rotations_deg);

/// One noisy frame per (model x perturbation), object-major then perturbation
/// order. Per-frame noise seed = hash64(base_seed, object index, perturbation
/// index), so output is independent of evaluation order. Labels are model
/// indices.
std::vector<TactileFrame> generate_dataset(const TaxelArray& array,
                                           const std::vector<SphereModel>& models,
                                           const std::vector<double>& row_offsets_mm,
                                           const std::vector<double>& col_offsets_mm,
                                           const std::vector<double>& rotations_deg,
                                           double sigma, std::uint64_t base_seed,
                                           double press_depth_mm = 11.0);

}  // namespace tactile
