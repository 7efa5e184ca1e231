#include "tactile/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

TaxelArray TaxelArray::square(int side, double extent_mm, double stiffness_n_per_mm) {
  if (side < 1) throw InvalidInput("array side must be >= 1");
  TaxelArray a;
  a.rows = side;
  a.cols = side;
  a.substrate_extent_mm = extent_mm;
  a.pitch_mm = extent_mm / static_cast<double>(side);
  a.taxel_radius_mm = a.pitch_mm / 2.0;
  a.stiffness_n_per_mm = stiffness_n_per_mm;
  validate_array(a);
  return a;
}

void validate_array(const TaxelArray& array) {
  if (array.rows < 1 || array.cols < 1) throw InvalidInput("array must have rows, cols >= 1");
  if (!(array.stiffness_n_per_mm > 0.0)) throw InvalidInput("stiffness must be positive");
  if (!(array.pitch_mm > 0.0) || !(array.taxel_radius_mm > 0.0)) {
    throw InvalidInput("pitch and taxel radius must be positive");
  }
  if (std::abs(array.pitch_mm * array.rows - array.substrate_extent_mm) > 1e-9) {
    throw InvalidInput("pitch * rows must equal the substrate extent");
  }
}

bool fits_footprint(const TaxelArray& array, const SphereModel& model,
                    const TouchConfig& touch) {
  const double half = array.substrate_extent_mm / 2.0;
  for (const auto& s : model.spheres) {
    if (std::abs(s.center.x() - touch.col_offset_mm) + s.radius > half) return false;
    if (std::abs(s.center.y() - touch.row_offset_mm) + s.radius > half) return false;
  }
  return true;
}

TactileFrame simulate_touch(const TaxelArray& array, const SphereModel& model,
                            const TouchConfig& touch) {
  validate_array(array);
  validate_model(model);
  if (!(touch.press_depth_mm > 0.0)) throw InvalidInput("press_depth must be positive");
  if (touch.rotation_deg < 0.0 || touch.rotation_deg >= 360.0) {
    throw InvalidInput("rotation_deg must lie in [0, 360)");
  }

  const SphereModel posed =
      touch.rotation_deg != 0.0 ? rotated_z(model, touch.rotation_deg) : model;

  const double rt = array.taxel_radius_mm;
  // Start height: lowest taxel surface kStartClearanceMm above the object's
  // highest point, then the substrate descends by press_depth.
  const double z_nominal = posed.top() + kStartClearanceMm + rt - touch.press_depth_mm;

  // Minimum penetration-free center height per taxel; the support plane
  // z = 0 gives the floor value rt.
  std::vector<double> required(static_cast<std::size_t>(array.size()), rt);

  for (const auto& s : posed.spheres) {
    const double reach = rt + s.radius;
    const double cx = s.center.x() + touch.col_offset_mm;
    const double cy = s.center.y() + touch.row_offset_mm;
    // Taxel index window within lateral reach of this sphere.
    const double x0 = -(array.cols - 1) / 2.0 * array.pitch_mm;
    const double y0 = -(array.rows - 1) / 2.0 * array.pitch_mm;
    const int jlo = std::max(0, static_cast<int>(std::ceil((cx - reach - x0) / array.pitch_mm)));
    const int jhi = std::min(array.cols - 1,
                             static_cast<int>(std::floor((cx + reach - x0) / array.pitch_mm)));
    const int ilo = std::max(0, static_cast<int>(std::ceil((cy - reach - y0) / array.pitch_mm)));
    const int ihi = std::min(array.rows - 1,
                             static_cast<int>(std::floor((cy + reach - y0) / array.pitch_mm)));
    for (int i = ilo; i <= ihi; ++i) {
      const double dy = y0 + i * array.pitch_mm - cy;
      for (int j = jlo; j <= jhi; ++j) {
        const double dx = x0 + j * array.pitch_mm - cx;
        const double lat2 = dx * dx + dy * dy;
        if (lat2 >= reach * reach) continue;
        const double z = s.center.z() + std::sqrt(reach * reach - lat2);
        auto& cell = required[static_cast<std::size_t>(i) * array.cols + j];
        cell = std::max(cell, z);
      }
    }
  }

  TactileFrame frame;
  frame.array = array;
  frame.touch = touch;
  frame.noisy = false;
  frame.values.resize(required.size());
  for (std::size_t t = 0; t < required.size(); ++t) {
    const double displacement = std::max(0.0, required[t] - z_nominal);
    frame.values[t] = array.stiffness_n_per_mm * displacement;
  }
  return frame;
}

TactileFrame add_noise(const TactileFrame& frame, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidInput("noise sigma must be nonnegative");
  if (frame.noisy) throw InvalidInput("frame already contains noise");
  TactileFrame out = frame;
  out.noisy = true;
  Rng rng(seed);
  for (auto& v : out.values) {
    v = std::clamp(v + sigma * rng.gaussian(), 0.0, kSensorMaxN);
  }
  return out;
}

std::vector<Perturbation> enumerate_perturbations(const std::vector<double>& row_offsets_mm,
                                                  const std::vector<double>& col_offsets_mm,
                                                  const std::vector<double>& rotations_deg) {
  if (row_offsets_mm.empty() || col_offsets_mm.empty() || rotations_deg.empty()) {
    throw InvalidInput("perturbation lists must be non-empty");
  }
  std::vector<Perturbation> grid;
  grid.reserve(row_offsets_mm.size() * col_offsets_mm.size() * rotations_deg.size());
  std::size_t index = 0;
  for (double r : row_offsets_mm) {
    for (double c : col_offsets_mm) {
      for (double rot : rotations_deg) {
        grid.push_back({index++, r, c, rot});
      }
    }
  }
  return grid;
}

std::vector<TactileFrame> generate_dataset(const TaxelArray& array,
                                           const std::vector<SphereModel>& models,
                                           const std::vector<double>& row_offsets_mm,
                                           const std::vector<double>& col_offsets_mm,
                                           const std::vector<double>& rotations_deg,
                                           double sigma, std::uint64_t base_seed,
                                           double press_depth_mm) {
  const auto grid = enumerate_perturbations(row_offsets_mm, col_offsets_mm, rotations_deg);
  std::vector<TactileFrame> frames;
  frames.reserve(models.size() * grid.size());
  for (std::size_t obj = 0; obj < models.size(); ++obj) {
    for (const auto& p : grid) {
      TouchConfig touch;
      touch.row_offset_mm = p.row_offset_mm;
      touch.col_offset_mm = p.col_offset_mm;
      touch.rotation_deg = p.rotation_deg;
      touch.press_depth_mm = press_depth_mm;
      touch.seed = hash64({base_seed, obj, p.index});
      TactileFrame noisy = add_noise(simulate_touch(array, models[obj], touch), sigma, touch.seed);
      noisy.label = static_cast<int>(obj);
      frames.push_back(std::move(noisy));
    }
  }
  return frames;
}

}  // namespace tactile
