#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tactile/labeled_set.hpp"
#include "tactile/sbhe.hpp"
#include "tactile/simulator.hpp"

namespace tactile {

// Binary containers. All scalars are little-endian 64-bit IEEE doubles.
//   "TXL1": one frame per file, magic then n values.
//   "CSM1": one file per dataset, magic then m values per record.

void write_txl(const std::string& path, const std::vector<double>& values);
std::vector<double> read_txl(const std::string& path);

void write_csm(const std::string& path, const std::vector<std::vector<double>>& records);
std::vector<std::vector<double>> read_csm(const std::string& path, std::size_t m);

/// 8-bit binary PGM; values are clipped to [0, max_value] and scaled.
void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols,
               double max_value = kSensorMaxN);

/// Per-record bookkeeping shared by both dataset layouts.
struct DatasetRecord {
  std::string file;  // empty for CSM containers
  int label = 0;
  std::string object;
  std::size_t perturbation = 0;
  std::uint64_t noise_seed = 0;
};

/// A simulated-frame dataset directory: manifest.json + frames/*.txl + CSV.
struct FrameDatasetInfo {
  TaxelArray array;
  double noise_sigma = 0.0;
  double press_depth_mm = 0.0;
  std::uint64_t base_seed = 0;
  std::vector<std::string> object_names;
  std::vector<Perturbation> perturbations;
  std::vector<DatasetRecord> records;
};

void write_frame_dataset(const std::string& dir, const FrameDatasetInfo& info,
                         const std::vector<TactileFrame>& frames);

/// A compressed dataset directory: manifest.json + compressed.csm.
struct CompressedDatasetInfo {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t block_size = 0;
  std::uint64_t matrix_seed = 0;
  std::vector<std::string> object_names;
  std::size_t perturbation_count = 0;
  std::vector<DatasetRecord> records;
};

void write_compressed_dataset(const std::string& dir, const CompressedDatasetInfo& info,
                              const std::vector<CompressedSignal>& signals);

/// Loaded observations plus the perturbation structure needed for splitting.
struct LoadedDataset {
  LabeledSet set;
  std::vector<std::size_t> perturbation_of;  // per observation
  std::size_t perturbation_count = 0;
  std::vector<std::string> object_names;
  std::string format;  // "TXL1" or "CSM1"
};

/// Reads either dataset layout, keyed by manifest.json in `dir`.
LoadedDataset load_dataset(const std::string& dir);

/// SBHE persistence: JSON header only; index maps are regenerated from the
/// seed on load.
void save_sbhe(const SbheMatrix& matrix, const std::string& path);
SbheMatrix load_sbhe(const std::string& path);

}  // namespace tactile
