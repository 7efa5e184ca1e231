#include "tactile/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tactile/errors.hpp"

namespace tactile {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void put_f64_le(std::ofstream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double get_f64_le(std::ifstream& in) {
  char bytes[8];
  in.read(bytes, 8);
  if (!in) throw IoError("truncated binary container");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

void expect_magic(std::ifstream& in, const char* magic, const std::string& path) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::memcmp(buf, magic, 4) != 0) {
    throw IoError("bad magic in " + path);
  }
}

json array_to_json(const TaxelArray& a) {
  return json{{"rows", a.rows},
              {"cols", a.cols},
              {"pitch_mm", a.pitch_mm},
              {"taxel_radius_mm", a.taxel_radius_mm},
              {"stiffness_n_per_mm", a.stiffness_n_per_mm},
              {"substrate_extent_mm", a.substrate_extent_mm}};
}

TaxelArray array_from_json(const json& j) {
  TaxelArray a;
  a.rows = j.at("rows").get<int>();
  a.cols = j.at("cols").get<int>();
  a.pitch_mm = j.at("pitch_mm").get<double>();
  a.taxel_radius_mm = j.at("taxel_radius_mm").get<double>();
  a.stiffness_n_per_mm = j.at("stiffness_n_per_mm").get<double>();
  a.substrate_extent_mm = j.at("substrate_extent_mm").get<double>();
  return a;
}

json records_to_json(const std::vector<DatasetRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json item{{"label", r.label},
              {"object", r.object},
              {"perturbation", r.perturbation},
              {"noise_seed", r.noise_seed}};
    if (!r.file.empty()) item["file"] = r.file;
    arr.push_back(std::move(item));
  }
  return arr;
}

std::vector<DatasetRecord> records_from_json(const json& arr) {
  std::vector<DatasetRecord> records;
  for (const auto& item : arr) {
    DatasetRecord r;
    r.label = item.at("label").get<int>();
    r.object = item.value("object", std::string{});
    r.perturbation = item.at("perturbation").get<std::size_t>();
    r.noise_seed = item.value("noise_seed", std::uint64_t{0});
    r.file = item.value("file", std::string{});
    records.push_back(std::move(r));
  }
  return records;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

}  // namespace

void write_txl(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("TXL1", 4);
  for (double v : values) put_f64_le(out, v);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<double> read_txl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  expect_magic(in, "TXL1", path);
  const auto total = fs::file_size(path);
  if (total < 4 || (total - 4) % 8 != 0) throw IoError("corrupt TXL1 container: " + path);
  std::vector<double> values((total - 4) / 8);
  for (auto& v : values) v = get_f64_le(in);
  return values;
}

void write_csm(const std::string& path, const std::vector<std::vector<double>>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("CSM1", 4);
  for (const auto& record : records) {
    for (double v : record) put_f64_le(out, v);
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::vector<double>> read_csm(const std::string& path, std::size_t m) {
  if (m == 0) throw InvalidInput("record length must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  expect_magic(in, "CSM1", path);
  const auto total = fs::file_size(path);
  if (total < 4 || (total - 4) % (8 * m) != 0) throw IoError("corrupt CSM1 container: " + path);
  std::vector<std::vector<double>> records((total - 4) / (8 * m));
  for (auto& record : records) {
    record.resize(m);
    for (auto& v : record) v = get_f64_le(in);
  }
  return records;
}

void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols,
               double max_value) {
  if (rows * cols != static_cast<int>(values.size())) {
    throw DimensionError("image dimensions do not match value count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << cols << " " << rows << "\n255\n";
  for (double v : values) {
    const double scaled = std::clamp(v / max_value, 0.0, 1.0) * 255.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled))));
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_frame_dataset(const std::string& dir, const FrameDatasetInfo& info,
                         const std::vector<TactileFrame>& frames) {
  if (frames.size() != info.records.size()) {
    throw DimensionError("record count does not match frame count");
  }
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "frames", ec);
  if (ec) throw IoError("cannot create dataset directory " + dir);

  json manifest;
  manifest["format"] = "TXL1";
  manifest["array"] = array_to_json(info.array);
  manifest["noise_sigma_n"] = info.noise_sigma;
  manifest["press_depth_mm"] = info.press_depth_mm;
  manifest["base_seed"] = info.base_seed;
  manifest["objects"] = json::array();
  for (std::size_t i = 0; i < info.object_names.size(); ++i) {
    manifest["objects"].push_back({{"label", i}, {"name", info.object_names[i]}});
  }
  manifest["perturbations"] = json::array();
  for (const auto& p : info.perturbations) {
    manifest["perturbations"].push_back({{"index", p.index},
                                         {"row_offset_mm", p.row_offset_mm},
                                         {"col_offset_mm", p.col_offset_mm},
                                         {"rotation_deg", p.rotation_deg}});
  }
  manifest["records"] = records_to_json(info.records);

  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw IoError("cannot write manifest in " + dir);
  mf << manifest.dump(2) << '\n';

  char row[64];
  std::ofstream csv(fs::path(dir) / "frames.csv");
  if (!csv) throw IoError("cannot write frames.csv in " + dir);
  csv << "label,object,perturbation";
  for (int i = 0; i < info.array.size(); ++i) csv << ",v" << i;
  csv << '\n';
  for (std::size_t r = 0; r < frames.size(); ++r) {
    write_txl((fs::path(dir) / info.records[r].file).string(), frames[r].values);
    csv << info.records[r].label << ',' << info.records[r].object << ','
        << info.records[r].perturbation;
    for (double v : frames[r].values) {
      std::snprintf(row, sizeof row, ",%.17g", v);
      csv << row;
    }
    csv << '\n';
  }
}

void write_compressed_dataset(const std::string& dir, const CompressedDatasetInfo& info,
                              const std::vector<CompressedSignal>& signals) {
  if (signals.size() != info.records.size()) {
    throw DimensionError("record count does not match signal count");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset directory " + dir);

  json manifest;
  manifest["format"] = "CSM1";
  manifest["n"] = info.n;
  manifest["m"] = info.m;
  manifest["block_size"] = info.block_size;
  manifest["matrix_seed"] = info.matrix_seed;
  manifest["container"] = "compressed.csm";
  manifest["perturbation_count"] = info.perturbation_count;
  manifest["objects"] = json::array();
  for (std::size_t i = 0; i < info.object_names.size(); ++i) {
    manifest["objects"].push_back({{"label", i}, {"name", info.object_names[i]}});
  }
  manifest["records"] = records_to_json(info.records);

  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw IoError("cannot write manifest in " + dir);
  mf << manifest.dump(2) << '\n';

  std::vector<std::vector<double>> rows;
  rows.reserve(signals.size());
  for (const auto& s : signals) {
    if (s.values.size() != info.m) throw DimensionError("signal length does not match m");
    rows.push_back(s.values);
  }
  write_csm((fs::path(dir) / "compressed.csm").string(), rows);
}

LoadedDataset load_dataset(const std::string& dir) {
  const json manifest = load_json_file((fs::path(dir) / "manifest.json").string());
  const std::string format = manifest.at("format").get<std::string>();
  const auto records = records_from_json(manifest.at("records"));
  if (records.empty()) throw IoError("dataset has no records: " + dir);

  LoadedDataset loaded;
  loaded.format = format;
  for (const auto& obj : manifest.at("objects")) {
    loaded.object_names.push_back(obj.at("name").get<std::string>());
  }
  loaded.perturbation_of.reserve(records.size());
  loaded.set.labels.reserve(records.size());

  if (format == "TXL1") {
    loaded.perturbation_count = manifest.at("perturbations").size();
    const auto n = static_cast<Eigen::Index>(array_from_json(manifest.at("array")).size());
    loaded.set.x.resize(static_cast<Eigen::Index>(records.size()), n);
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto values = read_txl((fs::path(dir) / records[r].file).string());
      if (static_cast<Eigen::Index>(values.size()) != n) {
        throw DimensionError("frame length mismatch in " + records[r].file);
      }
      loaded.set.x.row(static_cast<Eigen::Index>(r)) =
          Eigen::Map<const Eigen::VectorXd>(values.data(), n);
      loaded.set.labels.push_back(records[r].label);
      loaded.perturbation_of.push_back(records[r].perturbation);
    }
  } else if (format == "CSM1") {
    loaded.perturbation_count = manifest.at("perturbation_count").get<std::size_t>();
    const auto m = manifest.at("m").get<std::size_t>();
    const auto container = manifest.value("container", std::string{"compressed.csm"});
    const auto rows = read_csm((fs::path(dir) / container).string(), m);
    if (rows.size() != records.size()) throw IoError("record count mismatch in " + dir);
    loaded.set.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      loaded.set.x.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::VectorXd>(
          rows[r].data(), static_cast<Eigen::Index>(m));
      loaded.set.labels.push_back(records[r].label);
      loaded.perturbation_of.push_back(records[r].perturbation);
    }
  } else {
    throw IoError("unknown dataset format: " + format);
  }
  return loaded;
}

void save_sbhe(const SbheMatrix& matrix, const std::string& path) {
  if (!matrix.seeded) {
    throw InvalidInput("only seeded matrices can be persisted as a header");
  }
  json doc{{"n", matrix.n},
           {"m", matrix.m},
           {"block_size", matrix.block_size},
           {"seed", matrix.seed}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

SbheMatrix load_sbhe(const std::string& path) {
  const json doc = load_json_file(path);
  return build_sbhe(doc.at("n").get<std::size_t>(), doc.at("m").get<std::size_t>(),
                    doc.at("block_size").get<std::size_t>(), doc.at("seed").get<std::uint64_t>());
}

}  // namespace tactile
