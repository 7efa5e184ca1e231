#include "tactile/sphere_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile {

double SphereModel::top() const {
  double t = -std::numeric_limits<double>::infinity();
  for (const auto& s : spheres) t = std::max(t, s.center.z() + s.radius);
  return t;
}

double SphereModel::plane_clearance() const {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& s : spheres) c = std::min(c, s.center.z() - s.radius);
  return c;
}

void validate_model(const SphereModel& model, double rest_tol) {
  if (model.spheres.empty()) throw InvalidInput("sphere model is empty");
  for (const auto& s : model.spheres) {
    if (!(s.radius > 0.0)) throw InvalidInput("sphere radius must be positive");
    if (!s.center.allFinite()) throw InvalidInput("sphere center must be finite");
  }
  if (std::abs(model.plane_clearance()) > rest_tol) {
    throw InvalidInput("model does not rest on the support plane z = 0");
  }
}

namespace {

// Nearest-neighbor distances via a uniform grid hash. Cell side equals an
// estimate of the typical spacing; queries expand rings until a neighbor is
// guaranteed closest.
std::vector<double> nearest_neighbor_distances(const std::vector<Eigen::Vector3d>& pts) {
  const std::size_t n = pts.size();
  Eigen::Vector3d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector3d span = (hi - lo).cwiseMax(1e-12);
  const double volume = span.x() * span.y() * span.z();
  double cell = std::cbrt(volume / static_cast<double>(n));
  if (!(cell > 0.0) || !std::isfinite(cell)) cell = 1.0;

  auto key_of = [&](const Eigen::Vector3d& p) {
    const auto ix = static_cast<long long>(std::floor((p.x() - lo.x()) / cell));
    const auto iy = static_cast<long long>(std::floor((p.y() - lo.y()) / cell));
    const auto iz = static_cast<long long>(std::floor((p.z() - lo.z()) / cell));
    return std::array<long long, 3>{ix, iy, iz};
  };

  std::map<std::array<long long, 3>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < n; ++i) grid[key_of(pts[i])].push_back(i);

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto base = key_of(pts[i]);
    double best2 = std::numeric_limits<double>::infinity();
    for (long long ring = 0;; ++ring) {
      for (long long dx = -ring; dx <= ring; ++dx) {
        for (long long dy = -ring; dy <= ring; ++dy) {
          for (long long dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            const auto it = grid.find({base[0] + dx, base[1] + dy, base[2] + dz});
            if (it == grid.end()) continue;
            for (std::size_t j : it->second) {
              if (j == i) continue;
              best2 = std::min(best2, (pts[i] - pts[j]).squaredNorm());
            }
          }
        }
      }
      // Cells at Chebyshev ring k contain all points closer than k*cell, so
      // once a neighbor is found we only need one extra ring to be exact.
      const double safe = static_cast<double>(ring) * cell;
      if (best2 < std::numeric_limits<double>::infinity() && best2 <= safe * safe) break;
      if (static_cast<double>(ring) * cell > span.norm() + cell) break;  // scanned everything
    }
    dist[i] = std::sqrt(best2);
  }
  return dist;
}

}  // namespace

SphereModel spheres_from_vertices(const std::vector<Eigen::Vector3d>& vertices,
                                  std::string name) {
  if (vertices.size() < 2) throw InvalidInput("need at least 2 vertices");
  const auto nn = nearest_neighbor_distances(vertices);
  double mean = 0.0;
  for (double d : nn) {
    if (d <= 0.0) throw DegenerateInput("coincident vertices");
    mean += d;
  }
  mean /= static_cast<double>(nn.size());
  const double radius = 2.0 * mean;

  SphereModel model;
  model.name = std::move(name);
  model.source = ModelSource::kMesh;
  model.spheres.reserve(vertices.size());
  for (const auto& v : vertices) model.spheres.push_back({v, radius});
  rest_on_plane(model);
  return model;
}

namespace {

void push_unique(std::vector<Sphere>& out, std::map<std::array<long long, 3>, bool>& seen,
                 const Eigen::Vector3d& center, double radius) {
  const auto q = [](double v) { return static_cast<long long>(std::llround(v * 1e9)); };
  const std::array<long long, 3> key{q(center.x()), q(center.y()), q(center.z())};
  if (seen.emplace(key, true).second) out.push_back({center, radius});
}

}  // namespace

SphereModel make_primitive(PrimitiveKind kind, const std::vector<double>& dimensions,
                           double sphere_spacing, std::string name) {
  if (!(sphere_spacing > 0.0)) throw InvalidInput("sphere_spacing must be positive");
  for (double d : dimensions) {
    if (!(d > 0.0)) throw InvalidInput("primitive dimensions must be positive");
  }
  const double s = sphere_spacing;

  SphereModel model;
  model.name = std::move(name);
  model.source = ModelSource::kPrimitive;
  std::map<std::array<long long, 3>, bool> seen;
  auto add = [&](const Eigen::Vector3d& c) { push_unique(model.spheres, seen, c, s); };

  // Number of lattice points covering a span L with spacing <= s.
  auto steps = [&](double length) {
    return static_cast<int>(std::ceil(length / s - 1e-12));
  };

  switch (kind) {
    case PrimitiveKind::kBox: {
      if (dimensions.size() != 3) throw InvalidInput("box needs {lx, ly, lz}");
      const double lx = dimensions[0], ly = dimensions[1], lz = dimensions[2];
      if (s >= std::min({lx, ly, lz})) {
        throw CoverageError("sphere_spacing too coarse for box dimensions");
      }
      const int nx = steps(lx), ny = steps(ly), nz = steps(lz);
      auto coord = [](double length, int count, int i) {
        return -length / 2.0 + length * static_cast<double>(i) / static_cast<double>(count);
      };
      for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= ny; ++j) {
          add({coord(lx, nx, i), coord(ly, ny, j), -lz / 2.0});
          add({coord(lx, nx, i), coord(ly, ny, j), lz / 2.0});
        }
      }
      for (int i = 0; i <= nx; ++i) {
        for (int k = 0; k <= nz; ++k) {
          add({coord(lx, nx, i), -ly / 2.0, coord(lz, nz, k)});
          add({coord(lx, nx, i), ly / 2.0, coord(lz, nz, k)});
        }
      }
      for (int j = 0; j <= ny; ++j) {
        for (int k = 0; k <= nz; ++k) {
          add({-lx / 2.0, coord(ly, ny, j), coord(lz, nz, k)});
          add({lx / 2.0, coord(ly, ny, j), coord(lz, nz, k)});
        }
      }
      break;
    }
    case PrimitiveKind::kSphere: {
      if (dimensions.size() != 1) throw InvalidInput("sphere needs {radius}");
      const double r = dimensions[0];
      if (s >= r) throw CoverageError("sphere_spacing too coarse for sphere radius");
      const int nt = std::max(2, steps(std::numbers::pi * r));
      for (int t = 0; t <= nt; ++t) {
        const double theta = std::numbers::pi * static_cast<double>(t) / static_cast<double>(nt);
        const double rr = r * std::sin(theta);
        const double z = r * std::cos(theta);
        const int np = std::max(1, steps(2.0 * std::numbers::pi * rr));
        for (int p = 0; p < np; ++p) {
          const double phi = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(np);
          add({rr * std::cos(phi), rr * std::sin(phi), z});
        }
      }
      break;
    }
    case PrimitiveKind::kCylinder: {
      if (dimensions.size() != 2) throw InvalidInput("cylinder needs {radius, height}");
      const double r = dimensions[0], h = dimensions[1];
      if (s >= std::min(r, h)) {
        throw CoverageError("sphere_spacing too coarse for cylinder dimensions");
      }
      const int nz = steps(h);
      const int np = std::max(1, steps(2.0 * std::numbers::pi * r));
      for (int k = 0; k <= nz; ++k) {
        const double z = -h / 2.0 + h * static_cast<double>(k) / static_cast<double>(nz);
        for (int p = 0; p < np; ++p) {
          const double phi = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(np);
          add({r * std::cos(phi), r * std::sin(phi), z});
        }
      }
      const int nr = steps(r);
      for (int q = 0; q <= nr; ++q) {
        const double rr = r * static_cast<double>(q) / static_cast<double>(nr);
        const int nq = std::max(1, steps(2.0 * std::numbers::pi * rr));
        for (int p = 0; p < nq; ++p) {
          const double phi = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(nq);
          add({rr * std::cos(phi), rr * std::sin(phi), -h / 2.0});
          add({rr * std::cos(phi), rr * std::sin(phi), h / 2.0});
        }
      }
      break;
    }
  }

  center_xy(model);
  rest_on_plane(model);
  return model;
}

SphereModel rotated_z(const SphereModel& model, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  SphereModel out = model;
  for (auto& sp : out.spheres) {
    const double x = sp.center.x(), y = sp.center.y();
    sp.center.x() = c * x - s * y;
    sp.center.y() = s * x + c * y;
  }
  return out;
}

SphereModel translated(const SphereModel& model, const Eigen::Vector3d& offset) {
  SphereModel out = model;
  for (auto& sp : out.spheres) sp.center += offset;
  return out;
}

void rest_on_plane(SphereModel& model) {
  if (model.spheres.empty()) throw InvalidInput("sphere model is empty");
  const double shift = model.plane_clearance();
  for (auto& sp : model.spheres) sp.center.z() -= shift;
}

void center_xy(SphereModel& model) {
  if (model.spheres.empty()) throw InvalidInput("sphere model is empty");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& sp : model.spheres) {
    xlo = std::min(xlo, sp.center.x() - sp.radius);
    xhi = std::max(xhi, sp.center.x() + sp.radius);
    ylo = std::min(ylo, sp.center.y() - sp.radius);
    yhi = std::max(yhi, sp.center.y() + sp.radius);
  }
  const Eigen::Vector3d shift(-(xlo + xhi) / 2.0, -(ylo + yhi) / 2.0, 0.0);
  for (auto& sp : model.spheres) sp.center += shift;
}

std::vector<Eigen::Vector3d> read_vertex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vertex file: " + path);

  std::vector<Eigen::Vector3d> vertices;
  std::string line;
  bool off_header = false;
  long long off_vertices = -1;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;

    if (first == "OFF") {
      off_header = true;
      continue;
    }
    if (off_header && off_vertices < 0) {
      off_vertices = std::stoll(first);  // counts line: nv nf ne
      continue;
    }
    double x, y, z;
    if (first == "v") {
      if (ls >> x >> y >> z) vertices.emplace_back(x, y, z);
      continue;
    }
    // plain "x y z" row (or an OFF vertex row)
    try {
      x = std::stod(first);
    } catch (const std::exception&) {
      continue;  // faces, normals, other records
    }
    if (ls >> y >> z) {
      if (off_vertices >= 0 && static_cast<long long>(vertices.size()) >= off_vertices) continue;
      vertices.emplace_back(x, y, z);
    }
  }
  return vertices;
}

}  // namespace tactile
