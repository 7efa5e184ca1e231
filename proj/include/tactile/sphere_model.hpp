#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace tactile {

struct Sphere {
  Eigen::Vector3d center;  // mm
  double radius;           // mm
};

enum class ModelSource { kMesh, kPrimitive };

/// An object approximated as a union of spheres, resting on the support
/// plane z = 0 (min over spheres of center.z - radius == 0 within 1e-9 mm).
struct SphereModel {
  std::vector<Sphere> spheres;
  std::string name;
  ModelSource source = ModelSource::kPrimitive;

  /// Height of the highest surface point.
  double top() const;
  /// min over spheres of (center.z - radius); 0 for a model resting on z=0.
  double plane_clearance() const;
};

/// Validates radii, non-emptiness and the resting-plane invariant.
void validate_model(const SphereModel& model, double rest_tol = 1e-6);

/// Builds a union-of-spheres model from mesh vertices: one sphere per vertex,
/// all with radius equal to twice the mean nearest-neighbor distance, then
/// translated so the model rests on z = 0.
SphereModel spheres_from_vertices(const std::vector<Eigen::Vector3d>& vertices,
                                  std::string name);

enum class PrimitiveKind { kBox, kSphere, kCylinder };

/// Covers the surface of a primitive with spheres on a regular lattice with
/// point spacing <= sphere_spacing and sphere radius = sphere_spacing, so the
/// touchable surface has no gaps. dimensions:
///   kBox:      {lx, ly, lz} side lengths (mm)
///   kSphere:   {radius}
///   kCylinder: {radius, height}
/// The model is centered at x = y = 0 and rests on z = 0.
SphereModel make_primitive(PrimitiveKind kind, const std::vector<double>& dimensions,
                           double sphere_spacing, std::string name);

/// Rotation by `degrees` about the z axis through x = y = 0.
SphereModel rotated_z(const SphereModel& model, double degrees);

SphereModel translated(const SphereModel& model, const Eigen::Vector3d& offset);

/// Translates so min(center.z - radius) == 0.
void rest_on_plane(SphereModel& model);

/// Translates so the lateral bounding box of the sphere surfaces is centered
/// at x = y = 0.
void center_xy(SphereModel& model);

/// Reads vertices from a text file. Supported: plain "x y z" per line
/// (comments with '#'), OBJ ("v x y z" lines) and OFF vertex sections.
std::vector<Eigen::Vector3d> read_vertex_file(const std::string& path);

}  // namespace tactile
