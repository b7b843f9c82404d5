#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gasp::mpm {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;

/// Velocity projection applied where the grid touches an obstacle:
/// sticky zeroes the velocity, slip removes the normal component, separate
/// removes it only when it points into the obstacle.
enum class BoundaryKind { sticky, slip, separate };

std::string_view to_string(BoundaryKind k) noexcept;
BoundaryKind boundary_kind_from_string(std::string_view s);

Vec3 project_velocity(const Vec3& v, const Vec3& outward_normal, BoundaryKind kind) noexcept;

struct GridNode {
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();  // holds velocity after grid_update
};

/// Analytic obstacle evaluated at grid nodes.
struct Collider {
  enum class Shape { half_space, sphere, box };

  Shape shape = Shape::half_space;
  // half_space: point + outward normal (solid side is behind the normal)
  // sphere: center + radius; box: lo + hi
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double radius = 0.0;
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  BoundaryKind behavior = BoundaryKind::sticky;

  static Collider ground(double height, BoundaryKind b = BoundaryKind::sticky);
  static Collider half_space(const Vec3& point, const Vec3& normal, BoundaryKind b);
  static Collider sphere(const Vec3& center, double radius, BoundaryKind b);
  static Collider box(const Vec3& lo, const Vec3& hi, BoundaryKind b);

  /// True if `x` lies inside the obstacle; `outward` receives the surface normal.
  bool contains(const Vec3& x, Vec3& outward) const noexcept;
};

/// Uniform background grid. `resolution` counts nodes per axis; node (i,j,k)
/// sits at origin + h * (i,j,k).
class SimGrid {
 public:
  /// Faces ordered x-, x+, y-, y+, z-, z+.
  using FaceBoundaries = std::array<BoundaryKind, 6>;

  SimGrid() = default;
  SimGrid(const Vec3& origin, double h, const Vec3i& resolution,
          FaceBoundaries faces = uniform_faces(BoundaryKind::separate), int boundary_band = 3);

  static FaceBoundaries uniform_faces(BoundaryKind k) {
    return {k, k, k, k, k, k};
  }

  const Vec3& origin() const noexcept { return origin_; }
  double cell_size() const noexcept { return h_; }
  const Vec3i& resolution() const noexcept { return res_; }
  const FaceBoundaries& faces() const noexcept { return faces_; }
  int boundary_band() const noexcept { return band_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * res_[1] + j) * res_[2] + k;
  }
  Vec3i coords(std::size_t idx) const noexcept;
  Vec3 node_position(int i, int j, int k) const noexcept {
    return origin_ + h_ * Vec3(i, j, k);
  }

  GridNode& node(int i, int j, int k) noexcept { return nodes_[index(i, j, k)]; }
  const GridNode& node(int i, int j, int k) const noexcept { return nodes_[index(i, j, k)]; }
  std::vector<GridNode>& nodes() noexcept { return nodes_; }
  const std::vector<GridNode>& nodes() const noexcept { return nodes_; }

  void clear() noexcept;

  /// A particle is safe when it sits at least two cells inside every face,
  /// so any kernel stencil stays on the grid.
  bool in_safe_domain(const Vec3& x) const noexcept;

  double total_mass() const noexcept;
  Vec3 total_momentum() const noexcept;

 private:
  Vec3 origin_ = Vec3::Zero();
  double h_ = 1.0;
  Vec3i res_ = Vec3i::Zero();
  FaceBoundaries faces_ = uniform_faces(BoundaryKind::separate);
  int band_ = 3;
  std::vector<GridNode> nodes_;
};

}  // namespace gasp::mpm
