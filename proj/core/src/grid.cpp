#include "gasp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gasp/error.hpp"

namespace gasp::mpm {

std::string_view to_string(BoundaryKind k) noexcept {
  switch (k) {
    case BoundaryKind::sticky: return "sticky";
    case BoundaryKind::slip: return "slip";
    case BoundaryKind::separate: return "separate";
  }
  return "unknown";
}

BoundaryKind boundary_kind_from_string(std::string_view s) {
  if (s == "sticky") return BoundaryKind::sticky;
  if (s == "slip") return BoundaryKind::slip;
  if (s == "separate") return BoundaryKind::separate;
  throw ConfigError("unknown boundary behavior '" + std::string(s) +
                    "' (expected sticky, slip or separate)");
}

Vec3 project_velocity(const Vec3& v, const Vec3& n, BoundaryKind kind) noexcept {
  switch (kind) {
    case BoundaryKind::sticky: return Vec3::Zero();
    case BoundaryKind::slip: return v - v.dot(n) * n;
    case BoundaryKind::separate: {
      const double vn = v.dot(n);
      return vn < 0.0 ? Vec3(v - vn * n) : v;
    }
  }
  return v;
}

Collider Collider::ground(double height, BoundaryKind b) {
  return half_space(Vec3(0.0, 0.0, height), Vec3::UnitZ(), b);
}

Collider Collider::half_space(const Vec3& point, const Vec3& normal, BoundaryKind b) {
  Collider c;
  c.shape = Shape::half_space;
  c.point = point;
  c.normal = normal.normalized();
  c.behavior = b;
  return c;
}

Collider Collider::sphere(const Vec3& center, double radius, BoundaryKind b) {
  Collider c;
  c.shape = Shape::sphere;
  c.point = center;
  c.radius = radius;
  c.behavior = b;
  return c;
}

Collider Collider::box(const Vec3& lo, const Vec3& hi, BoundaryKind b) {
  Collider c;
  c.shape = Shape::box;
  c.lo = lo.cwiseMin(hi);
  c.hi = lo.cwiseMax(hi);
  c.behavior = b;
  return c;
}

bool Collider::contains(const Vec3& x, Vec3& outward) const noexcept {
  switch (shape) {
    case Shape::half_space:
      if ((x - point).dot(normal) < 0.0) {
        outward = normal;
        return true;
      }
      return false;
    case Shape::sphere: {
      const Vec3 d = x - point;
      const double r = d.norm();
      if (r < radius) {
        outward = r > 0.0 ? Vec3(d / r) : Vec3(Vec3::UnitZ());
        return true;
      }
      return false;
    }
    case Shape::box: {
      if ((x.array() < lo.array()).any() || (x.array() > hi.array()).any()) return false;
      // Exit through the nearest face.
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        const double dlo = x[a] - lo[a];
        const double dhi = hi[a] - x[a];
        if (dlo < best) {
          best = dlo;
          outward = -Vec3::Unit(a);
        }
        if (dhi < best) {
          best = dhi;
          outward = Vec3::Unit(a);
        }
      }
      return true;
    }
  }
  return false;
}

SimGrid::SimGrid(const Vec3& origin, double h, const Vec3i& resolution, FaceBoundaries faces,
                 int boundary_band)
    : origin_(origin), h_(h), res_(resolution), faces_(faces), band_(boundary_band) {
  if (!(h > 0.0)) throw ConfigError("grid cell size must be positive");
  if ((resolution.array() < 4).any()) throw ConfigError("grid resolution must be at least 4 per axis");
  nodes_.resize(static_cast<std::size_t>(res_[0]) * res_[1] * res_[2]);
}

Vec3i SimGrid::coords(std::size_t idx) const noexcept {
  const int k = static_cast<int>(idx % res_[2]);
  const std::size_t ij = idx / res_[2];
  return {static_cast<int>(ij / res_[1]), static_cast<int>(ij % res_[1]), k};
}

void SimGrid::clear() noexcept { std::fill(nodes_.begin(), nodes_.end(), GridNode{}); }

bool SimGrid::in_safe_domain(const Vec3& x) const noexcept {
  for (int a = 0; a < 3; ++a) {
    const double u = (x[a] - origin_[a]) / h_;
    if (!(u >= 2.0 && u <= static_cast<double>(res_[a] - 3))) return false;
  }
  return true;
}

double SimGrid::total_mass() const noexcept {
  double m = 0.0;
  for (const auto& n : nodes_) m += n.mass;
  return m;
}

Vec3 SimGrid::total_momentum() const noexcept {
  Vec3 p = Vec3::Zero();
  for (const auto& n : nodes_) p += n.momentum;
  return p;
}

}  // namespace gasp::mpm
