#include "gasp/splat_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "gasp/error.hpp"

namespace gasp {

SoupTriangle SoupTriangle::moved(const Vec3& a, const Vec3& b, const Vec3& c) const {
  SoupTriangle t = *this;
  t.v1 = a;
  t.v2 = b;
  t.v3 = c;
  return t;
}

FlatGaussian flatten(const Gaussian& g, double eps, std::size_t index) {
  const double tiny = std::numeric_limits<double>::epsilon();
  int n_tiny = 0;
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(g.scales[k]) || g.scales[k] < 0.0) {
      throw DegenerateError("gaussian " + std::to_string(index) + ": scale " + std::to_string(k) +
                                " is negative or non-finite",
                            index);
    }
    if (g.scales[k] <= tiny) ++n_tiny;
  }
  if (n_tiny >= 2) {
    throw DegenerateError("gaussian " + std::to_string(index) +
                              ": two or more scales vanish, cannot flatten",
                          index);
  }

  int k_min = 0;
  for (int k = 1; k < 3; ++k) {
    if (g.scales[k] < g.scales[k_min]) k_min = k;
  }

  std::array<int, 3> order{k_min, 0, 0};
  int slot = 1;
  for (int k = 0; k < 3; ++k) {
    if (k != k_min) order[slot++] = k;
  }

  FlatGaussian out;
  out.mean = g.mean;
  for (int s = 0; s < 3; ++s) out.rotation.col(s) = g.rotation.col(order[s]);
  if (out.rotation.determinant() < 0.0) out.rotation.col(0) = -out.rotation.col(0);
  out.scales = Vec3(eps, g.scales[order[1]], g.scales[order[2]]);
  out.opacity = g.opacity;
  out.sh = g.sh;
  out.normal = g.normal;
  return out;
}

SoupTriangle gauss_to_triangle(const FlatGaussian& g, std::size_t source_index) {
  SoupTriangle t;
  t.v1 = g.mean;
  t.v2 = g.mean + g.scales[1] * g.rotation.col(1);
  t.v3 = g.mean + g.scales[2] * g.rotation.col(2);
  t.rest_len2 = (t.v2 - t.v1).norm();
  t.rest_len3 = (t.v3 - t.v1).norm();
  t.source_index = source_index;
  t.opacity = g.opacity;
  t.sh = g.sh;
  t.normal = g.normal;
  return t;
}

Vec3 orth_step(const Vec3& w, const Vec3& r1, const Vec3& r2, std::size_t index) {
  const Vec3 residual = w - w.dot(r1) * r1 - w.dot(r2) * r2;
  const double len = residual.norm();
  if (!(len > kDegenerateTolerance)) {
    throw DegenerateError("triangle " + std::to_string(index) +
                              ": edge lies in the span of the frame (degenerate face)",
                          index);
  }
  return residual / len;
}

FlatGaussian triangle_to_gauss(const SoupTriangle& t, double eps) {
  const Vec3 e2 = t.v2 - t.v1;
  const Vec3 e3 = t.v3 - t.v1;
  const double len2 = e2.norm();
  const Vec3 n = e2.cross(e3);
  const double n_len = n.norm();
  // n_len / len2 is the distance of v3 from the line through v1, v2.
  if (!(len2 > kDegenerateTolerance) || !(n_len > kDegenerateTolerance * len2)) {
    throw DegenerateError("triangle " + std::to_string(t.source_index) + ": collinear vertices",
                          t.source_index);
  }

  FlatGaussian g;
  g.mean = t.v1;
  const Vec3 r1 = n / n_len;
  const Vec3 r2 = e2 / len2;
  const Vec3 r3 = orth_step(e3, r1, r2, t.source_index);
  g.rotation.col(0) = r1;
  g.rotation.col(1) = r2;
  g.rotation.col(2) = r3;
  g.scales = Vec3(eps, len2, e3.dot(r3));
  g.opacity = t.opacity;
  g.sh = t.sh;
  g.normal = t.normal;
  return g;
}

FlatGaussian triangle_to_gauss_or(const SoupTriangle& t, double eps, const FlatGaussian& previous,
                                  bool* degenerate) {
  if (degenerate) *degenerate = false;
  try {
    return triangle_to_gauss(t, eps);
  } catch (const DegenerateError&) {
    if (degenerate) *degenerate = true;
    FlatGaussian g;
    g.mean = t.v1;
    g.rotation = previous.rotation;
    const Vec3 e2 = t.v2 - t.v1;
    const Vec3 e3 = t.v3 - t.v1;
    g.scales = Vec3(eps, std::max(e2.norm(), kDegenerateScaleFloor),
                    std::max(std::abs(e3.dot(previous.rotation.col(2))), kDegenerateScaleFloor));
    if (!std::isfinite(g.scales[1])) g.scales[1] = kDegenerateScaleFloor;
    if (!std::isfinite(g.scales[2])) g.scales[2] = kDegenerateScaleFloor;
    g.opacity = t.opacity;
    g.sh = t.sh;
    g.normal = t.normal;
    return g;
  }
}

Mat3 covariance_of(const FlatGaussian& g) {
  const Vec3 s2 = g.scales.cwiseProduct(g.scales);
  Mat3 cov = g.rotation * s2.asDiagonal() * g.rotation.transpose();
  // Symmetrize so cov == cov^T holds exactly, not just to rounding.
  return 0.5 * (cov + cov.transpose());
}

}  // namespace gasp
