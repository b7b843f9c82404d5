#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Default thickness assigned to the flat axis of every Gaussian (world units).
inline constexpr double kDefaultFlatness = 1e-6;

/// Spherical-harmonic color. Stored as float32 so coefficients survive
/// read/write cycles bit for bit; only the degree-0 term is ever interpreted.
struct ShCoeffs {
  std::array<float, 3> dc{0.0f, 0.0f, 0.0f};
  std::vector<float> rest;  // f_rest_* in file order, untouched

  bool operator==(const ShCoeffs&) const = default;
};

/// A 3D Gaussian with unconstrained scales, as stored by standard splatting
/// checkpoints. Input to flatten().
struct Gaussian {
  Vec3 mean = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 scales = Vec3::Ones();
  double opacity = 1.0;
  ShCoeffs sh;
  std::array<float, 3> normal{0.0f, 0.0f, 0.0f};
};

/// Gaussian whose first scale is pinned to the flatness constant. Column k of
/// `rotation` is the axis scaled by `scales[k]`; column 0 is the disc normal.
struct FlatGaussian {
  Vec3 mean = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 scales{kDefaultFlatness, 1.0, 1.0};
  double opacity = 1.0;
  ShCoeffs sh;
  std::array<float, 3> normal{0.0f, 0.0f, 0.0f};  // carried through I/O only
};

/// Triangle-soup face [v1, v2, v3] with the edge lengths it was bound with.
struct SoupTriangle {
  Vec3 v1 = Vec3::Zero();
  Vec3 v2 = Vec3::Zero();
  Vec3 v3 = Vec3::Zero();
  double rest_len2 = 0.0;
  double rest_len3 = 0.0;
  std::size_t source_index = 0;
  double opacity = 1.0;
  ShCoeffs sh;
  std::array<float, 3> normal{0.0f, 0.0f, 0.0f};

  /// Same face with new vertex positions; rest lengths and attributes kept.
  SoupTriangle moved(const Vec3& a, const Vec3& b, const Vec3& c) const;
};

struct SceneMetadata {
  std::string source;
  double flatness = kDefaultFlatness;
  int sh_degree = 0;
  bool input_was_flat = false;
};

/// Ordered Gaussians. The position in `gaussians` is the source index used by
/// the triangle soup.
struct GaussianScene {
  std::vector<FlatGaussian> gaussians;
  SceneMetadata metadata;

  std::size_t size() const noexcept { return gaussians.size(); }
};

/// Pins the smallest axis to `eps`, moving it into slot 0. Ties pick the lowest
/// axis. Remaining axes keep their relative order; the normal column is negated
/// when the permutation would flip handedness. Throws DegenerateError if two or
/// more scales are at or below machine epsilon.
FlatGaussian flatten(const Gaussian& g, double eps = kDefaultFlatness, std::size_t index = 0);

SoupTriangle gauss_to_triangle(const FlatGaussian& g, std::size_t source_index = 0);

/// normalize(w - <w,r1> r1 - <w,r2> r2). Throws DegenerateError when the
/// residual is within 1e-9 of zero.
Vec3 orth_step(const Vec3& w, const Vec3& r1, const Vec3& r2, std::size_t index = 0);

/// Inverse parametrization. Throws DegenerateError naming the source index for
/// collinear faces.
FlatGaussian triangle_to_gauss(const SoupTriangle& t, double eps = kDefaultFlatness);

/// Inverse parametrization that never throws: a collinear face keeps the
/// rotation of `previous` and its in-plane scales are floored at 1e-8.
FlatGaussian triangle_to_gauss_or(const SoupTriangle& t, double eps, const FlatGaussian& previous,
                                  bool* degenerate = nullptr);

Mat3 covariance_of(const FlatGaussian& g);

inline constexpr double kDegenerateTolerance = 1e-9;
inline constexpr double kDegenerateScaleFloor = 1e-8;

}  // namespace gasp
