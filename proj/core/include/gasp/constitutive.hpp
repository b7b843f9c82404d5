#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gasp::mpm {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class MaterialKind { elastic, snow, sand, fluid };

std::string_view to_string(MaterialKind k) noexcept;
/// Throws ConfigError on an unknown name.
MaterialKind material_kind_from_string(std::string_view s);

struct MaterialParams {
  std::string name;
  MaterialKind kind = MaterialKind::elastic;
  double density = 1000.0;
  double youngs = 1e4;
  double poisson = 0.3;

  // snow
  double theta_c = 2.5e-2;
  double theta_s = 7.5e-3;
  double hardening = 10.0;

  // sand, degrees
  double friction_angle = 30.0;

  // fluid
  double bulk_modulus = 1e4;
  double gamma = 7.0;

  double mu() const noexcept { return youngs / (2.0 * (1.0 + poisson)); }
  double lambda() const noexcept {
    return youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  }
  /// Elastic wave speed estimate used by the CFL bound.
  double sound_speed() const noexcept;

  /// Throws ConfigError naming the material when a bound is violated.
  void validate() const;
};

/// Lame parameters after snow hardening; other kinds return the base values.
struct Lame {
  double mu;
  double lambda;
};
Lame effective_lame(const MaterialParams& mat, double plastic_state) noexcept;

/// Strain energy density Psi(F_E).
double energy_density(const Mat3& F, double plastic_state, const MaterialParams& mat);

/// dPsi/dF_E.
Mat3 first_piola(const Mat3& F, double plastic_state, const MaterialParams& mat);

/// P F^T, the stress measure fed to the MLS force transfer (= J sigma).
Mat3 kirchhoff_stress(const Mat3& F, double plastic_state, const MaterialParams& mat);

/// sigma = (1/J) P F^T with J = det(F_E). Throws NumericalBlowup on
/// non-finite input.
Mat3 cauchy_stress(const Mat3& F, double plastic_state, const MaterialParams& mat);

struct PlasticResult {
  Mat3 F;
  double plastic_state;
};

/// Returns the trial elastic gradient projected onto the admissible set.
PlasticResult plastic_project(const Mat3& F_trial, double plastic_state, const MaterialParams& mat);

/// Drucker-Prager cone coefficient sqrt(2/3) * 2 sin(phi) / (3 - sin(phi)).
double drucker_prager_alpha(double friction_angle_deg) noexcept;

/// Yield function on log singular values: ||dev(eps)|| + (3l+2m)/(2m) tr(eps) alpha.
/// Non-positive inside the cone.
double drucker_prager_yield(const Vec3& log_sigma, const MaterialParams& mat) noexcept;

/// Polar rotation of F via SVD with reflections folded into the last
/// singular vector so det(R) = +1.
Mat3 polar_rotation(const Mat3& F);

/// SVD with U, V proper rotations; sigma may carry a negative last entry.
struct Svd3 {
  Mat3 U;
  Vec3 sigma;
  Mat3 V;
};
Svd3 svd_rotation_variant(const Mat3& F);

}  // namespace gasp::mpm
