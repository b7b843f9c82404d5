#include "gasp/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "gasp/error.hpp"

namespace gasp::mpm {

std::string_view to_string(MaterialKind k) noexcept {
  switch (k) {
    case MaterialKind::elastic: return "elastic";
    case MaterialKind::snow: return "snow";
    case MaterialKind::sand: return "sand";
    case MaterialKind::fluid: return "fluid";
  }
  return "unknown";
}

MaterialKind material_kind_from_string(std::string_view s) {
  if (s == "elastic") return MaterialKind::elastic;
  if (s == "snow") return MaterialKind::snow;
  if (s == "sand") return MaterialKind::sand;
  if (s == "fluid" || s == "water") return MaterialKind::fluid;
  throw ConfigError("unknown material kind '" + std::string(s) +
                    "' (expected elastic, snow, sand or fluid)");
}

double MaterialParams::sound_speed() const noexcept {
  if (kind == MaterialKind::fluid) return std::sqrt(bulk_modulus * gamma / density);
  return std::sqrt(youngs / density);
}

void MaterialParams::validate() const {
  auto fail = [&](const std::string& what) {
    throw ConfigError("material '" + name + "': " + what);
  };
  if (!(density > 0.0)) fail("density must be positive");
  if (!(youngs > 0.0)) fail("youngs modulus must be positive");
  if (!(poisson >= 0.0 && poisson < 0.5)) fail("poisson ratio must lie in [0, 0.5)");
  switch (kind) {
    case MaterialKind::snow:
      if (!(theta_c > 0.0 && theta_c < 1.0)) fail("theta_c must lie in (0, 1)");
      if (!(theta_s > 0.0)) fail("theta_s must be positive");
      if (!(hardening >= 0.0)) fail("hardening must be non-negative");
      break;
    case MaterialKind::sand:
      if (!(friction_angle > 0.0 && friction_angle < 90.0))
        fail("friction_angle must lie in (0, 90) degrees");
      break;
    case MaterialKind::fluid:
      if (!(bulk_modulus > 0.0)) fail("bulk_modulus must be positive");
      if (!(gamma >= 1.0)) fail("gamma must be at least 1");
      break;
    case MaterialKind::elastic: break;
  }
}

Lame effective_lame(const MaterialParams& mat, double plastic_state) noexcept {
  Lame l{mat.mu(), mat.lambda()};
  if (mat.kind == MaterialKind::snow) {
    const double e = std::exp(mat.hardening * (1.0 - plastic_state));
    l.mu *= e;
    l.lambda *= e;
  }
  return l;
}

Svd3 svd_rotation_variant(const Mat3& F) {
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Svd3 out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (out.U.determinant() < 0.0) {
    out.U.col(2) = -out.U.col(2);
    out.sigma[2] = -out.sigma[2];
  }
  if (out.V.determinant() < 0.0) {
    out.V.col(2) = -out.V.col(2);
    out.sigma[2] = -out.sigma[2];
  }
  return out;
}

Mat3 polar_rotation(const Mat3& F) {
  const Svd3 s = svd_rotation_variant(F);
  return s.U * s.V.transpose();
}

double drucker_prager_alpha(double friction_angle_deg) noexcept {
  const double sin_phi = std::sin(friction_angle_deg * std::numbers::pi / 180.0);
  return std::sqrt(2.0 / 3.0) * 2.0 * sin_phi / (3.0 - sin_phi);
}

double drucker_prager_yield(const Vec3& log_sigma, const MaterialParams& mat) noexcept {
  const double mu = mat.mu();
  const double lambda = mat.lambda();
  const double tr = log_sigma.sum();
  const Vec3 dev = log_sigma - Vec3::Constant(tr / 3.0);
  return dev.norm() + (3.0 * lambda + 2.0 * mu) / (2.0 * mu) * tr * drucker_prager_alpha(mat.friction_angle);
}

namespace {

bool all_finite(const Mat3& m) { return m.allFinite(); }

// Psi(J) for the weakly compressible fluid with Psi(1) = 0 and
// dPsi/dJ = -kappa (J^-gamma - 1).
double fluid_energy(double J, const MaterialParams& mat) {
  const double k = mat.bulk_modulus;
  if (mat.gamma == 1.0) return -k * (std::log(J) - J + 1.0);
  const double g = mat.gamma;
  return -k * ((std::pow(J, 1.0 - g) - 1.0) / (1.0 - g) - (J - 1.0));
}

double fluid_pressure(double J, const MaterialParams& mat) {
  return mat.bulk_modulus * (std::pow(J, -mat.gamma) - 1.0);
}

}  // namespace

double energy_density(const Mat3& F, double plastic_state, const MaterialParams& mat) {
  switch (mat.kind) {
    case MaterialKind::elastic:
    case MaterialKind::snow: {
      const Lame l = effective_lame(mat, plastic_state);
      const Mat3 R = polar_rotation(F);
      const double J = F.determinant();
      return l.mu * (F - R).squaredNorm() + 0.5 * l.lambda * (J - 1.0) * (J - 1.0);
    }
    case MaterialKind::sand: {
      const Svd3 s = svd_rotation_variant(F);
      const Vec3 e = s.sigma.array().log();
      const double tr = e.sum();
      return mat.mu() * e.squaredNorm() + 0.5 * mat.lambda() * tr * tr;
    }
    case MaterialKind::fluid: return fluid_energy(F.determinant(), mat);
  }
  return 0.0;
}

Mat3 first_piola(const Mat3& F, double plastic_state, const MaterialParams& mat) {
  switch (mat.kind) {
    case MaterialKind::elastic:
    case MaterialKind::snow: {
      const Lame l = effective_lame(mat, plastic_state);
      const Mat3 R = polar_rotation(F);
      const double J = F.determinant();
      // J F^{-T} is the cofactor matrix; computing it directly avoids the inverse.
      Mat3 cof;
      cof.col(0) = F.col(1).cross(F.col(2));
      cof.col(1) = F.col(2).cross(F.col(0));
      cof.col(2) = F.col(0).cross(F.col(1));
      return 2.0 * l.mu * (F - R) + l.lambda * (J - 1.0) * cof;
    }
    case MaterialKind::sand: {
      const Svd3 s = svd_rotation_variant(F);
      const Vec3 e = s.sigma.array().log();
      const double tr = e.sum();
      Vec3 d;
      for (int i = 0; i < 3; ++i) d[i] = (2.0 * mat.mu() * e[i] + mat.lambda() * tr) / s.sigma[i];
      return s.U * d.asDiagonal() * s.V.transpose();
    }
    case MaterialKind::fluid: {
      const double J = F.determinant();
      Mat3 cof;
      cof.col(0) = F.col(1).cross(F.col(2));
      cof.col(1) = F.col(2).cross(F.col(0));
      cof.col(2) = F.col(0).cross(F.col(1));
      return -fluid_pressure(J, mat) * cof;
    }
  }
  return Mat3::Zero();
}

Mat3 kirchhoff_stress(const Mat3& F, double plastic_state, const MaterialParams& mat) {
  if (mat.kind == MaterialKind::fluid) {
    const double J = F.determinant();
    return -fluid_pressure(J, mat) * J * Mat3::Identity();
  }
  if (mat.kind == MaterialKind::elastic || mat.kind == MaterialKind::snow) {
    // 2 mu (F - R) F^T + lambda (J - 1) J I
    const Lame l = effective_lame(mat, plastic_state);
    const Mat3 R = polar_rotation(F);
    const double J = F.determinant();
    return 2.0 * l.mu * (F - R) * F.transpose() + Mat3::Identity() * (l.lambda * (J - 1.0) * J);
  }
  return first_piola(F, plastic_state, mat) * F.transpose();
}

Mat3 cauchy_stress(const Mat3& F, double plastic_state, const MaterialParams& mat) {
  if (!all_finite(F) || !std::isfinite(plastic_state)) {
    throw NumericalBlowup("non-finite deformation gradient", -1, 0);
  }
  const double J = F.determinant();
  Mat3 sigma = kirchhoff_stress(F, plastic_state, mat) / J;
  return 0.5 * (sigma + sigma.transpose());
}

PlasticResult plastic_project(const Mat3& F_trial, double plastic_state, const MaterialParams& mat) {
  if (!all_finite(F_trial) || !std::isfinite(plastic_state)) {
    throw NumericalBlowup("non-finite trial deformation gradient", -1, 0);
  }
  switch (mat.kind) {
    case MaterialKind::elastic: return {F_trial, plastic_state};

    case MaterialKind::snow: {
      Svd3 s = svd_rotation_variant(F_trial);
      const double J_trial = s.sigma.prod();
      for (int i = 0; i < 3; ++i) {
        s.sigma[i] = std::clamp(s.sigma[i], 1.0 - mat.theta_c, 1.0 + mat.theta_s);
      }
      const double J_new = s.sigma.prod();
      return {s.U * s.sigma.asDiagonal() * s.V.transpose(), plastic_state * J_trial / J_new};
    }

    case MaterialKind::sand: {
      // plastic_state holds the accumulated log-volume correction.
      const Svd3 s = svd_rotation_variant(F_trial);
      const Vec3 eps = s.sigma.array().log() + plastic_state / 3.0;
      const double tr = eps.sum();
      if (tr >= 0.0) {
        // Expansion: no cohesion, project to the cone tip.
        return {s.U * s.V.transpose(), tr};
      }
      const Vec3 dev = eps - Vec3::Constant(tr / 3.0);
      const double dev_norm = dev.norm();
      const double mu = mat.mu();
      const double lambda = mat.lambda();
      const double dgamma =
          dev_norm + (3.0 * lambda + 2.0 * mu) / (2.0 * mu) * tr * drucker_prager_alpha(mat.friction_angle);
      if (dgamma <= 0.0) {
        if (plastic_state == 0.0) return {F_trial, 0.0};
        const Vec3 sig = eps.array().exp();
        return {s.U * sig.asDiagonal() * s.V.transpose(), 0.0};
      }
      const Vec3 projected = eps - (dgamma / dev_norm) * dev;
      const Vec3 sig = projected.array().exp();
      return {s.U * sig.asDiagonal() * s.V.transpose(), 0.0};
    }

    case MaterialKind::fluid: {
      const double J = F_trial.determinant();
      return {Mat3::Identity() * std::cbrt(J), plastic_state};
    }
  }
  return {F_trial, plastic_state};
}

}  // namespace gasp::mpm
