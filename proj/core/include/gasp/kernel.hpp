#pragma once

#include <array>

#include <Eigen/Core>

namespace gasp::mpm {

enum class KernelDegree { quadratic = 2, cubic = 3 };

/// Number of grid nodes touched per axis.
constexpr int support(KernelDegree d) noexcept { return d == KernelDegree::cubic ? 4 : 3; }

/// Inverse of the MLS moment matrix D_p: 4/h^2 for quadratic, 3/h^2 for cubic.
constexpr double inertia_inverse_factor(KernelDegree d) noexcept {
  return d == KernelDegree::cubic ? 3.0 : 4.0;
}

/// One-dimensional B-spline and its derivative, argument in cell units.
double bspline(KernelDegree d, double x) noexcept;
double bspline_derivative(KernelDegree d, double x) noexcept;

/// Tensor-product stencil around one particle. Weights are per axis; the
/// node weight is w[0][i] * w[1][j] * w[2][k]. Gradients are in world units.
struct Stencil {
  Eigen::Vector3i base = Eigen::Vector3i::Zero();
  int width = 4;
  std::array<std::array<double, 4>, 3> w{};
  std::array<std::array<double, 4>, 3> dw{};

  double weight(int i, int j, int k) const noexcept { return w[0][i] * w[1][j] * w[2][k]; }
  Eigen::Vector3d gradient(int i, int j, int k) const noexcept {
    return {dw[0][i] * w[1][j] * w[2][k], w[0][i] * dw[1][j] * w[2][k],
            w[0][i] * w[1][j] * dw[2][k]};
  }
};

/// Stencil for a particle at `xp` on a grid with the given origin and cell
/// size. Does not check bounds; see SimGrid::in_safe_domain.
Stencil kernel_weights(const Eigen::Vector3d& xp, const Eigen::Vector3d& origin, double h,
                       KernelDegree degree);

}  // namespace gasp::mpm
