#include "gasp/kernel.hpp"

#include <cmath>

namespace gasp::mpm {

double bspline(KernelDegree d, double x) noexcept {
  const double a = std::abs(x);
  if (d == KernelDegree::cubic) {
    if (a < 1.0) return 0.5 * a * a * a - a * a + 2.0 / 3.0;
    if (a < 2.0) {
      const double b = 2.0 - a;
      return b * b * b / 6.0;
    }
    return 0.0;
  }
  if (a < 0.5) return 0.75 - a * a;
  if (a < 1.5) {
    const double b = 1.5 - a;
    return 0.5 * b * b;
  }
  return 0.0;
}

double bspline_derivative(KernelDegree d, double x) noexcept {
  const double a = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (d == KernelDegree::cubic) {
    if (a < 1.0) return sign * (1.5 * a * a - 2.0 * a);
    if (a < 2.0) {
      const double b = 2.0 - a;
      return -sign * 0.5 * b * b;
    }
    return 0.0;
  }
  if (a < 0.5) return -2.0 * x;
  if (a < 1.5) return -sign * (1.5 - a);
  return 0.0;
}

Stencil kernel_weights(const Eigen::Vector3d& xp, const Eigen::Vector3d& origin, double h,
                       KernelDegree degree) {
  Stencil s;
  s.width = support(degree);
  const double shift = degree == KernelDegree::cubic ? 1.0 : 0.5;
  const double inv_h = 1.0 / h;
  for (int a = 0; a < 3; ++a) {
    const double u = (xp[a] - origin[a]) * inv_h;
    const int base = static_cast<int>(std::floor(u - shift));
    s.base[a] = base;
    for (int i = 0; i < s.width; ++i) {
      const double x = u - static_cast<double>(base + i);
      s.w[a][i] = bspline(degree, x);
      s.dw[a][i] = bspline_derivative(degree, x) * inv_h;
    }
  }
  return s;
}

}  // namespace gasp::mpm
