#include <doctest.h>

#include "gasp/kernel.hpp"
#include "test_support.hpp"

using namespace gasp;
using namespace gasp::mpm;

namespace {

// Piecewise polynomial definitions, written out independently of the library.
double cubic_ref(double x) {
  const double a = std::abs(x);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
  return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
}

double quadratic_ref(double x) {
  const double a = std::abs(x);
  if (a >= 1.5) return 0.0;
  if (a >= 0.5) return (1.5 - a) * (1.5 - a) / 2.0;
  return 0.75 - a * a;
}

// Weight of absolute node `node` for a particle at xp, 0 outside the stencil.
double node_weight(const Vec3& xp, const Vec3& origin, double h, KernelDegree d, const Eigen::Vector3i& node) {
  const Stencil s = kernel_weights(xp, origin, h, d);
  const Eigen::Vector3i rel = node - s.base;
  for (int a = 0; a < 3; ++a) {
    if (rel[a] < 0 || rel[a] >= s.width) return 0.0;
  }
  return s.weight(rel[0], rel[1], rel[2]);
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("cubic weights at a node are 1/6, 2/3, 1/6") {
  const Vec3 origin(-1, -1, -1);
  const double h = 0.25;
  const Vec3 xp = origin + h * Vec3(5, 6, 7);
  const Stencil s = kernel_weights(xp, origin, h, KernelDegree::cubic);
  CHECK(s.width == 4);
  CHECK(s.base == Eigen::Vector3i(4, 5, 6));
  for (int a = 0; a < 3; ++a) {
    CHECK(s.w[a][0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(s.w[a][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s.w[a][2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(s.w[a][3] == doctest::Approx(0.0));
  }
}

TEST_CASE("1D splines match the reference polynomials") {
  for (double x = -2.5; x <= 2.5; x += 0.0625) {
    CHECK(bspline(KernelDegree::cubic, x) == doctest::Approx(cubic_ref(x)).epsilon(1e-14));
    CHECK(bspline(KernelDegree::quadratic, x) == doctest::Approx(quadratic_ref(x)).epsilon(1e-14));
  }
}

TEST_CASE("partition of unity, zero gradient sum, finite differences") {
  std::mt19937_64 rng(99);
  const Vec3 origin(0.1, -0.2, 0.3);
  const double h = 0.05;
  for (KernelDegree d : {KernelDegree::cubic, KernelDegree::quadratic}) {
    CAPTURE(static_cast<int>(d));
    for (int n = 0; n < 300; ++n) {
      const Vec3 xp = origin + h * Vec3(test::uniform(rng, 3, 20), test::uniform(rng, 3, 20), test::uniform(rng, 3, 20));
      const Stencil s = kernel_weights(xp, origin, h, d);
      double sum = 0.0;
      Vec3 gsum = Vec3::Zero();
      for (int i = 0; i < s.width; ++i)
        for (int j = 0; j < s.width; ++j)
          for (int k = 0; k < s.width; ++k) {
            sum += s.weight(i, j, k);
            gsum += s.gradient(i, j, k);
          }
      CHECK(std::abs(sum - 1.0) < 1e-10);
      CHECK(gsum.norm() * h < 1e-8);

      const double delta = 1e-6 * h;
      for (int i = 0; i < s.width; ++i)
        for (int j = 0; j < s.width; ++j)
          for (int k = 0; k < s.width; ++k) {
            const Eigen::Vector3i node = s.base + Eigen::Vector3i(i, j, k);
            Vec3 fd;
            for (int a = 0; a < 3; ++a) {
              Vec3 e = Vec3::Zero();
              e[a] = delta;
              fd[a] = (node_weight(xp + e, origin, h, d, node) - node_weight(xp - e, origin, h, d, node)) / (2 * delta);
            }
            CHECK((fd - s.gradient(i, j, k)).norm() * h < 1e-5);
          }
    }
  }
}

TEST_CASE("inertia constants") {
  CHECK(inertia_inverse_factor(KernelDegree::cubic) == 3.0);
  CHECK(inertia_inverse_factor(KernelDegree::quadratic) == 4.0);
  // D_p = sum w (x_i - x_p)(x_i - x_p)^T equals h^2/3 (cubic) or h^2/4 (quadratic) times I.
  const double h = 0.1;
  const Vec3 origin = Vec3::Zero();
  const Vec3 xp(0.537, 0.612, 0.481);
  for (KernelDegree d : {KernelDegree::cubic, KernelDegree::quadratic}) {
    const Stencil s = kernel_weights(xp, origin, h, d);
    Mat3 D = Mat3::Zero();
    for (int i = 0; i < s.width; ++i)
      for (int j = 0; j < s.width; ++j)
        for (int k = 0; k < s.width; ++k) {
          const Vec3 dx = origin + h * (s.base + Eigen::Vector3i(i, j, k)).cast<double>() - xp;
          D += s.weight(i, j, k) * dx * dx.transpose();
        }
    CHECK((D * inertia_inverse_factor(d) / (h * h) - Mat3::Identity()).norm() < 1e-12);
  }
}

}  // TEST_SUITE
