#include <doctest.h>

#include <Eigen/SVD>

#include "gasp/constitutive.hpp"
#include "gasp/error.hpp"
#include "gasp/solver.hpp"
#include "test_support.hpp"

using namespace gasp;
using namespace gasp::mpm;

namespace {

MaterialParams material(MaterialKind k) {
  MaterialParams m;
  m.name = std::string(to_string(k));
  m.kind = k;
  m.youngs = 1e4;
  m.poisson = 0.3;
  return m;
}

Vec3 singular_values(const Mat3& F) { return Eigen::JacobiSVD<Mat3>(F).singularValues(); }

// ||dev e|| + (3 lambda + 2 mu)/(2 mu) * tr(e) * alpha, with
// alpha = sqrt(2/3) * 2 sin(phi) / (3 - sin(phi)).
double cone(const Vec3& e, const MaterialParams& m) {
  const double E = m.youngs, nu = m.poisson;
  const double mu = E / (2 * (1 + nu));
  const double la = E * nu / ((1 + nu) * (1 - 2 * nu));
  const double s = std::sin(m.friction_angle * M_PI / 180.0);
  const double alpha = std::sqrt(2.0 / 3.0) * 2 * s / (3 - s);
  const double tr = e.sum();
  return (e - Vec3::Constant(tr / 3)).norm() + (3 * la + 2 * mu) / (2 * mu) * tr * alpha;
}

}  // namespace

TEST_SUITE("constitutive") {

TEST_CASE("first Piola matches finite differences of the energy") {
  std::mt19937_64 rng(17);
  for (MaterialKind k : {MaterialKind::elastic, MaterialKind::snow, MaterialKind::sand, MaterialKind::fluid}) {
    const MaterialParams m = material(k);
    CAPTURE(m.name);
    for (int n = 0; n < 100; ++n) {
      Mat3 A;
      for (int i = 0; i < 9; ++i) A.data()[i] = test::uniform(rng, -1, 1);
      const Mat3 F = Mat3::Identity() + 1e-3 * A / A.norm() * test::uniform(rng, 0.2, 1.0);
      const double state = k == MaterialKind::snow ? test::uniform(rng, 0.95, 1.05) : initial_plastic_state(k);
      const Mat3 P = first_piola(F, state, m);
      Mat3 fd;
      const double h = 1e-7;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mat3 Fp = F, Fm = F;
          Fp(i, j) += h;
          Fm(i, j) -= h;
          fd(i, j) = (energy_density(Fp, state, m) - energy_density(Fm, state, m)) / (2 * h);
        }
      CHECK((fd - P).norm() <= 1e-4 * P.norm());
    }
  }
}

TEST_CASE("rest state is stress free") {
  for (MaterialKind k : {MaterialKind::elastic, MaterialKind::snow, MaterialKind::sand, MaterialKind::fluid}) {
    const Mat3 s = cauchy_stress(Mat3::Identity(), initial_plastic_state(k), material(k));
    CHECK(s.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("uniform stretch closed form") {
  // F = 1.1 I: R = I, J = 1.331. Kirchhoff = (2 mu (0.1)(1.1) + lambda (J - 1) J) I,
  // Cauchy = Kirchhoff / J.
  const MaterialParams m = material(MaterialKind::elastic);
  const Mat3 F = 1.1 * Mat3::Identity();
  const double J = 1.331;
  const double mu_part = 2.0 * m.mu() * 0.1 * 1.1;
  const Mat3 tau = kirchhoff_stress(F, 1.0, m);
  const Mat3 sigma = cauchy_stress(F, 1.0, m);
  const double lambda_tau = (tau(0, 0) - mu_part) / m.lambda();
  const double lambda_sigma = (sigma(0, 0) - mu_part / J) / m.lambda();
  CHECK(lambda_tau == doctest::Approx((J - 1.0) * J).epsilon(1e-12));
  CHECK(lambda_tau == doctest::Approx(0.4406).epsilon(1e-3));
  CHECK(lambda_sigma == doctest::Approx(J - 1.0).epsilon(1e-12));
  CHECK(std::abs(sigma(0, 1)) < 1e-12);
  CHECK(sigma(1, 1) == doctest::Approx(sigma(0, 0)));
}

TEST_CASE("rigid rotation produces no stress") {
  std::mt19937_64 rng(4);
  for (MaterialKind k : {MaterialKind::elastic, MaterialKind::snow, MaterialKind::sand}) {
    const MaterialParams m = material(k);
    for (int n = 0; n < 20; ++n) {
      const Mat3 Q = test::random_rotation(rng);
      CHECK(cauchy_stress(Q, initial_plastic_state(k), m).norm() <= 1e-6 * m.youngs);
    }
  }
}

TEST_CASE("Cauchy stress is symmetric") {
  std::mt19937_64 rng(21);
  for (MaterialKind k : {MaterialKind::elastic, MaterialKind::snow, MaterialKind::sand, MaterialKind::fluid}) {
    for (int n = 0; n < 20; ++n) {
      Mat3 A;
      for (int i = 0; i < 9; ++i) A.data()[i] = test::uniform(rng, -0.2, 0.2);
      const Mat3 s = cauchy_stress(Mat3::Identity() + A, initial_plastic_state(k), material(k));
      CHECK((s - s.transpose()).norm() <= 1e-6 * s.norm());
    }
  }
}

TEST_CASE("snow hardening scales the Lame parameters") {
  MaterialParams m = material(MaterialKind::snow);
  const Lame l = effective_lame(m, 0.9);
  CHECK(l.mu == doctest::Approx(m.mu() * std::exp(10.0 * 0.1)));
  CHECK(l.lambda == doctest::Approx(m.lambda() * std::exp(10.0 * 0.1)));
  const Lame e = effective_lame(material(MaterialKind::elastic), 0.5);
  CHECK(e.mu == m.mu());
}

TEST_CASE("non-finite input raises NumericalBlowup") {
  Mat3 F = Mat3::Identity();
  F(1, 2) = std::nan("");
  CHECK_THROWS_AS(cauchy_stress(F, 1.0, material(MaterialKind::elastic)), NumericalBlowup);
  CHECK_THROWS_AS(plastic_project(F, 1.0, material(MaterialKind::snow)), NumericalBlowup);
}

TEST_CASE("elastic projection is the identity") {
  std::mt19937_64 rng(1);
  const Mat3 F = Mat3::Identity() + 0.3 * test::random_rotation(rng);
  const PlasticResult r = plastic_project(F, 1.0, material(MaterialKind::elastic));
  CHECK(r.F == F);
  CHECK(r.plastic_state == 1.0);
}

TEST_CASE("snow clamps singular values and preserves total volume") {
  std::mt19937_64 rng(6);
  MaterialParams m = material(MaterialKind::snow);
  m.theta_c = 0.025;
  m.theta_s = 0.0075;
  const Mat3 U = test::random_rotation(rng);
  const Mat3 V = test::random_rotation(rng);
  const Mat3 F = U * Vec3(1.2, 1.0, 0.9).asDiagonal() * V.transpose();
  const PlasticResult r = plastic_project(F, 1.0, m);
  const Vec3 s = singular_values(r.F);
  CHECK(s[0] == doctest::Approx(1.0075).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(0.975).epsilon(1e-12));
  // det(F_E) * J_p is the total volume change before and after.
  CHECK(r.F.determinant() * r.plastic_state == doctest::Approx(F.determinant()).epsilon(1e-12));
}

TEST_CASE("sand return mapping") {
  std::mt19937_64 rng(12);
  const MaterialParams m = material(MaterialKind::sand);
  int inside = 0, outside = 0;
  for (int n = 0; n < 500; ++n) {
    const Vec3 e(test::uniform(rng, -0.05, 0.01), test::uniform(rng, -0.05, 0.01), test::uniform(rng, -0.05, 0.01));
    const Mat3 U = test::random_rotation(rng);
    const Mat3 V = test::random_rotation(rng);
    const Mat3 F = U * e.array().exp().matrix().asDiagonal() * V.transpose();
    const PlasticResult r = plastic_project(F, 0.0, m);
    if (e.sum() >= 0.0) {
      // Expansion goes to the tip: zero strain.
      CHECK((singular_values(r.F) - Vec3::Ones()).norm() < 1e-10);
      continue;
    }
    if (cone(e, m) <= 0.0) {
      ++inside;
      CHECK(r.F == F);
      CHECK(r.plastic_state == 0.0);
    } else {
      ++outside;
      const Vec3 proj = singular_values(r.F).array().log();
      CHECK(std::abs(cone(proj, m)) < 1e-8);
      CHECK(proj.sum() == doctest::Approx(e.sum()).epsilon(1e-9));
    }
  }
  CHECK(inside > 10);
  CHECK(outside > 10);
}

TEST_CASE("fluid projection keeps only volume") {
  const Mat3 F = Vec3(1.1, 0.9, 1.05).asDiagonal();
  const PlasticResult r = plastic_project(F, 1.0, material(MaterialKind::fluid));
  const double c = std::cbrt(1.1 * 0.9 * 1.05);
  CHECK((r.F - c * Mat3::Identity()).norm() < 1e-14);
}

TEST_CASE("fluid pressure follows the Tait law") {
  MaterialParams m = material(MaterialKind::fluid);
  const double J = 0.9;
  const Mat3 F = std::cbrt(J) * Mat3::Identity();
  const Mat3 s = cauchy_stress(F, 1.0, m);
  const double expected = -m.bulk_modulus * (std::pow(1.0 / J, m.gamma) - 1.0);
  CHECK(s(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(s(1, 1) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("material validation") {
  MaterialParams m = material(MaterialKind::elastic);
  m.poisson = 0.5;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.poisson = 0.3;
  m.youngs = -1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  CHECK_THROWS_AS(material_kind_from_string("jelly"), ConfigError);
  CHECK(material_kind_from_string("water") == MaterialKind::fluid);
  const MaterialParams mm = material(MaterialKind::elastic);
  CHECK(mm.mu() == doctest::Approx(1e4 / 2.6));
  CHECK(mm.lambda() == doctest::Approx(1e4 * 0.3 / (1.3 * 0.4)));
}

}  // TEST_SUITE
