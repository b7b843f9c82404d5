#include <doctest.h>

#include "gasp/correction.hpp"
#include "gasp/error.hpp"
#include "test_support.hpp"

using namespace gasp;

namespace {

SoupTriangle deform_randomly(const SoupTriangle& rest, std::mt19937_64& rng, double spread) {
  auto jitter = [&] {
    return Vec3(test::uniform(rng, -spread, spread), test::uniform(rng, -spread, spread),
                test::uniform(rng, -spread, spread));
  };
  return rest.moved(rest.v1 + jitter(), rest.v2 + jitter(), rest.v3 + jitter());
}

}  // namespace

TEST_SUITE("correction") {

TEST_CASE("alpha must exceed one") {
  CorrectionConfig c;
  CHECK(c.alpha == 2.0);
  CHECK(c.enabled);
  CHECK_NOTHROW(c.validate());
  c.alpha = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("stretched edge is clipped to alpha times rest length") {
  SoupTriangle t;
  t.v1 = Vec3::Zero();
  t.v2 = Vec3(0, 1, 0);
  t.v3 = Vec3(0, 0, 1);
  t.rest_len2 = 1.0;
  t.rest_len3 = 1.0;
  const SoupTriangle d = t.moved(Vec3::Zero(), Vec3(0, 3, 0), Vec3(0, 0, 1));
  const FlatGaussian g = apply_scale_clip(d, CorrectionConfig{2.0, true});
  CHECK(g.scales[1] == 2.0);
  CHECK(g.scales[2] == doctest::Approx(1.0));
  const FlatGaussian plain = triangle_to_gauss(d);
  CHECK(g.mean == plain.mean);
  CHECK(g.rotation == plain.rotation);
}

TEST_CASE("below the threshold the correction is a no-op") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const SoupTriangle rest = gauss_to_triangle(test::random_flat_gaussian(rng), i);
    const SoupTriangle d = deform_randomly(rest, rng, 0.05 * std::min(rest.rest_len2, rest.rest_len3));
    const FlatGaussian a = apply_scale_clip(d, CorrectionConfig{2.0, true});
    const FlatGaussian b = triangle_to_gauss(d);
    CHECK(a.scales == b.scales);
    CHECK(a.rotation == b.rotation);
    CHECK(a.mean == b.mean);
  }
}

TEST_CASE("random deformations respect the bound, idempotently and monotonically") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const SoupTriangle rest = gauss_to_triangle(test::random_flat_gaussian(rng), i);
    const SoupTriangle d = deform_randomly(rest, rng, 3.0);
    const CorrectionConfig cfg{2.0, true};
    FlatGaussian g = apply_scale_clip(d, cfg);
    CHECK(g.scales[1] <= cfg.alpha * rest.rest_len2 + 1e-9);
    CHECK(g.scales[2] <= cfg.alpha * rest.rest_len3 + 1e-9);

    FlatGaussian again = g;
    clip_scales(again, d, cfg);
    CHECK(again.scales == g.scales);

    const FlatGaussian wider = apply_scale_clip(d, CorrectionConfig{3.0, true});
    CHECK(wider.scales[1] >= g.scales[1]);
    CHECK(wider.scales[2] >= g.scales[2]);
  }
}

TEST_CASE("disabled correction returns the plain reconstruction") {
  SoupTriangle t;
  t.v1 = Vec3::Zero();
  t.v2 = Vec3(0, 5, 0);
  t.v3 = Vec3(0, 0, 1);
  t.rest_len2 = 1.0;
  t.rest_len3 = 1.0;
  const FlatGaussian g = apply_scale_clip(t, CorrectionConfig{2.0, false});
  CHECK(g.scales[1] == doctest::Approx(5.0));
}

TEST_CASE("degenerate faces follow the fallback policy") {
  SoupTriangle t;
  t.v1 = Vec3::Zero();
  t.v2 = Vec3(1, 0, 0);
  t.v3 = Vec3(2, 0, 0);
  t.rest_len2 = 0.1;
  t.rest_len3 = 0.1;
  CHECK_THROWS_AS(apply_scale_clip(t, CorrectionConfig{}), DegenerateError);
  FlatGaussian prev;
  const FlatGaussian g = apply_scale_clip_or(t, CorrectionConfig{}, 1e-6, prev);
  CHECK(g.rotation == prev.rotation);
  CHECK(g.scales[1] == doctest::Approx(0.2));
  CHECK(g.scales[2] == kDegenerateScaleFloor);
}

TEST_CASE("clipping never enlarges a sheared scale") {
  // e3 = (0, 4, 0.1): residual s3 = 0.1 while |v3 - v1| > alpha * rest.
  SoupTriangle t;
  t.v1 = Vec3::Zero();
  t.v2 = Vec3(0, 1, 0);
  t.v3 = Vec3(0, 4, 0.1);
  t.rest_len2 = 1.0;
  t.rest_len3 = 1.0;
  const FlatGaussian g = apply_scale_clip(t, CorrectionConfig{2.0, true});
  CHECK(g.scales[2] == doctest::Approx(0.1));
}

}  // TEST_SUITE
