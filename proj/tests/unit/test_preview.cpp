#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "gasp/error.hpp"
#include "gasp/preview.hpp"
#include "gasp/synth.hpp"
#include "test_support.hpp"

using namespace gasp;
using preview::PreviewCamera;

namespace {

PreviewCamera small_camera() {
  PreviewCamera c;
  c.position = Vec3(0, -3, 0);
  c.look_at = Vec3::Zero();
  c.width = 64;
  c.height = 48;
  return c;
}

// Disc facing the camera (normal along y), colored by its degree-0 term.
FlatGaussian facing_disc(const Vec3& mean, double radius, float dc_red, float dc_green) {
  FlatGaussian g;
  g.mean = mean;
  g.rotation.col(0) = Vec3::UnitY();
  g.rotation.col(1) = Vec3::UnitX();
  g.rotation.col(2) = Vec3::UnitZ();
  g.rotation.col(2) = -g.rotation.col(2);  // keep det = +1
  g.scales = Vec3(1e-6, radius, radius);
  g.opacity = 0.95;
  g.sh.dc = {dc_red, dc_green, 0.0f};
  return g;
}

int brightness(const std::array<std::uint8_t, 3>& p) { return p[0] + p[1] + p[2]; }

}  // namespace

TEST_SUITE("preview") {

TEST_CASE("empty scene renders the background") {
  PreviewCamera cam = small_camera();
  cam.background = {0.2, 0.4, 1.0};
  const preview::Image img = preview::render_preview(GaussianScene{}, cam);
  REQUIRE(img.rgb.size() == 64u * 48u * 3u);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto p = img.at(x, y);
      CHECK(p[0] == 51);
      CHECK(p[1] == 102);
      CHECK(p[2] == 255);
    }
}

TEST_CASE("on-axis splat peaks at the image center") {
  GaussianScene s;
  s.gaussians.push_back(facing_disc(Vec3::Zero(), 0.1, 1.5f, 1.5f));
  const preview::Image img = preview::render_preview(s, small_camera());
  int best = -1, bx = 0, by = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (brightness(img.at(x, y)) > best) {
        best = brightness(img.at(x, y));
        bx = x;
        by = y;
      }
  CHECK(std::abs(bx - img.width / 2) <= 1);
  CHECK(std::abs(by - img.height / 2) <= 1);
  CHECK(brightness(img.at(0, 0)) == 0);
}

TEST_CASE("nearer splat covers the farther one") {
  const PreviewCamera cam = small_camera();
  GaussianScene s;
  s.gaussians.push_back(facing_disc(Vec3(0, 1, 0), 0.3, 3.0f, -3.0f));   // far, red
  s.gaussians.push_back(facing_disc(Vec3(0, -1, 0), 0.3, -3.0f, 3.0f));  // near, green
  const auto p = preview::render_preview(s, cam).at(32, 24);
  CHECK(p[1] > 200);
  CHECK(p[0] < 30);
}

TEST_CASE("output does not depend on input order and is deterministic") {
  GaussianScene s = synth::blob(300, 0.8, 21);
  const PreviewCamera cam = small_camera();
  const preview::Image a = preview::render_preview(s, cam);
  const preview::Image again = preview::render_preview(s, cam);
  CHECK(a.rgb == again.rgb);
  std::mt19937_64 rng(5);
  std::shuffle(s.gaussians.begin(), s.gaussians.end(), rng);
  CHECK(preview::render_preview(s, cam).rgb == a.rgb);
}

TEST_CASE("splats behind the camera are culled") {
  GaussianScene s;
  s.gaussians.push_back(facing_disc(Vec3(0, -4, 0), 0.5, 3.0f, 3.0f));
  const preview::Image img = preview::render_preview(s, small_camera());
  CHECK(std::all_of(img.rgb.begin(), img.rgb.end(), [](std::uint8_t v) { return v == 0; }));
}

TEST_CASE("camera table parsing and validation") {
  const PreviewCamera c = preview::parse_camera_config(
      "[camera]\nposition = [1, 2, 3]\nfov = 60\nwidth = 32\nheight = 20\nbackground = [1, 1, 1]\n");
  CHECK(c.position == Vec3(1, 2, 3));
  CHECK(c.fov_y == 60);
  CHECK(c.width == 32);
  CHECK(c.look_at == Vec3::Zero());
  CHECK_THROWS_AS(preview::parse_camera_config("[camera]\nfov = 180\n"), ConfigError);
  CHECK_THROWS_AS(preview::parse_camera_config("[camera]\nwidth = 8\n"), ConfigError);
  CHECK_THROWS_AS(preview::parse_camera_config("[camera]\nup = [0, 1, 0]\nposition = [0, 5, 0]\n"), ConfigError);
  CHECK_THROWS_AS(preview::parse_camera_config("[camera]\nzoom = 2\n"), ConfigError);
}

TEST_CASE("png output has the signature") {
  const auto dir = test::scratch_dir("preview_png");
  preview::write_png(preview::render_preview(GaussianScene{}, small_camera()), dir / "x.png");
  std::ifstream f(dir / "x.png", std::ios::binary);
  char sig[8] = {};
  f.read(sig, 8);
  CHECK(std::string(sig + 1, 3) == "PNG");
}

}  // TEST_SUITE
