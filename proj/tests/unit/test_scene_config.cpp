#include <doctest.h>

#include <numbers>

#include "gasp/error.hpp"
#include "gasp/pipeline.hpp"
#include "gasp/scene_config.hpp"
#include "test_support.hpp"

using namespace gasp;

namespace {

const char* kMinimal = R"(
[materials.jelly]
kind = "elastic"

[[objects]]
name = "blob"
asset = "blob.ply"
material = "jelly"
)";

std::string error_of(const std::string& text) {
  try {
    (void)io::parse_scene_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("scene_config") {

TEST_CASE("minimal config fills defaults") {
  const SceneConfig c = io::parse_scene_config(kMinimal, "/data");
  CHECK(c.grid.resolution == 64);
  CHECK(c.correction.alpha == 2.0);
  CHECK(c.correction.enabled);
  CHECK(c.kernel == mpm::KernelDegree::cubic);
  CHECK(c.gravity == Vec3(0, 0, -9.8));
  CHECK(c.frame_rate == 24.0);
  CHECK(c.frame_count() == 120);
  CHECK(c.objects.size() == 1);
  CHECK(c.objects[0].asset == std::filesystem::path("/data/blob.ply"));
  CHECK(c.objects[0].material_id == 0);
  CHECK(c.materials[0].youngs == 1e4);
  CHECK(c.output.ply);
  CHECK_FALSE(c.output.obj);
  CHECK(c.dt == 0.0);
}

TEST_CASE("full document parses") {
  const std::string text = R"(
[simulation]
duration = 2.0
frame_rate = 30
dt = 1e-3
kernel = "quadratic"
deterministic = true
gravity = [0, -9.8, 0]

[grid]
resolution = 48
origin = [-1, -1, -1]
cell_size = 0.05
boundary = { x_min = "sticky", z_max = "slip" }

[correction]
alpha = 3.5

[output]
directory = "out"
formats = ["ply", "obj"]

[wind]
kind = "sinusoidal"
amplitude = [1, 0, 0]
frequency = 2.0

[materials.snowball]
kind = "snow"
theta_c = 0.02
hardening = 8

[materials.dune]
kind = "sand"
friction_angle = 35

[[colliders]]
kind = "sphere"
center = [0, 0, 0]
radius = 0.3
behavior = "slip"

[[objects]]
name = "a"
asset = "a.ply"
material = "dune"
rotation = [0.0, 0.0, 0.0, 1.0]
scale = 2
velocity = [1, 2, 3]

[[objects]]
name = "b"
asset = "b.ply"
material = "snowball"
pinned = true

[objects.region]
kind = "sphere"
center = [0, 0, 0]
radius = 1
)";
  const SceneConfig c = io::parse_scene_config(text);
  CHECK(c.frame_count() == 60);
  CHECK(c.kernel == mpm::KernelDegree::quadratic);
  CHECK(c.deterministic);
  CHECK(c.grid.faces[0] == mpm::BoundaryKind::sticky);
  CHECK(c.grid.faces[1] == mpm::BoundaryKind::separate);
  CHECK(c.grid.faces[5] == mpm::BoundaryKind::slip);
  CHECK(*c.grid.cell_size == 0.05);
  CHECK(c.output.obj);
  CHECK(c.correction.alpha == 3.5);
  CHECK(c.objects[0].material_id == c.find_material("dune"));
  CHECK((c.objects[0].rotation - Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-12);
  CHECK(c.objects[1].pinned);
  CHECK(c.objects[1].region.has_value());
  CHECK(c.colliders.size() == 1);
  CHECK(c.materials[c.objects[1].material_id].hardening == 8);
}

TEST_CASE("Poisson ratio 0.5 is rejected") {
  const std::string e = error_of(std::string(kMinimal) + "");
  CHECK(e.empty());
  const std::string bad = R"(
[materials.jelly]
kind = "elastic"
poisson = 0.5
[[objects]]
asset = "x.ply"
material = "jelly"
)";
  CHECK(error_of(bad).find("poisson") != std::string::npos);
}

TEST_CASE("unknown keys and type errors name the key path") {
  CHECK(error_of(std::string(kMinimal) + "\n[grid]\nresolutoin = 32\n").find("grid.resolutoin") != std::string::npos);
  const std::string typed = error_of(std::string(kMinimal) + "\n[simulation]\nduration = \"long\"\n");
  CHECK(typed.find("simulation.duration") != std::string::npos);
  CHECK(typed.find("expected a number") != std::string::npos);
  CHECK(error_of("bogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[simulation\n").find("syntax") != std::string::npos);
}

TEST_CASE("dangling material reference names the object") {
  const std::string text = R"(
[materials.jelly]
kind = "elastic"
[[objects]]
name = "teapot"
asset = "x.ply"
material = "steel"
)";
  const std::string e = error_of(text);
  CHECK(e.find("teapot") != std::string::npos);
  CHECK(e.find("steel") != std::string::npos);
}

TEST_CASE("scene invariants") {
  CHECK(error_of("[materials.jelly]\nkind = \"elastic\"\n").find("at least one object") != std::string::npos);
  CHECK_FALSE(error_of(std::string(kMinimal) + "\n[simulation]\nduration = 0\n").empty());
  CHECK_FALSE(error_of(std::string(kMinimal) + "\n[simulation]\nframe_rate = -1\n").empty());
  CHECK_FALSE(error_of(std::string(kMinimal) + "\n[correction]\nalpha = 0.5\n").empty());
}

TEST_CASE("wind enters the body force") {
  SceneConfig c = io::parse_scene_config(std::string(kMinimal) +
                                         "\n[wind]\nkind = \"sinusoidal\"\namplitude = [0.5, -1, 2]\nfrequency = 3.0\n");
  const double omega = 3.0;
  const Vec3 f = velocity_field_forces(c, std::numbers::pi / (2 * omega))(Vec3(1, 2, 3));
  CHECK(f == c.gravity + Vec3(0.5, -1, 2));
  c.wind.kind = WindConfig::Kind::none;
  CHECK(velocity_field_forces(c, 0.7)(Vec3::Zero()) == c.gravity);
}

}  // TEST_SUITE
