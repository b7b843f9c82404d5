#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gasp/frame_io.hpp"
#include "gasp/ply.hpp"
#include "gasp/synth.hpp"
#include "test_support.hpp"

using namespace gasp;
namespace fs = std::filesystem;

namespace {

std::vector<FrameResult> fake_frames(std::size_t n) {
  const GaussianScene s = synth::blob(20, 0.5, 11);
  std::vector<FrameResult> out;
  for (std::size_t k = 0; k < n; ++k) {
    FrameResult f;
    f.index = k;
    f.time = static_cast<double>(k + 1) / 24.0;
    f.scene = s;
    for (auto& g : f.scene.gaussians) g.mean.z() -= 0.1 * k;
    f.diagnostics.mass = 2.5;
    f.diagnostics.momentum = Vec3(0, 0, -0.5 * k);
    f.diagnostics.steps = 10 * static_cast<std::int64_t>(k + 1);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST_SUITE("frame_io") {

TEST_CASE("frame names are zero padded") {
  CHECK(io::frame_file_name(0, "ply") == "frame_00000.ply");
  CHECK(io::frame_file_name(123, "obj") == "frame_00123.obj");
}

TEST_CASE("sequence writes one file per frame and a monotone manifest") {
  const fs::path dir = test::scratch_dir("frame_seq");
  const auto frames = fake_frames(10);
  io::write_frame_sequence(frames, dir / "out", {true, true});
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(fs::exists(dir / "out" / io::frame_file_name(k, "ply")));
    CHECK(fs::exists(dir / "out" / io::frame_file_name(k, "obj")));
  }
  const auto rows = io::read_manifest(dir / "out" / io::kManifestName);
  REQUIRE(rows.size() == 10);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].frame == k);
    CHECK(rows[k].time == doctest::Approx((k + 1) / 24.0));
    CHECK(rows[k].mass == 2.5);
    CHECK(rows[k].momentum.z() == doctest::Approx(-0.5 * k));
    CHECK(rows[k].gaussians == 20);
    CHECK(rows[k].file == io::frame_file_name(k, "ply"));
    if (k) CHECK(rows[k].time > rows[k - 1].time);
  }
  const GaussianScene back = io::read_ply(dir / "out" / io::frame_file_name(9, "ply"));
  REQUIRE(back.size() == 20);
  CHECK(back.gaussians[3].mean.z() == doctest::Approx(frames[9].scene.gaussians[3].mean.z()).epsilon(1e-6));
}

TEST_CASE("a blocked frame path reports the completed frames") {
  const fs::path dir = test::scratch_dir("frame_partial");
  fs::create_directories(dir / io::frame_file_name(3, "ply"));
  const auto frames = fake_frames(6);
  io::FrameWriter writer(dir, {});
  try {
    for (const auto& f : frames) writer.write(f);
    FAIL("expected PartialOutputError");
  } catch (const io::PartialOutputError& e) {
    CHECK(e.completed() == std::vector<std::size_t>{0, 1, 2});
  }
  const auto rows = io::read_manifest(dir / io::kManifestName);
  CHECK(rows.size() == 3);
  CHECK(fs::exists(dir / io::frame_file_name(2, "ply")));
}

TEST_CASE("malformed manifest is a parse error") {
  const fs::path dir = test::scratch_dir("frame_bad_manifest");
  std::ofstream(dir / "m.jsonl") << "{\"frame\": 0}\nnot json\n";
  CHECK_THROWS_AS(io::read_manifest(dir / "m.jsonl"), ParseError);
}

}  // TEST_SUITE
