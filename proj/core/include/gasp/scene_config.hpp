#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gasp/constitutive.hpp"
#include "gasp/correction.hpp"
#include "gasp/grid.hpp"
#include "gasp/kernel.hpp"
#include "gasp/splat_model.hpp"

namespace gasp {

/// World-space selection used to simulate only part of an asset.
struct Region {
  enum class Kind { box, sphere, half_space };
  Kind kind = Kind::box;
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  Vec3 point = Vec3::Zero();   // half_space: points with (x - point).n >= 0 are inside
  Vec3 normal = Vec3::UnitZ();

  bool contains(const Vec3& x) const noexcept;
};

struct ObjectConfig {
  std::string name;
  std::filesystem::path asset;
  std::string material;
  std::size_t material_id = 0;
  Vec3 translation = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double scale = 1.0;
  Vec3 velocity = Vec3::Zero();
  bool pinned = false;
  mpm::BoundaryKind pinned_behavior = mpm::BoundaryKind::sticky;
  std::optional<Region> region;
};

/// Spatially uniform wind acceleration added to gravity.
struct WindConfig {
  enum class Kind { none, uniform, sinusoidal };
  Kind kind = Kind::none;
  Vec3 amplitude = Vec3::Zero();
  double frequency = 0.0;  // angular, rad/s
  double phase = 0.0;

  Vec3 at(double t) const noexcept;
};

struct GridConfig {
  int resolution = 64;
  std::optional<Vec3> origin;
  std::optional<double> cell_size;
  int padding = 4;
  int boundary_band = 3;
  mpm::SimGrid::FaceBoundaries faces = mpm::SimGrid::uniform_faces(mpm::BoundaryKind::separate);
};

struct OutputConfig {
  std::filesystem::path directory = "frames";
  bool ply = true;
  bool obj = false;
};

struct SceneConfig {
  std::vector<ObjectConfig> objects;
  std::vector<mpm::MaterialParams> materials;
  Vec3 gravity{0.0, 0.0, -9.8};
  WindConfig wind;
  std::vector<mpm::Collider> colliders;
  GridConfig grid;
  double dt = 0.0;  // 0 selects the CFL bound every step
  double frame_rate = 24.0;
  double duration = 5.0;
  double cfl = 0.4;
  CorrectionConfig correction;
  OutputConfig output;
  bool deterministic = false;
  mpm::KernelDegree kernel = mpm::KernelDegree::cubic;
  double flatness = kDefaultFlatness;
  double fill_fraction = 0.4;
  std::filesystem::path base_dir;

  /// Number of emitted frames: floor(duration * frame_rate), at least 1.
  std::size_t frame_count() const noexcept;
  double frame_time(std::size_t k) const noexcept { return static_cast<double>(k) / frame_rate; }

  std::optional<std::size_t> find_material(std::string_view name) const noexcept;
  /// Resolves object material names to ids and checks every invariant.
  /// Throws ConfigError.
  void validate();
};

namespace io {

/// TOML scene document. Unknown keys and type mismatches raise ConfigError
/// naming the key path. Relative asset paths resolve against `base_dir`.
SceneConfig parse_scene_config(std::string_view text, const std::filesystem::path& base_dir = {});
SceneConfig read_scene_config(const std::filesystem::path& path);

}  // namespace io

}  // namespace gasp
