#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasp/error.hpp"
#include "gasp/scene_config.hpp"
#include "gasp/solver.hpp"
#include "gasp/splat_model.hpp"

namespace gasp {

using WarningSink = std::function<void(const std::string&)>;

/// Scene after binding: the full transformed Gaussian set plus the soup and
/// particles for the part that is simulated. Particle 3*i + (s-1) is slot s of
/// triangle i.
struct BoundState {
  struct ObjectRange {
    std::size_t first_gaussian = 0;
    std::size_t gaussian_count = 0;
    std::size_t first_triangle = 0;
    std::size_t triangle_count = 0;
  };

  GaussianScene rest_scene;                  // every Gaussian, world space, t = 0
  std::vector<SoupTriangle> triangles;       // simulated faces; source_index -> rest_scene
  std::vector<mpm::Particle> particles;
  std::vector<ObjectRange> objects;
  std::vector<mpm::Collider> pinned_colliders;
  std::vector<std::string> warnings;

  std::size_t simulated_count() const noexcept { return triangles.size(); }
  std::size_t static_count() const noexcept { return rest_scene.size() - triangles.size(); }
  std::vector<Vec3> rest_vertices() const;
};

/// Indices of Gaussians whose mean lies inside / outside `region`.
struct RegionSelection {
  std::vector<std::size_t> simulated;
  std::vector<std::size_t> fixed;
};
RegionSelection select_region(const GaussianScene& scene, const Region& region);

/// Reads every object's asset with the configured flatness.
std::vector<GaussianScene> load_assets(const SceneConfig& scene);

/// Applies object transforms, splits off static Gaussians and creates three
/// particles per simulated face. `assets[i]` belongs to `scene.objects[i]`.
/// Throws ConfigError naming the object on mismatch.
BoundState bind(const SceneConfig& scene, const std::vector<GaussianScene>& assets);

/// gravity + wind(t), uniform in space.
mpm::AccelerationField velocity_field_forces(const SceneConfig& scene, double t);

/// Grid from explicit settings, or fitted around the particles and pinned
/// colliders with `padding` cells on each side.
mpm::SimGrid make_grid(const SceneConfig& scene, const BoundState& bound);

struct FrameDiagnostics {
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double max_speed = 0.0;
  std::size_t escaped = 0;
  std::int64_t steps = 0;
};

/// Moves the rest vertex set through time. Implementations must preserve the
/// vertex count and return finite positions.
class DeformationMap {
 public:
  virtual ~DeformationMap() = default;
  virtual void initialize(std::span<const Vec3> rest) = 0;
  /// Positions at time `t`; calls arrive with non-decreasing `t`.
  virtual std::vector<Vec3> advance_to(double t) = 0;
  virtual FrameDiagnostics diagnostics() const { return {}; }
};

/// phi(X, t) applied independently to every vertex.
class FunctionMap final : public DeformationMap {
 public:
  using Fn = std::function<Vec3(const Vec3& rest, double t)>;
  explicit FunctionMap(Fn fn) : fn_(std::move(fn)) {}

  void initialize(std::span<const Vec3> rest) override { rest_.assign(rest.begin(), rest.end()); }
  std::vector<Vec3> advance_to(double t) override;

  static std::unique_ptr<FunctionMap> identity();
  static std::unique_ptr<FunctionMap> translation(const Vec3& velocity);

 private:
  Fn fn_;
  std::vector<Vec3> rest_;
};

/// The embedded solver as a deformation map.
class MpmDeformation final : public DeformationMap {
 public:
  MpmDeformation(const BoundState& bound, const SceneConfig& scene, WarningSink warn = {});

  void initialize(std::span<const Vec3> rest) override;
  std::vector<Vec3> advance_to(double t) override;
  FrameDiagnostics diagnostics() const override { return diag_; }

  mpm::MpmSolver& solver() noexcept { return solver_; }
  const mpm::MpmSolver& solver() const noexcept { return solver_; }

 private:
  SceneConfig scene_;
  mpm::MpmSolver solver_;
  FrameDiagnostics diag_;
  WarningSink warn_;
  bool warned_cfl_ = false;
};

struct FrameResult {
  std::size_t index = 0;
  double time = 0.0;
  GaussianScene scene;
  FrameDiagnostics diagnostics;
  std::size_t clipped = 0;     // scales reduced by the correction
  std::size_t degenerate = 0;  // faces rebuilt from the previous rotation
};

using FrameSink = std::function<void(const FrameResult&)>;

/// Failure after `frames_emitted` frames reached the sink.
class RunError : public Error {
 public:
  RunError(const std::string& what, std::size_t frames_emitted)
      : Error(what), frames_emitted_(frames_emitted) {}
  std::size_t frames_emitted() const noexcept { return frames_emitted_; }
  /// Index of the last frame handed to the sink, if any.
  std::optional<std::size_t> last_good_frame() const noexcept {
    return frames_emitted_ ? std::optional<std::size_t>(frames_emitted_ - 1) : std::nullopt;
  }

 private:
  std::size_t frames_emitted_;
};

/// Emits frame k (0-based) at time (k + 1) / frame_rate for every k below
/// scene.frame_count(). Every frame carries all Gaussians in source order.
std::size_t run(const BoundState& bound, const SceneConfig& scene, DeformationMap& deform,
                const FrameSink& sink);

}  // namespace gasp
