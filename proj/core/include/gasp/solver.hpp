#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gasp/constitutive.hpp"
#include "gasp/grid.hpp"
#include "gasp/kernel.hpp"

namespace gasp::mpm {

/// Material point. F is the elastic part of the deformation gradient; the
/// plastic part lives in `plastic_state` (J_p for snow, log-volume
/// correction for sand).
struct Particle {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 F = Mat3::Identity();
  Mat3 C = Mat3::Zero();
  double mass = 1.0;
  double volume0 = 1.0;
  std::uint32_t material = 0;
  double plastic_state = 1.0;
  std::uint32_t triangle = 0;
  std::uint8_t slot = 0;  // 1, 2 or 3
  bool escaped = false;
};

/// Initial plastic_state for a material kind (1 for J_p, 0 for log-volume).
double initial_plastic_state(MaterialKind k) noexcept;

/// Spatially varying acceleration; null means zero.
using AccelerationField = std::function<Vec3(const Vec3& x)>;

struct StepDiagnostics {
  std::int64_t step = 0;
  double time = 0.0;
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double max_speed = 0.0;
  std::size_t escaped = 0;
  int substeps = 1;
};

struct SolverOptions {
  KernelDegree kernel = KernelDegree::cubic;
  double cfl = 0.4;
  bool deterministic = false;
};

/// Flags particles outside the safe domain as escaped, freezing them in
/// place. Returns the number of newly escaped particles.
std::size_t flag_escaped(std::span<Particle> particles, const SimGrid& grid);

/// Scatter of mass and momentum with the MLS fused stress force. Escaped
/// particles are skipped. The grid is accumulated into, not cleared.
void p2g(std::span<const Particle> particles, SimGrid& grid, std::span<const MaterialParams> materials,
         double dt, KernelDegree kernel, bool deterministic = true);

/// Momentum to velocity, body force, collider and domain-face projection.
void grid_update(SimGrid& grid, double dt, const AccelerationField& accel,
                 std::span<const Collider> colliders, bool apply_domain_boundary = true);

/// Gather velocity and affine matrix, advect, update and project F.
/// Throws NumericalBlowup naming `step_index` and the particle.
void g2p(std::span<Particle> particles, const SimGrid& grid, std::span<const MaterialParams> materials,
         double dt, KernelDegree kernel, std::int64_t step_index = 0);

/// cfl * h / (max speed + max sound speed).
double stable_dt(std::span<const Particle> particles, std::span<const MaterialParams> materials,
                 double h, double cfl);

StepDiagnostics measure(std::span<const Particle> particles);

/// Explicit MLS-MPM integrator owning the particle state.
class MpmSolver {
 public:
  MpmSolver(SimGrid grid, std::vector<MaterialParams> materials, std::vector<Particle> particles,
            SolverOptions options = {});

  /// One clear/p2g/grid_update/g2p cycle with exactly `dt`.
  StepDiagnostics substep(double dt);

  /// Advances by `dt`, splitting into equal substeps when `dt` exceeds the
  /// CFL bound. A warning is reported through `on_warning` in that case.
  StepDiagnostics step(double dt);

  void set_acceleration(AccelerationField f) { accel_ = std::move(f); }
  void set_colliders(std::vector<Collider> c) { colliders_ = std::move(c); }
  void set_warning_handler(std::function<void(const std::string&)> h) { on_warning_ = std::move(h); }

  double stable_dt() const;
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  std::int64_t step_count() const noexcept { return step_count_; }

  std::vector<Particle>& particles() noexcept { return particles_; }
  const std::vector<Particle>& particles() const noexcept { return particles_; }
  const SimGrid& grid() const noexcept { return grid_; }
  const std::vector<MaterialParams>& materials() const noexcept { return materials_; }
  const std::vector<Collider>& colliders() const noexcept { return colliders_; }
  const SolverOptions& options() const noexcept { return options_; }

 private:
  SimGrid grid_;
  std::vector<MaterialParams> materials_;
  std::vector<Particle> particles_;
  SolverOptions options_;
  AccelerationField accel_;
  std::vector<Collider> colliders_;
  std::function<void(const std::string&)> on_warning_;
  double time_ = 0.0;
  std::int64_t step_count_ = 0;
};

}  // namespace gasp::mpm
