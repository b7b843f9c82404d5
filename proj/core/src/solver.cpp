#include "gasp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "gasp/error.hpp"

namespace gasp::mpm {

double initial_plastic_state(MaterialKind k) noexcept {
  return k == MaterialKind::sand ? 0.0 : 1.0;
}

std::size_t flag_escaped(std::span<Particle> particles, const SimGrid& grid) {
  std::size_t n = 0;
  for (auto& p : particles) {
    if (p.escaped) continue;
    if (!grid.in_safe_domain(p.x)) {
      p.escaped = true;
      p.v.setZero();
      p.C.setZero();
      ++n;
    }
  }
  return n;
}

namespace {

template <class Fn>
void for_each_node(const Stencil& s, Fn&& fn) {
  for (int i = 0; i < s.width; ++i) {
    for (int j = 0; j < s.width; ++j) {
      const double wij = s.w[0][i] * s.w[1][j];
      for (int k = 0; k < s.width; ++k) fn(i, j, k, wij * s.w[2][k]);
    }
  }
}

// Offset from particle to node (base + ijk), computed in cell units first so
// it does not depend on the magnitude of the grid origin.
inline Vec3 node_offset(const Stencil& s, const Vec3& u, int i, int j, int k, double h) {
  return Vec3((s.base[0] + i - u[0]) * h, (s.base[1] + j - u[1]) * h, (s.base[2] + k - u[2]) * h);
}

}  // namespace

void p2g(std::span<const Particle> particles, SimGrid& grid, std::span<const MaterialParams> materials,
         double dt, KernelDegree kernel, bool deterministic) {
  const double h = grid.cell_size();
  const Vec3 origin = grid.origin();
  const double d_inv = inertia_inverse_factor(kernel) / (h * h);
  auto& nodes = grid.nodes();

  auto scatter = [&](const Particle& p, bool atomic) {
    const MaterialParams& mat = materials[p.material];
    const Stencil s = kernel_weights(p.x, origin, h, kernel);
    const Vec3 u = (p.x - origin) / h;
    const Mat3 tau = kirchhoff_stress(p.F, p.plastic_state, mat);
    const Mat3 affine = p.mass * p.C - (dt * p.volume0 * d_inv) * tau;
    const Vec3 mv = p.mass * p.v;
    for_each_node(s, [&](int i, int j, int k, double w) {
      const Vec3 dpos = node_offset(s, u, i, j, k, h);
      const Vec3 dm = w * (mv + affine * dpos);
      GridNode& n = nodes[grid.index(s.base[0] + i, s.base[1] + j, s.base[2] + k)];
      if (atomic) {
#pragma omp atomic
        n.mass += w * p.mass;
#pragma omp atomic
        n.momentum[0] += dm[0];
#pragma omp atomic
        n.momentum[1] += dm[1];
#pragma omp atomic
        n.momentum[2] += dm[2];
      } else {
        n.mass += w * p.mass;
        n.momentum += dm;
      }
    });
  };

  const auto count = static_cast<std::int64_t>(particles.size());
  if (deterministic) {
    for (std::int64_t q = 0; q < count; ++q) {
      if (!particles[q].escaped) scatter(particles[q], false);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t q = 0; q < count; ++q) {
      if (!particles[q].escaped) scatter(particles[q], true);
    }
  }
}

void grid_update(SimGrid& grid, double dt, const AccelerationField& accel,
                 std::span<const Collider> colliders, bool apply_domain_boundary) {
  auto& nodes = grid.nodes();
  const Vec3i res = grid.resolution();
  const int band = grid.boundary_band();
  const auto& faces = grid.faces();
  const auto count = static_cast<std::int64_t>(nodes.size());

#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < count; ++idx) {
    GridNode& n = nodes[idx];
    if (!(n.mass > 0.0)) {
      n.momentum.setZero();
      continue;
    }
    Vec3 v = n.momentum / n.mass;
    const Vec3i c = grid.coords(static_cast<std::size_t>(idx));
    const Vec3 x = grid.node_position(c[0], c[1], c[2]);
    if (accel) v += dt * accel(x);

    Vec3 outward;
    for (const Collider& col : colliders) {
      if (col.contains(x, outward)) v = project_velocity(v, outward, col.behavior);
    }
    if (apply_domain_boundary) {
      for (int a = 0; a < 3; ++a) {
        if (c[a] < band) v = project_velocity(v, Vec3::Unit(a), faces[2 * a]);
        if (c[a] >= res[a] - band) v = project_velocity(v, -Vec3::Unit(a), faces[2 * a + 1]);
      }
    }
    n.momentum = v;
  }
}

void g2p(std::span<Particle> particles, const SimGrid& grid, std::span<const MaterialParams> materials,
         double dt, KernelDegree kernel, std::int64_t step_index) {
  const double h = grid.cell_size();
  const Vec3 origin = grid.origin();
  const double d_inv = inertia_inverse_factor(kernel) / (h * h);
  const auto& nodes = grid.nodes();
  const auto count = static_cast<std::int64_t>(particles.size());
  std::atomic<std::int64_t> bad{std::numeric_limits<std::int64_t>::max()};

#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < count; ++q) {
    Particle& p = particles[q];
    if (p.escaped) continue;
    const Stencil s = kernel_weights(p.x, origin, h, kernel);
    const Vec3 u = (p.x - origin) / h;
    Vec3 v = Vec3::Zero();
    Mat3 B = Mat3::Zero();
    for_each_node(s, [&](int i, int j, int k, double w) {
      const Vec3& gv = nodes[grid.index(s.base[0] + i, s.base[1] + j, s.base[2] + k)].momentum;
      const Vec3 dpos = node_offset(s, u, i, j, k, h);
      v += w * gv;
      B += (w * gv) * dpos.transpose();
    });
    p.v = v;
    p.C = d_inv * B;
    p.x += dt * v;
    const Mat3 F_trial = (Mat3::Identity() + dt * p.C) * p.F;
    if (!F_trial.allFinite() || !p.x.allFinite() || !std::isfinite(p.plastic_state)) {
      std::int64_t cur = bad.load();
      while (q < cur && !bad.compare_exchange_weak(cur, q)) {}
      continue;
    }
    const PlasticResult r = plastic_project(F_trial, p.plastic_state, materials[p.material]);
    p.F = r.F;
    p.plastic_state = r.plastic_state;
  }

  const std::int64_t first_bad = bad.load();
  if (first_bad != std::numeric_limits<std::int64_t>::max()) {
    std::ostringstream msg;
    msg << "numerical blowup at step " << step_index << ": particle " << first_bad
        << " has a non-finite state";
    throw NumericalBlowup(msg.str(), step_index, static_cast<std::size_t>(first_bad));
  }
}

double stable_dt(std::span<const Particle> particles, std::span<const MaterialParams> materials,
                 double h, double cfl) {
  double vmax = 0.0;
  for (const auto& p : particles) {
    if (!p.escaped) vmax = std::max(vmax, p.v.norm());
  }
  double c = 0.0;
  for (const auto& m : materials) c = std::max(c, m.sound_speed());
  const double denom = vmax + c;
  return denom > 0.0 ? cfl * h / denom : std::numeric_limits<double>::infinity();
}

StepDiagnostics measure(std::span<const Particle> particles) {
  StepDiagnostics d;
  for (const auto& p : particles) {
    d.mass += p.mass;
    d.momentum += p.mass * p.v;
    if (p.escaped) {
      ++d.escaped;
    } else {
      d.max_speed = std::max(d.max_speed, p.v.norm());
    }
  }
  return d;
}

MpmSolver::MpmSolver(SimGrid grid, std::vector<MaterialParams> materials, std::vector<Particle> particles,
                     SolverOptions options)
    : grid_(std::move(grid)),
      materials_(std::move(materials)),
      particles_(std::move(particles)),
      options_(options) {
  for (const auto& m : materials_) m.validate();
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const Particle& p = particles_[i];
    if (p.material >= materials_.size()) {
      throw ConfigError("particle " + std::to_string(i) + " references missing material " +
                        std::to_string(p.material));
    }
    if (!(p.mass > 0.0) || !(p.volume0 > 0.0)) {
      throw ConfigError("particle " + std::to_string(i) + " has non-positive mass or volume");
    }
  }
}

double MpmSolver::stable_dt() const {
  return mpm::stable_dt(particles_, materials_, grid_.cell_size(), options_.cfl);
}

StepDiagnostics MpmSolver::substep(double dt) {
  flag_escaped(particles_, grid_);
  grid_.clear();
  p2g(particles_, grid_, materials_, dt, options_.kernel, options_.deterministic);
  grid_update(grid_, dt, accel_, colliders_);
  g2p(particles_, grid_, materials_, dt, options_.kernel, step_count_);
  ++step_count_;
  time_ += dt;

  StepDiagnostics d = measure(particles_);
  d.step = step_count_;
  d.time = time_;
  return d;
}

StepDiagnostics MpmSolver::step(double dt) {
  const double limit = stable_dt();
  int n = 1;
  if (dt > limit) {
    n = static_cast<int>(std::ceil(dt / limit));
    if (on_warning_) {
      std::ostringstream msg;
      msg << "dt " << dt << " exceeds CFL bound " << limit << "; using " << n << " substeps";
      on_warning_(msg.str());
    }
  }
  StepDiagnostics d;
  const double sub = dt / n;
  for (int i = 0; i < n; ++i) d = substep(sub);
  d.substeps = n;
  return d;
}

}  // namespace gasp::mpm
