#include "gasp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gasp/correction.hpp"
#include "gasp/ply.hpp"

namespace gasp {

std::vector<Vec3> BoundState::rest_vertices() const {
  std::vector<Vec3> out;
  out.reserve(3 * triangles.size());
  for (const SoupTriangle& t : triangles) {
    out.push_back(t.v1);
    out.push_back(t.v2);
    out.push_back(t.v3);
  }
  return out;
}

RegionSelection select_region(const GaussianScene& scene, const Region& region) {
  RegionSelection sel;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    (region.contains(scene.gaussians[i].mean) ? sel.simulated : sel.fixed).push_back(i);
  }
  return sel;
}

std::vector<GaussianScene> load_assets(const SceneConfig& scene) {
  std::vector<GaussianScene> assets;
  assets.reserve(scene.objects.size());
  for (const ObjectConfig& o : scene.objects) {
    try {
      assets.push_back(io::read_ply(o.asset, scene.flatness));
    } catch (const Error& e) {
      throw ConfigError("object '" + o.name + "': cannot load asset '" + o.asset.string() + "': " + e.what());
    }
  }
  return assets;
}

namespace {

FlatGaussian transformed(const FlatGaussian& g, const ObjectConfig& o, double eps) {
  FlatGaussian out = g;
  out.mean = o.rotation * (o.scale * g.mean) + o.translation;
  out.rotation = o.rotation * g.rotation;
  out.scales = Vec3(eps, o.scale * g.scales[1], o.scale * g.scales[2]);
  return out;
}

struct Bounds {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  void add(const Vec3& x) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  bool empty() const { return !(lo.array() <= hi.array()).all(); }
};

}  // namespace

BoundState bind(const SceneConfig& scene, const std::vector<GaussianScene>& assets) {
  if (assets.size() != scene.objects.size()) {
    throw ConfigError("scene lists " + std::to_string(scene.objects.size()) + " objects but " +
                      std::to_string(assets.size()) + " assets were supplied");
  }
  BoundState b;
  b.rest_scene.metadata.source = "scene";
  b.rest_scene.metadata.flatness = scene.flatness;

  std::optional<std::size_t> rest_count;
  for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
    const ObjectConfig& o = scene.objects[oi];
    const GaussianScene& asset = assets[oi];
    if (o.material_id >= scene.materials.size() || scene.materials[o.material_id].name != o.material) {
      throw ConfigError("object '" + o.name + "': material '" + o.material + "' is not resolved in the material table");
    }
    if (asset.gaussians.empty()) throw ConfigError("object '" + o.name + "': asset contains no Gaussians");
    const std::size_t rc = asset.gaussians.front().sh.rest.size();
    if (rest_count && *rest_count != rc) {
      throw ConfigError("object '" + o.name + "': asset carries " + std::to_string(rc) +
                        " higher-order SH coefficients per Gaussian, other objects carry " +
                        std::to_string(*rest_count));
    }
    rest_count = rc;
    if (oi == 0) b.rest_scene.metadata.sh_degree = asset.metadata.sh_degree;

    BoundState::ObjectRange range;
    range.first_gaussian = b.rest_scene.size();
    range.gaussian_count = asset.size();
    range.first_triangle = b.triangles.size();

    for (const FlatGaussian& g : asset.gaussians) {
      if (g.sh.rest.size() != rc) {
        throw ConfigError("object '" + o.name + "': inconsistent SH coefficient counts within the asset");
      }
      b.rest_scene.gaussians.push_back(transformed(g, o, scene.flatness));
    }

    if (o.pinned) {
      Bounds box;
      for (std::size_t i = 0; i < asset.size(); ++i) {
        const SoupTriangle t = gauss_to_triangle(b.rest_scene.gaussians[range.first_gaussian + i]);
        box.add(t.v1);
        box.add(t.v2);
        box.add(t.v3);
      }
      b.pinned_colliders.push_back(mpm::Collider::box(box.lo, box.hi, o.pinned_behavior));
      b.objects.push_back(range);
      continue;
    }

    std::vector<std::size_t> selected;
    if (o.region) {
      for (std::size_t i = 0; i < asset.size(); ++i) {
        if (o.region->contains(b.rest_scene.gaussians[range.first_gaussian + i].mean)) selected.push_back(i);
      }
      if (selected.empty()) {
        b.warnings.push_back("object '" + o.name + "': region selects no Gaussians; object is played back statically");
      }
    } else {
      selected.resize(asset.size());
      for (std::size_t i = 0; i < selected.size(); ++i) selected[i] = i;
    }

    Bounds box;
    for (std::size_t i : selected) {
      const std::size_t gi = range.first_gaussian + i;
      SoupTriangle t = gauss_to_triangle(b.rest_scene.gaussians[gi], gi);
      if (!(t.rest_len2 > 0.0) || !(t.rest_len3 > 0.0)) {
        throw ConfigError("object '" + o.name + "': Gaussian " + std::to_string(i) + " has a zero in-plane scale");
      }
      box.add(t.v1);
      box.add(t.v2);
      box.add(t.v3);
      b.triangles.push_back(std::move(t));
    }
    range.triangle_count = selected.size();

    if (!selected.empty()) {
      const mpm::MaterialParams& mat = scene.materials[o.material_id];
      const Vec3 ext = box.hi - box.lo;
      const double floor_ext = std::max(1e-3 * ext.maxCoeff(), 1e-9);
      const double volume = ext.cwiseMax(floor_ext).prod() * scene.fill_fraction;
      const double vol_p = volume / static_cast<double>(3 * selected.size());
      for (std::size_t k = range.first_triangle; k < b.triangles.size(); ++k) {
        const SoupTriangle& t = b.triangles[k];
        const Vec3* corners[3] = {&t.v1, &t.v2, &t.v3};
        for (int s = 0; s < 3; ++s) {
          mpm::Particle p;
          p.x = *corners[s];
          p.v = o.velocity;
          p.volume0 = vol_p;
          p.mass = mat.density * vol_p;
          p.material = static_cast<std::uint32_t>(o.material_id);
          p.plastic_state = mpm::initial_plastic_state(mat.kind);
          p.triangle = static_cast<std::uint32_t>(k);
          p.slot = static_cast<std::uint8_t>(s + 1);
          b.particles.push_back(p);
        }
      }
    }
    b.objects.push_back(range);
  }
  return b;
}

mpm::AccelerationField velocity_field_forces(const SceneConfig& scene, double t) {
  const Vec3 f = scene.gravity + scene.wind.at(t);
  return [f](const Vec3&) { return f; };
}

mpm::SimGrid make_grid(const SceneConfig& scene, const BoundState& bound) {
  const GridConfig& g = scene.grid;
  const mpm::Vec3i res = mpm::Vec3i::Constant(g.resolution);
  if (g.origin && g.cell_size) {
    return mpm::SimGrid(*g.origin, *g.cell_size, res, g.faces, g.boundary_band);
  }
  Bounds box;
  for (const auto& p : bound.particles) box.add(p.x);
  for (const auto& c : bound.pinned_colliders) {
    if (c.shape == mpm::Collider::Shape::box) {
      box.add(c.lo);
      box.add(c.hi);
    }
  }
  if (box.empty()) {
    box.add(Vec3::Zero());
    box.add(Vec3::Ones());
  }
  const double extent = std::max((box.hi - box.lo).maxCoeff(), 1e-6);
  const double h = extent / static_cast<double>(g.resolution - 1 - 2 * g.padding);
  const Vec3 center = 0.5 * (box.lo + box.hi);
  const Vec3 origin = center - Vec3::Constant(0.5 * h * (g.resolution - 1));
  return mpm::SimGrid(origin, h, res, g.faces, g.boundary_band);
}

std::vector<Vec3> FunctionMap::advance_to(double t) {
  std::vector<Vec3> out(rest_.size());
  for (std::size_t i = 0; i < rest_.size(); ++i) out[i] = fn_(rest_[i], t);
  return out;
}

std::unique_ptr<FunctionMap> FunctionMap::identity() {
  return std::make_unique<FunctionMap>([](const Vec3& x, double) { return x; });
}

std::unique_ptr<FunctionMap> FunctionMap::translation(const Vec3& velocity) {
  return std::make_unique<FunctionMap>([velocity](const Vec3& x, double t) -> Vec3 { return x + t * velocity; });
}

MpmDeformation::MpmDeformation(const BoundState& bound, const SceneConfig& scene, WarningSink warn)
    : scene_(scene),
      solver_(make_grid(scene, bound), scene.materials, bound.particles,
              mpm::SolverOptions{scene.kernel, scene.cfl, scene.deterministic}),
      warn_(std::move(warn)) {
  std::vector<mpm::Collider> colliders = scene.colliders;
  colliders.insert(colliders.end(), bound.pinned_colliders.begin(), bound.pinned_colliders.end());
  solver_.set_colliders(std::move(colliders));
  solver_.set_warning_handler([this](const std::string& msg) {
    if (!warned_cfl_ && warn_) warn_(msg + " (further CFL warnings suppressed)");
    warned_cfl_ = true;
  });
  const auto d = mpm::measure(solver_.particles());
  diag_.mass = d.mass;
  diag_.momentum = d.momentum;
  diag_.max_speed = d.max_speed;
}

void MpmDeformation::initialize(std::span<const Vec3> rest) {
  auto& ps = solver_.particles();
  if (rest.size() != ps.size()) {
    throw Error("deformation map initialized with " + std::to_string(rest.size()) + " vertices for " +
                std::to_string(ps.size()) + " particles");
  }
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i].x = rest[i];
}

std::vector<Vec3> MpmDeformation::advance_to(double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  mpm::StepDiagnostics last = mpm::measure(solver_.particles());
  if (!solver_.particles().empty()) {
    while (t - solver_.time() > tol) {
      const double now = solver_.time();
      const double remaining = t - now;
      solver_.set_acceleration(velocity_field_forces(scene_, now));
      if (scene_.dt > 0.0) {
        last = solver_.step(std::min(scene_.dt, remaining));
      } else {
        last = solver_.substep(std::min(solver_.stable_dt(), remaining));
      }
    }
  }
  solver_.set_time(t);
  diag_.mass = last.mass;
  diag_.momentum = last.momentum;
  diag_.max_speed = last.max_speed;
  diag_.escaped = last.escaped;
  diag_.steps = solver_.step_count();

  std::vector<Vec3> out;
  out.reserve(solver_.particles().size());
  for (const auto& p : solver_.particles()) out.push_back(p.x);
  return out;
}

std::size_t run(const BoundState& bound, const SceneConfig& scene, DeformationMap& deform, const FrameSink& sink) {
  const std::size_t n_tri = bound.triangles.size();
  deform.initialize(bound.rest_vertices());

  std::vector<FlatGaussian> previous(n_tri);
  for (std::size_t i = 0; i < n_tri; ++i) previous[i] = bound.rest_scene.gaussians[bound.triangles[i].source_index];

  const std::size_t frames = scene.frame_count();
  std::size_t emitted = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    FrameResult frame;
    frame.index = k;
    frame.time = scene.frame_time(k + 1);

    std::vector<Vec3> verts;
    try {
      verts = deform.advance_to(frame.time);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "simulation failed while computing frame " << k << ": " << e.what();
      throw RunError(msg.str(), emitted);
    }
    if (verts.size() != 3 * n_tri) {
      throw RunError("deformation map returned " + std::to_string(verts.size()) + " vertices, expected " +
                         std::to_string(3 * n_tri),
                     emitted);
    }
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (!verts[v].allFinite()) {
        throw RunError("deformation map returned a non-finite position for vertex " + std::to_string(v) +
                           " at frame " + std::to_string(k),
                       emitted);
      }
    }

    frame.scene = bound.rest_scene;
    for (std::size_t i = 0; i < n_tri; ++i) {
      const SoupTriangle& rest = bound.triangles[i];
      const SoupTriangle moved = rest.moved(verts[3 * i], verts[3 * i + 1], verts[3 * i + 2]);
      bool degenerate = false;
      FlatGaussian plain = triangle_to_gauss_or(moved, scene.flatness, previous[i], &degenerate);
      FlatGaussian g = plain;
      clip_scales(g, moved, scene.correction);
      if (g.scales != plain.scales) ++frame.clipped;
      if (degenerate) ++frame.degenerate;
      frame.scene.gaussians[rest.source_index] = g;
      previous[i] = g;
    }
    frame.diagnostics = deform.diagnostics();
    if (sink) sink(frame);
    ++emitted;
  }
  return emitted;
}

}  // namespace gasp
