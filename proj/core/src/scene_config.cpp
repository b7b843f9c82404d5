#include "gasp/scene_config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "gasp/error.hpp"
#include "gasp/ply.hpp"
#include "toml_reader.hpp"

namespace gasp {

bool Region::contains(const Vec3& x) const noexcept {
  switch (kind) {
    case Kind::box: return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    case Kind::sphere: return (x - center).squaredNorm() <= radius * radius;
    case Kind::half_space: return (x - point).dot(normal) >= 0.0;
  }
  return false;
}

Vec3 WindConfig::at(double t) const noexcept {
  switch (kind) {
    case Kind::none: return Vec3::Zero();
    case Kind::uniform: return amplitude;
    case Kind::sinusoidal: return amplitude * std::sin(frequency * t + phase);
  }
  return Vec3::Zero();
}

std::size_t SceneConfig::frame_count() const noexcept {
  const double n = std::floor(duration * frame_rate + 1e-9);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::optional<std::size_t> SceneConfig::find_material(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < materials.size(); ++i) {
    if (materials[i].name == name) return i;
  }
  return std::nullopt;
}

void SceneConfig::validate() {
  if (objects.empty()) throw ConfigError("scene must contain at least one object");
  if (!(duration > 0.0)) throw ConfigError("simulation.duration must be positive");
  if (!(frame_rate > 0.0)) throw ConfigError("simulation.frame_rate must be positive");
  if (!(dt >= 0.0)) throw ConfigError("simulation.dt must be non-negative (0 selects the CFL bound)");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("simulation.cfl must lie in (0, 1]");
  if (!(flatness > 0.0)) throw ConfigError("simulation.flatness must be positive");
  if (!(fill_fraction > 0.0 && fill_fraction <= 1.0)) throw ConfigError("simulation.fill_fraction must lie in (0, 1]");
  if (!gravity.allFinite()) throw ConfigError("simulation.gravity must be finite");
  correction.validate();
  if (grid.resolution < 4) throw ConfigError("grid.resolution must be at least 4");
  if (grid.padding < 0) throw ConfigError("grid.padding must be non-negative");
  if (grid.resolution <= 2 * grid.padding + 1) throw ConfigError("grid.resolution too small for grid.padding");
  if (grid.cell_size && !(*grid.cell_size > 0.0)) throw ConfigError("grid.cell_size must be positive");
  for (const auto& m : materials) m.validate();
  std::set<std::string> names;
  for (const auto& m : materials) {
    if (!names.insert(m.name).second) throw ConfigError("duplicate material '" + m.name + "'");
  }
  for (auto& o : objects) {
    const auto id = find_material(o.material);
    if (!id) {
      throw ConfigError("object '" + o.name + "' references unknown material '" + o.material + "'");
    }
    o.material_id = *id;
    if (!(o.scale > 0.0)) throw ConfigError("object '" + o.name + "': scale must be positive");
    if (std::abs(o.rotation.determinant() - 1.0) > 1e-6 ||
        !(o.rotation.transpose() * o.rotation).isApprox(Mat3::Identity(), 1e-6)) {
      throw ConfigError("object '" + o.name + "': rotation is not a proper rotation");
    }
  }
}

namespace io {

namespace {

using detail::Reader;

mpm::BoundaryKind parse_boundary(const std::string& s, const std::string& path) {
  try {
    return mpm::boundary_kind_from_string(s);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Mat3 parse_rotation(const Eigen::Vector4d& q, const std::string& path) {
  if (!(q.norm() > 0.0)) throw ConfigError(path + ": quaternion must be non-zero");
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  quat.normalize();
  return quat.toRotationMatrix();
}

Region parse_region(const toml::table& t, const std::string& path) {
  Reader r(t, path);
  Region reg;
  const std::string kind = r.string("kind").value_or("box");
  if (kind == "box") {
    reg.kind = Region::Kind::box;
    auto lo = r.vector<3>("min");
    auto hi = r.vector<3>("max");
    if (!lo || !hi) throw ConfigError(path + ": box region needs 'min' and 'max'");
    reg.lo = lo->cwiseMin(*hi);
    reg.hi = lo->cwiseMax(*hi);
  } else if (kind == "sphere") {
    reg.kind = Region::Kind::sphere;
    auto c = r.vector<3>("center");
    auto rad = r.number("radius");
    if (!c || !rad) throw ConfigError(path + ": sphere region needs 'center' and 'radius'");
    if (!(*rad >= 0.0)) throw ConfigError(path + ".radius: must be non-negative");
    reg.center = *c;
    reg.radius = *rad;
  } else if (kind == "half_space") {
    reg.kind = Region::Kind::half_space;
    auto p = r.vector<3>("point");
    auto n = r.vector<3>("normal");
    if (!p || !n) throw ConfigError(path + ": half_space region needs 'point' and 'normal'");
    if (!(n->norm() > 0.0)) throw ConfigError(path + ".normal: must be non-zero");
    reg.point = *p;
    reg.normal = n->normalized();
  } else {
    throw ConfigError(path + ".kind: expected box, sphere or half_space");
  }
  r.finish();
  return reg;
}

mpm::Collider parse_collider(const toml::table& t, const std::string& path) {
  Reader r(t, path);
  const std::string kind = r.string("kind").value_or("plane");
  const mpm::BoundaryKind b = parse_boundary(r.string("behavior").value_or("sticky"), path + ".behavior");
  mpm::Collider c;
  if (kind == "plane" || kind == "half_space") {
    auto p = r.vector<3>("point");
    auto n = r.vector<3>("normal");
    if (!p || !n) throw ConfigError(path + ": plane collider needs 'point' and 'normal'");
    if (!(n->norm() > 0.0)) throw ConfigError(path + ".normal: must be non-zero");
    c = mpm::Collider::half_space(*p, *n, b);
  } else if (kind == "sphere") {
    auto ctr = r.vector<3>("center");
    auto rad = r.number("radius");
    if (!ctr || !rad) throw ConfigError(path + ": sphere collider needs 'center' and 'radius'");
    if (!(*rad > 0.0)) throw ConfigError(path + ".radius: must be positive");
    c = mpm::Collider::sphere(*ctr, *rad, b);
  } else if (kind == "box") {
    auto lo = r.vector<3>("min");
    auto hi = r.vector<3>("max");
    if (!lo || !hi) throw ConfigError(path + ": box collider needs 'min' and 'max'");
    c = mpm::Collider::box(*lo, *hi, b);
  } else {
    throw ConfigError(path + ".kind: expected plane, sphere or box");
  }
  r.finish();
  return c;
}

mpm::MaterialParams parse_material(const std::string& name, const toml::table& t, const std::string& path) {
  Reader r(t, path);
  mpm::MaterialParams m;
  m.name = name;
  const auto kind = r.string("kind");
  if (!kind) throw ConfigError(path + ".kind: required (elastic, snow, sand or fluid)");
  try {
    m.kind = mpm::material_kind_from_string(*kind);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ".kind: " + e.what());
  }
  m.density = r.number("density").value_or(m.density);
  m.youngs = r.number("youngs").value_or(m.youngs);
  m.poisson = r.number("poisson").value_or(m.poisson);
  m.theta_c = r.number("theta_c").value_or(m.theta_c);
  m.theta_s = r.number("theta_s").value_or(m.theta_s);
  m.hardening = r.number("hardening").value_or(m.hardening);
  m.friction_angle = r.number("friction_angle").value_or(m.friction_angle);
  m.bulk_modulus = r.number("bulk_modulus").value_or(m.bulk_modulus);
  m.gamma = r.number("gamma").value_or(m.gamma);
  r.finish();
  return m;
}

void parse_grid(const toml::table& t, GridConfig& g) {
  Reader r(t, "grid");
  if (auto v = r.integer("resolution")) g.resolution = static_cast<int>(*v);
  if (auto v = r.vector<3>("origin")) g.origin = *v;
  if (auto v = r.number("cell_size")) g.cell_size = *v;
  if (auto v = r.integer("padding")) g.padding = static_cast<int>(*v);
  if (auto v = r.integer("boundary_band")) g.boundary_band = static_cast<int>(*v);
  if (const toml::node* n = t.get("boundary")) {
    r.node("boundary");
    if (auto s = n->value_exact<std::string>()) {
      g.faces = mpm::SimGrid::uniform_faces(parse_boundary(*s, "grid.boundary"));
    } else if (const toml::table* bt = n->as_table()) {
      Reader br(*bt, "grid.boundary");
      static constexpr const char* kFaces[6] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
      for (int f = 0; f < 6; ++f) {
        if (auto s = br.string(kFaces[f])) g.faces[f] = parse_boundary(*s, br.key_path(kFaces[f]));
      }
      br.finish();
    } else {
      r.type_error("boundary", "a string or a table of faces");
    }
  }
  if (g.origin.has_value() != g.cell_size.has_value()) {
    throw ConfigError("grid: 'origin' and 'cell_size' must be given together");
  }
  r.finish();
}

}  // namespace

SceneConfig parse_scene_config(std::string_view text, const std::filesystem::path& base_dir) {
  const toml::table root = detail::parse_toml(text, "scene");

  SceneConfig cfg;
  cfg.base_dir = base_dir;
  Reader top(root, "");

  if (const toml::table* t = top.table("simulation")) {
    Reader r(*t, "simulation");
    cfg.duration = r.number("duration").value_or(cfg.duration);
    cfg.frame_rate = r.number("frame_rate").value_or(cfg.frame_rate);
    cfg.dt = r.number("dt").value_or(cfg.dt);
    cfg.cfl = r.number("cfl").value_or(cfg.cfl);
    cfg.flatness = r.number("flatness").value_or(cfg.flatness);
    cfg.fill_fraction = r.number("fill_fraction").value_or(cfg.fill_fraction);
    cfg.deterministic = r.boolean("deterministic").value_or(cfg.deterministic);
    if (auto g = r.vector<3>("gravity")) cfg.gravity = *g;
    if (auto k = r.string("kernel")) {
      if (*k == "cubic") {
        cfg.kernel = mpm::KernelDegree::cubic;
      } else if (*k == "quadratic") {
        cfg.kernel = mpm::KernelDegree::quadratic;
      } else {
        throw ConfigError("simulation.kernel: expected 'cubic' or 'quadratic'");
      }
    }
    r.finish();
  }

  if (const toml::table* t = top.table("grid")) parse_grid(*t, cfg.grid);

  if (const toml::table* t = top.table("correction")) {
    Reader r(*t, "correction");
    cfg.correction.alpha = r.number("alpha").value_or(cfg.correction.alpha);
    cfg.correction.enabled = r.boolean("enabled").value_or(cfg.correction.enabled);
    r.finish();
  }

  if (const toml::table* t = top.table("output")) {
    Reader r(*t, "output");
    if (auto d = r.string("directory")) cfg.output.directory = *d;
    if (const toml::array* a = r.array("formats")) {
      cfg.output.ply = false;
      cfg.output.obj = false;
      for (const toml::node& n : *a) {
        const auto s = n.value_exact<std::string>();
        if (s && *s == "ply") {
          cfg.output.ply = true;
        } else if (s && *s == "obj") {
          cfg.output.obj = true;
        } else {
          throw ConfigError("output.formats: expected entries 'ply' or 'obj'");
        }
      }
    }
    r.finish();
  }

  if (const toml::table* t = top.table("wind")) {
    Reader r(*t, "wind");
    const std::string kind = r.string("kind").value_or("uniform");
    if (kind == "none") {
      cfg.wind.kind = WindConfig::Kind::none;
    } else if (kind == "uniform") {
      cfg.wind.kind = WindConfig::Kind::uniform;
    } else if (kind == "sinusoidal") {
      cfg.wind.kind = WindConfig::Kind::sinusoidal;
    } else {
      throw ConfigError("wind.kind: expected none, uniform or sinusoidal");
    }
    if (auto a = r.vector<3>("amplitude")) cfg.wind.amplitude = *a;
    cfg.wind.frequency = r.number("frequency").value_or(0.0);
    cfg.wind.phase = r.number("phase").value_or(0.0);
    r.finish();
  }

  if (const toml::table* t = top.table("materials")) {
    for (const auto& [k, v] : *t) {
      const std::string name(k.str());
      const toml::table* mt = v.as_table();
      if (!mt) throw ConfigError("materials." + name + ": expected a table");
      cfg.materials.push_back(parse_material(name, *mt, "materials." + name));
    }
  }

  if (const toml::array* a = top.array("colliders")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string path = "colliders[" + std::to_string(i) + "]";
      const toml::table* ct = a->get(i)->as_table();
      if (!ct) throw ConfigError(path + ": expected a table");
      cfg.colliders.push_back(parse_collider(*ct, path));
    }
  }

  if (const toml::array* a = top.array("objects")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string path = "objects[" + std::to_string(i) + "]";
      const toml::table* ot = a->get(i)->as_table();
      if (!ot) throw ConfigError(path + ": expected a table");
      Reader r(*ot, path);
      ObjectConfig o;
      o.name = r.string("name").value_or("object" + std::to_string(i));
      const auto asset = r.string("asset");
      if (!asset) throw ConfigError(path + ".asset: required");
      o.asset = std::filesystem::path(*asset);
      if (o.asset.is_relative() && !base_dir.empty()) o.asset = base_dir / o.asset;
      const auto mat = r.string("material");
      if (!mat) throw ConfigError(path + ".material: required");
      o.material = *mat;
      if (auto v = r.vector<3>("translation")) o.translation = *v;
      if (auto q = r.vector<4>("rotation")) o.rotation = parse_rotation(*q, path + ".rotation");
      o.scale = r.number("scale").value_or(1.0);
      if (auto v = r.vector<3>("velocity")) o.velocity = *v;
      o.pinned = r.boolean("pinned").value_or(false);
      if (auto b = r.string("pinned_behavior")) o.pinned_behavior = parse_boundary(*b, path + ".pinned_behavior");
      if (const toml::table* rt = r.table("region")) o.region = parse_region(*rt, path + ".region");
      r.finish();
      cfg.objects.push_back(std::move(o));
    }
  }

  top.finish();
  cfg.validate();
  return cfg;
}

SceneConfig read_scene_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return parse_scene_config(text, path.parent_path());
}

}  // namespace io

}  // namespace gasp
