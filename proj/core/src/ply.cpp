#include "gasp/ply.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <Eigen/Geometry>

#include "gasp/error.hpp"

static_assert(std::endian::native == std::endian::little, "PLY codec assumes a little-endian host");

namespace gasp::io {

namespace {

enum class ScalarType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<ScalarType> scalar_type(std::string_view s) {
  if (s == "char" || s == "int8") return ScalarType::i8;
  if (s == "uchar" || s == "uint8") return ScalarType::u8;
  if (s == "short" || s == "int16") return ScalarType::i16;
  if (s == "ushort" || s == "uint16") return ScalarType::u16;
  if (s == "int" || s == "int32") return ScalarType::i32;
  if (s == "uint" || s == "uint32") return ScalarType::u32;
  if (s == "float" || s == "float32") return ScalarType::f32;
  if (s == "double" || s == "float64") return ScalarType::f64;
  return std::nullopt;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::i8:
    case ScalarType::u8: return 1;
    case ScalarType::i16:
    case ScalarType::u16: return 2;
    case ScalarType::i32:
    case ScalarType::u32:
    case ScalarType::f32: return 4;
    case ScalarType::f64: return 8;
  }
  return 0;
}

template <class T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double load_scalar(ScalarType t, const char* p) {
  switch (t) {
    case ScalarType::i8: return load<std::int8_t>(p);
    case ScalarType::u8: return load<std::uint8_t>(p);
    case ScalarType::i16: return load<std::int16_t>(p);
    case ScalarType::u16: return load<std::uint16_t>(p);
    case ScalarType::i32: return load<std::int32_t>(p);
    case ScalarType::u32: return load<std::uint32_t>(p);
    case ScalarType::f32: return load<float>(p);
    case ScalarType::f64: return load<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type;
  std::size_t offset;  // within the record
};

struct Element {
  std::string name;
  std::uint64_t count = 0;
  std::vector<Property> props;
  std::size_t stride = 0;
  bool has_list = false;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct Header {
  std::vector<Element> elements;
  std::size_t data_offset = 0;
};

Header parse_header(std::string_view bytes) {
  Header h;
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& line_start) -> std::optional<std::string_view> {
    line_start = pos;
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) return std::nullopt;
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  std::size_t at = 0;
  auto first = next_line(at);
  if (!first || split_ws(*first) != std::vector<std::string_view>{"ply"}) {
    throw ParseError("not a PLY file (missing 'ply' magic)", 0, "magic");
  }
  bool have_format = false;
  while (true) {
    auto line = next_line(at);
    if (!line) throw ParseError("header is not terminated by end_header", bytes.size(), "end_header");
    const auto tok = split_ws(*line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 3) throw ParseError("malformed format line", at, "format");
      if (tok[1] != "binary_little_endian") {
        throw ParseError("unsupported PLY format '" + std::string(tok[1]) +
                             "' (only binary_little_endian is supported)",
                         at, "format");
      }
      if (tok[2] != "1.0") throw ParseError("unsupported PLY version " + std::string(tok[2]), at, "format");
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element line", at, "element");
      Element e;
      e.name = std::string(tok[1]);
      const auto r = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), e.count);
      if (r.ec != std::errc{}) throw ParseError("bad element count", at, e.name);
      h.elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (h.elements.empty()) throw ParseError("property before any element", at, "property");
      Element& e = h.elements.back();
      if (tok.size() >= 2 && tok[1] == "list") {
        e.has_list = true;
        continue;
      }
      if (tok.size() != 3) throw ParseError("malformed property line", at, "property");
      const auto t = scalar_type(tok[1]);
      if (!t) throw ParseError("unknown property type '" + std::string(tok[1]) + "'", at, std::string(tok[2]));
      e.props.push_back({std::string(tok[2]), *t, e.stride});
      e.stride += type_size(*t);
    } else {
      throw ParseError("unexpected header keyword '" + std::string(tok[0]) + "'", at, std::string(tok[0]));
    }
  }
  if (!have_format) throw ParseError("missing format line", 0, "format");
  h.data_offset = pos;
  return h;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Mat3 decode_rotation(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  q.normalize();
  return q.toRotationMatrix();
}

namespace {

std::array<float, 4> rounded_quaternion(const Mat3& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {static_cast<float>(q.w()), static_cast<float>(q.x()), static_cast<float>(q.y()),
          static_cast<float>(q.z())};
}

bool survives_decode(const std::array<float, 4>& f) {
  return rounded_quaternion(decode_rotation(f[0], f[1], f[2], f[3])) == f;
}

}  // namespace

std::array<float, 4> encode_rotation(const Mat3& r) {
  const std::array<float, 4> f = rounded_quaternion(r);
  if (survives_decode(f)) return f;
  // Search nearby float quaternions for one the reader maps back to itself,
  // so a decoded rotation re-encodes to the same bytes.
  for (int radius = 1; radius <= 3; ++radius) {
    const int span = 2 * radius + 1;
    std::array<float, 4> best = f;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int code = 0; code < span * span * span * span; ++code) {
      std::array<float, 4> c = f;
      int rest = code;
      for (int i = 0; i < 4; ++i) {
        const int steps = rest % span - radius;
        rest /= span;
        for (int s = 0; s < std::abs(steps); ++s) {
          c[i] = std::nextafter(c[i], steps > 0 ? 2.0f : -2.0f);
        }
      }
      if (c[0] < 0.0f || !survives_decode(c)) continue;
      double dist = 0.0;
      for (int i = 0; i < 4; ++i) dist += std::abs(double(c[i]) - double(f[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    if (best_dist < std::numeric_limits<double>::infinity()) return best;
  }
  return f;
}

float encode_opacity(double opacity) {
  const double logit = std::log(opacity) - std::log1p(-opacity);
  if (std::isnan(logit)) return 0.0f;
  return static_cast<float>(std::clamp(logit, -kOpacityLogitClamp, kOpacityLogitClamp));
}

double decode_opacity(double logit) { return sigmoid(logit); }

RawPly parse_ply_raw(std::string_view bytes) {
  const Header h = parse_header(bytes);

  std::size_t offset = h.data_offset;
  const Element* vertex = nullptr;
  for (const Element& e : h.elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
    if (e.has_list) throw ParseError("list property in element '" + e.name + "' preceding vertex data", offset, e.name);
    offset += e.stride * e.count;
  }
  if (!vertex) throw ParseError("no vertex element", h.data_offset, "vertex");
  if (vertex->has_list) throw ParseError("vertex element may not contain list properties", h.data_offset, "vertex");

  std::map<std::string, const Property*, std::less<>> by_name;
  for (const Property& p : vertex->props) by_name[p.name] = &p;
  auto require = [&](const std::string& name) -> const Property* {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw ParseError("missing required vertex property '" + name + "'", h.data_offset, name);
    }
    return it->second;
  };
  auto optional = [&](const std::string& name) -> const Property* {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : it->second;
  };

  const Property* px = require("x");
  const Property* py = require("y");
  const Property* pz = require("z");
  const Property* pn[3] = {optional("nx"), optional("ny"), optional("nz")};
  const Property* pdc[3] = {require("f_dc_0"), require("f_dc_1"), require("f_dc_2")};
  const Property* pop = require("opacity");
  const Property* ps[3] = {require("scale_0"), require("scale_1"), require("scale_2")};
  const Property* pr[4] = {require("rot_0"), require("rot_1"), require("rot_2"), require("rot_3")};
  std::vector<const Property*> prest;
  for (int i = 0;; ++i) {
    const Property* p = optional("f_rest_" + std::to_string(i));
    if (!p) break;
    prest.push_back(p);
  }

  const std::uint64_t need = static_cast<std::uint64_t>(vertex->stride) * vertex->count;
  if (offset + need > bytes.size()) {
    const std::uint64_t available = bytes.size() > offset ? bytes.size() - offset : 0;
    const std::uint64_t rec = vertex->stride ? available / vertex->stride : 0;
    const std::uint64_t in_rec = vertex->stride ? available % vertex->stride : 0;
    std::string prop = "vertex";
    for (const Property& p : vertex->props) {
      if (p.offset + type_size(p.type) > in_rec) {
        prop = p.name;
        break;
      }
    }
    throw ParseError("truncated payload: vertex " + std::to_string(rec) + " of " +
                         std::to_string(vertex->count) + " is incomplete",
                     bytes.size(), prop);
  }

  RawPly out;
  out.sh_rest_count = static_cast<int>(prest.size());
  out.gaussians.resize(vertex->count);
  for (std::uint64_t i = 0; i < vertex->count; ++i) {
    const std::size_t rec_off = offset + i * vertex->stride;
    const char* rec = bytes.data() + rec_off;
    auto get = [&](const Property* p) { return load_scalar(p->type, rec + p->offset); };
    auto getf = [&](const Property* p) {
      return p->type == ScalarType::f32 ? load<float>(rec + p->offset) : static_cast<float>(get(p));
    };

    Gaussian& g = out.gaussians[i];
    g.mean = Vec3(get(px), get(py), get(pz));
    for (int k = 0; k < 3; ++k) g.normal[k] = pn[k] ? getf(pn[k]) : 0.0f;
    for (int k = 0; k < 3; ++k) g.sh.dc[k] = getf(pdc[k]);
    g.sh.rest.resize(prest.size());
    for (std::size_t k = 0; k < prest.size(); ++k) g.sh.rest[k] = getf(prest[k]);
    g.opacity = decode_opacity(get(pop));
    for (int k = 0; k < 3; ++k) g.scales[k] = std::exp(get(ps[k]));
    const double w = get(pr[0]), x = get(pr[1]), y = get(pr[2]), z = get(pr[3]);
    const double qn = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(qn > 0.0) || !std::isfinite(qn)) {
      throw ParseError("vertex " + std::to_string(i) + " has a zero or non-finite quaternion", rec_off + pr[0]->offset,
                       "rot_0");
    }
    g.rotation = decode_rotation(w, x, y, z);
    if (!g.mean.allFinite()) {
      throw ParseError("vertex " + std::to_string(i) + " has a non-finite position", rec_off + px->offset, "x");
    }
  }
  return out;
}

GaussianScene parse_ply(std::string_view bytes, double eps, std::string source) {
  RawPly raw = parse_ply_raw(bytes);
  GaussianScene scene;
  scene.metadata.source = std::move(source);
  scene.metadata.flatness = eps;
  const int rest = raw.sh_rest_count;
  const int coeffs = rest / 3 + 1;
  const int deg = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coeffs)))) - 1;
  scene.metadata.sh_degree = (rest % 3 == 0 && (deg + 1) * (deg + 1) == coeffs) ? deg : -1;

  const double flat_threshold = std::log(10.0 * eps);
  bool all_flat = !raw.gaussians.empty();
  scene.gaussians.reserve(raw.gaussians.size());
  for (std::size_t i = 0; i < raw.gaussians.size(); ++i) {
    const Gaussian& g = raw.gaussians[i];
    if (std::log(g.scales.minCoeff()) > flat_threshold) all_flat = false;
    scene.gaussians.push_back(flatten(g, eps, i));
  }
  scene.metadata.input_was_flat = all_flat;
  return scene;
}

GaussianScene read_ply(const std::filesystem::path& path, double eps) {
  return parse_ply(read_file(path), eps, path.string());
}

std::string encode_ply(const GaussianScene& scene) {
  const std::size_t rest = scene.gaussians.empty() ? 0 : scene.gaussians.front().sh.rest.size();
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    if (scene.gaussians[i].sh.rest.size() != rest) {
      throw Error("gaussian " + std::to_string(i) + " has " + std::to_string(scene.gaussians[i].sh.rest.size()) +
                  " higher-order SH coefficients, expected " + std::to_string(rest));
    }
  }

  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << scene.gaussians.size() << "\n";
  for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
    header << "property float " << n << "\n";
  }
  for (std::size_t k = 0; k < rest; ++k) header << "property float f_rest_" << k << "\n";
  for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    header << "property float " << n << "\n";
  }
  header << "end_header\n";

  std::string out = header.str();
  const std::size_t floats_per = 17 + rest;
  const std::size_t head = out.size();
  out.resize(head + scene.gaussians.size() * floats_per * sizeof(float));
  char* dst = out.data() + head;
  auto put = [&](float f) {
    std::memcpy(dst, &f, sizeof(float));
    dst += sizeof(float);
  };
  for (const FlatGaussian& g : scene.gaussians) {
    for (int k = 0; k < 3; ++k) put(static_cast<float>(g.mean[k]));
    for (int k = 0; k < 3; ++k) put(g.normal[k]);
    for (int k = 0; k < 3; ++k) put(g.sh.dc[k]);
    for (float f : g.sh.rest) put(f);
    put(encode_opacity(g.opacity));
    for (int k = 0; k < 3; ++k) put(static_cast<float>(std::log(g.scales[k])));
    for (float f : encode_rotation(g.rotation)) put(f);
  }
  return out;
}

void write_ply(const GaussianScene& scene, const std::filesystem::path& path) {
  write_file(path, encode_ply(scene));
}

std::string encode_obj_soup(const GaussianScene& scene) {
  std::string out = "# triangle soup: one face per Gaussian (v1 = mean)\n";
  char buf[64];
  auto put_vertex = [&](const Vec3& v) {
    out += 'v';
    for (int k = 0; k < 3; ++k) {
      out += ' ';
      const auto r = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out.append(buf, r.ptr);
    }
    out += '\n';
  };
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    const SoupTriangle t = gauss_to_triangle(scene.gaussians[i], i);
    put_vertex(t.v1);
    put_vertex(t.v2);
    put_vertex(t.v3);
    const std::size_t b = 3 * i + 1;
    out += "f " + std::to_string(b) + ' ' + std::to_string(b + 1) + ' ' + std::to_string(b + 2) + '\n';
  }
  return out;
}

void write_obj_soup(const GaussianScene& scene, const std::filesystem::path& path) {
  write_file(path, encode_obj_soup(scene));
}

std::vector<SoupTriangle> parse_obj_soup(std::string_view text) {
  std::vector<Vec3> verts;
  std::vector<SoupTriangle> faces;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError("vertex needs three coordinates", line_no, "v");
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        const auto r = std::from_chars(tok[k + 1].data(), tok[k + 1].data() + tok[k + 1].size(), v[k]);
        if (r.ec != std::errc{}) throw ParseError("bad vertex coordinate", line_no, "v");
      }
      verts.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() != 4) throw ParseError("only triangular faces are supported", line_no, "f");
      std::array<Vec3, 3> corner;
      for (int k = 0; k < 3; ++k) {
        // Accept "i", "i/t", "i/t/n" and negative (relative) indices.
        std::string_view s = tok[k + 1];
        s = s.substr(0, s.find('/'));
        long idx = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), idx);
        if (r.ec != std::errc{} || idx == 0) throw ParseError("bad face index", line_no, "f");
        const long resolved = idx > 0 ? idx - 1 : static_cast<long>(verts.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long>(verts.size())) {
          throw ParseError("face index out of range", line_no, "f");
        }
        corner[k] = verts[static_cast<std::size_t>(resolved)];
      }
      SoupTriangle t;
      t.v1 = corner[0];
      t.v2 = corner[1];
      t.v3 = corner[2];
      t.rest_len2 = (t.v2 - t.v1).norm();
      t.rest_len3 = (t.v3 - t.v1).norm();
      t.source_index = faces.size();
      faces.push_back(t);
    }
  }
  return faces;
}

std::vector<SoupTriangle> read_obj_soup(const std::filesystem::path& path) {
  return parse_obj_soup(read_file(path));
}

GaussianScene scene_from_soup(const std::vector<SoupTriangle>& faces, double eps) {
  GaussianScene scene;
  scene.metadata.flatness = eps;
  scene.metadata.input_was_flat = true;
  scene.gaussians.reserve(faces.size());
  for (const SoupTriangle& f : faces) scene.gaussians.push_back(triangle_to_gauss(f, eps));
  return scene;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace gasp::io
