#include "gasp/preview.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <tuple>

#include <png.h>

#include "gasp/error.hpp"
#include "gasp/ply.hpp"
#include "toml_reader.hpp"

namespace gasp::preview {

void PreviewCamera::validate() const {
  if (!(fov_y > 0.0 && fov_y < 180.0)) throw ConfigError("camera.fov must lie in (0, 180) degrees");
  if (width < 16 || height < 16) throw ConfigError("camera.width and camera.height must be at least 16");
  if (!position.allFinite() || !look_at.allFinite() || !up.allFinite()) {
    throw ConfigError("camera vectors must be finite");
  }
  const Vec3 f = look_at - position;
  if (!(f.norm() > 0.0)) throw ConfigError("camera.look_at must differ from camera.position");
  if (!(f.normalized().cross(up).norm() > 1e-9)) throw ConfigError("camera.up must not be parallel to the view direction");
  for (double c : background) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("camera.background components must lie in [0, 1]");
  }
}

namespace {

struct Splat {
  double depth;
  double u, v;           // pixel coordinates of the center
  double ca, cb, cc;     // inverse 2D covariance [[ca, cb], [cb, cc]]
  double radius;         // footprint half-width in pixels
  double opacity;
  std::array<double, 3> color;

  auto key() const { return std::tie(depth, u, v, ca, cb, cc, opacity, color[0], color[1], color[2]); }
};

}  // namespace

Image render_preview(const GaussianScene& frame, const PreviewCamera& cam) {
  cam.validate();
  const Vec3 fwd = (cam.look_at - cam.position).normalized();
  const Vec3 right = fwd.cross(cam.up).normalized();
  const Vec3 upv = right.cross(fwd);
  Mat3 W;
  W.row(0) = right.transpose();
  W.row(1) = upv.transpose();
  W.row(2) = fwd.transpose();

  const double fy = 0.5 * cam.height / std::tan(0.5 * cam.fov_y * std::numbers::pi / 180.0);
  const double fx = fy;
  const double cx = 0.5 * cam.width;
  const double cy = 0.5 * cam.height;

  std::vector<Splat> splats;
  splats.reserve(frame.size());
  for (const FlatGaussian& g : frame.gaussians) {
    const Vec3 p = W * (g.mean - cam.position);
    if (!(p.z() > kNearPlane) || !p.allFinite()) continue;
    const double z = p.z();
    Eigen::Matrix<double, 2, 3> J;
    J << fx / z, 0.0, -fx * p.x() / (z * z),
         0.0, -fy / z, fy * p.y() / (z * z);
    const Mat3 cov = covariance_of(g);
    Eigen::Matrix2d s = J * W * cov * W.transpose() * J.transpose();
    s(0, 0) += kScreenDilation;
    s(1, 1) += kScreenDilation;
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    if (!(det > 0.0) || !std::isfinite(det)) continue;
    Splat sp;
    sp.depth = z;
    sp.u = cx + fx * p.x() / z;
    sp.v = cy - fy * p.y() / z;
    sp.ca = s(1, 1) / det;
    sp.cb = -0.5 * (s(0, 1) + s(1, 0)) / det;
    sp.cc = s(0, 0) / det;
    const double mid = 0.5 * (s(0, 0) + s(1, 1));
    const double lmax = mid + std::sqrt(std::max(0.0, mid * mid - det));
    sp.radius = kFootprintSigmas * std::sqrt(lmax);
    sp.opacity = g.opacity;
    for (int c = 0; c < 3; ++c) sp.color[c] = std::clamp(kShC0 * g.sh.dc[c] + 0.5, 0.0, 1.0);
    if (!std::isfinite(sp.u) || !std::isfinite(sp.v) || !std::isfinite(sp.radius)) continue;
    splats.push_back(sp);
  }
  // Farthest first; the full key makes the order independent of input order.
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) { return a.key() > b.key(); });

  const int w = cam.width;
  const int h = cam.height;
  std::vector<double> accum(3 * static_cast<std::size_t>(w) * h);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double* row = accum.data() + 3 * static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) row[3 * x + c] = cam.background[c];
    }
    const double py = y + 0.5;
    for (const Splat& sp : splats) {
      if (py < sp.v - sp.radius || py > sp.v + sp.radius) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(sp.u - sp.radius)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(sp.u + sp.radius)));
      const double dy = py - sp.v;
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - sp.u;
        const double d2 = sp.ca * dx * dx + 2.0 * sp.cb * dx * dy + sp.cc * dy * dy;
        if (d2 > kFootprintSigmas * kFootprintSigmas) continue;
        const double a = std::min(kMaxAlpha, sp.opacity * std::exp(-0.5 * d2));
        for (int c = 0; c < 3; ++c) row[3 * x + c] = a * sp.color[c] + (1.0 - a) * row[3 * x + c];
      }
    }
  }

  Image img;
  img.width = w;
  img.height = h;
  img.rgb.resize(accum.size());
  for (std::size_t i = 0; i < accum.size(); ++i) {
    img.rgb[i] = static_cast<std::uint8_t>(std::lround(std::clamp(accum[i], 0.0, 1.0) * 255.0));
  }
  return img;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, image.rgb.data() + 3 * static_cast<std::size_t>(y) * image.width);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PreviewCamera parse_camera_config(std::string_view text) {
  const toml::table root = io::detail::parse_toml(text, "camera");
  io::detail::Reader top(root, "");
  PreviewCamera cam;
  const toml::table* t = top.table("camera");
  top.finish();
  if (!t) throw ConfigError("camera: missing [camera] table");
  io::detail::Reader r(*t, "camera");
  cam.position = r.vector<3>("position").value_or(cam.position);
  cam.look_at = r.vector<3>("look_at").value_or(cam.look_at);
  cam.up = r.vector<3>("up").value_or(cam.up);
  cam.fov_y = r.number("fov").value_or(cam.fov_y);
  cam.width = static_cast<int>(r.integer("width").value_or(cam.width));
  cam.height = static_cast<int>(r.integer("height").value_or(cam.height));
  if (auto bg = r.vector<3>("background")) cam.background = {(*bg)[0], (*bg)[1], (*bg)[2]};
  r.finish();
  cam.validate();
  return cam;
}

PreviewCamera read_camera_config(const std::filesystem::path& path) {
  return parse_camera_config(io::read_file(path));
}

}  // namespace gasp::preview
