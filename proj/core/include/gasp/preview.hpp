#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "gasp/splat_model.hpp"

namespace gasp::preview {

struct PreviewCamera {
  Vec3 position{0.0, -3.0, 1.0};
  Vec3 look_at = Vec3::Zero();
  Vec3 up = Vec3::UnitZ();
  double fov_y = 45.0;  // degrees
  int width = 256;
  int height = 256;
  std::array<double, 3> background{0.0, 0.0, 0.0};

  /// Throws ConfigError unless fov is in (0, 180), both sizes are >= 16 and
  /// the view direction is well defined.
  void validate() const;
};

/// 8-bit RGB, row-major, top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  std::array<std::uint8_t, 3> at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

/// Low-pass added to every projected 2D covariance, in pixels squared.
inline constexpr double kScreenDilation = 0.3;
inline constexpr double kFootprintSigmas = 3.0;
inline constexpr double kMaxAlpha = 0.99;
inline constexpr double kNearPlane = 0.01;
inline constexpr double kShC0 = 0.28209479177387814;

/// Back-to-front splat compositing of the degree-0 color.
Image render_preview(const GaussianScene& frame, const PreviewCamera& cam);

void write_png(const Image& image, const std::filesystem::path& path);

/// `[camera]` table: position, look_at, up, fov, width, height, background.
PreviewCamera parse_camera_config(std::string_view text);
PreviewCamera read_camera_config(const std::filesystem::path& path);

}  // namespace gasp::preview
