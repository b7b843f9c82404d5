#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gasp/splat_model.hpp"

namespace gasp::io {

/// Splatting checkpoint layout, binary little-endian, one `vertex` element.
/// Properties are written in this order, all float32:
///
///   x y z nx ny nz f_dc_0 f_dc_1 f_dc_2 f_rest_0 .. f_rest_{K-1}
///   opacity scale_0 scale_1 scale_2 rot_0 rot_1 rot_2 rot_3
///
/// Opacity is stored as a logit, scales as natural logs and the rotation
/// as a (w, x, y, z) quaternion with w >= 0.
inline constexpr double kOpacityLogitClamp = 15.0;

/// Decoded records before flattening.
struct RawPly {
  std::vector<Gaussian> gaussians;
  int sh_rest_count = 0;
};

RawPly parse_ply_raw(std::string_view bytes);

/// Reads a checkpoint, decodes every record and flattens it. Throws
/// ParseError (with byte offset and property) or IoError.
GaussianScene read_ply(const std::filesystem::path& path, double eps = kDefaultFlatness);
GaussianScene parse_ply(std::string_view bytes, double eps = kDefaultFlatness,
                        std::string source = {});

/// Encoded file contents. Throws Error if Gaussians disagree on SH count.
std::string encode_ply(const GaussianScene& scene);
void write_ply(const GaussianScene& scene, const std::filesystem::path& path);

/// Quaternion (w, x, y, z) stored for a rotation; chosen so that decoding
/// and re-encoding reproduces the same float32 values.
std::array<float, 4> encode_rotation(const Mat3& r);
Mat3 decode_rotation(double w, double x, double y, double z);

float encode_opacity(double opacity);
double decode_opacity(double logit);

/// Triangle soup as Wavefront OBJ: three `v` lines and one `f` line per
/// Gaussian, with shortest round-trip decimal coordinates.
std::string encode_obj_soup(const GaussianScene& scene);
void write_obj_soup(const GaussianScene& scene, const std::filesystem::path& path);

/// Faces from an OBJ file; only `v` and triangular `f` records are used.
std::vector<SoupTriangle> parse_obj_soup(std::string_view text);
std::vector<SoupTriangle> read_obj_soup(const std::filesystem::path& path);

/// Gaussians from soup faces; opacity 1 and zero color (OBJ carries neither).
GaussianScene scene_from_soup(const std::vector<SoupTriangle>& faces, double eps = kDefaultFlatness);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace gasp::io
