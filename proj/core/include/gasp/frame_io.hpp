#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gasp/error.hpp"
#include "gasp/pipeline.hpp"

namespace gasp::io {

struct FrameFormats {
  bool ply = true;
  bool obj = false;
};

/// "frame_00042.ply" style names.
std::string frame_file_name(std::size_t index, const std::string& extension);

inline constexpr const char* kManifestName = "manifest.jsonl";

/// One manifest line (no trailing newline): frame, time, mass, momentum,
/// max_speed, escaped, steps, gaussians, clipped, degenerate, file.
std::string manifest_record(const FrameResult& frame, const std::string& file);

/// Raised when a frame could not be written; earlier frames stay on disk.
class PartialOutputError : public IoError {
 public:
  PartialOutputError(const std::string& what, std::vector<std::size_t> completed)
      : IoError(what), completed_(std::move(completed)) {}
  const std::vector<std::size_t>& completed() const noexcept { return completed_; }

 private:
  std::vector<std::size_t> completed_;
};

/// Frame sink writing files into `directory` (created if needed) and
/// appending to the manifest after each frame's files are complete.
class FrameWriter {
 public:
  FrameWriter(std::filesystem::path directory, FrameFormats formats);

  void write(const FrameResult& frame);
  void operator()(const FrameResult& frame) { write(frame); }

  const std::vector<std::size_t>& completed() const noexcept { return completed_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  FrameFormats formats_;
  std::vector<std::size_t> completed_;
};

void write_frame_sequence(const std::vector<FrameResult>& frames, const std::filesystem::path& directory,
                          FrameFormats formats = {});

/// Manifest lines parsed back into (frame, time, mass) rows.
struct ManifestRow {
  std::size_t frame = 0;
  double time = 0.0;
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double max_speed = 0.0;
  std::size_t escaped = 0;
  std::size_t gaussians = 0;
  std::string file;
};
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

}  // namespace gasp::io
