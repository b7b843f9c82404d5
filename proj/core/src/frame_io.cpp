#include "gasp/frame_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gasp/ply.hpp"

namespace gasp::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string frame_file_name(std::size_t index, const std::string& extension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.", index);
  return buf + extension;
}

std::string manifest_record(const FrameResult& frame, const std::string& file) {
  const FrameDiagnostics& d = frame.diagnostics;
  json j;
  j["frame"] = frame.index;
  j["time"] = frame.time;
  j["mass"] = d.mass;
  j["momentum"] = {d.momentum.x(), d.momentum.y(), d.momentum.z()};
  j["max_speed"] = d.max_speed;
  j["escaped"] = d.escaped;
  j["steps"] = d.steps;
  j["gaussians"] = frame.scene.size();
  j["clipped"] = frame.clipped;
  j["degenerate"] = frame.degenerate;
  j["file"] = file;
  return j.dump();
}

FrameWriter::FrameWriter(fs::path directory, FrameFormats formats)
    : dir_(std::move(directory)), formats_(formats) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  std::ofstream manifest(dir_ / kManifestName, std::ios::binary | std::ios::trunc);
  if (!manifest) throw IoError("cannot create '" + (dir_ / kManifestName).string() + "'");
}

void FrameWriter::write(const FrameResult& frame) {
  auto fail = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "failed to write frame " << frame.index << ": " << why << "; completed frames:";
    if (completed_.empty()) msg << " none";
    for (std::size_t k : completed_) msg << ' ' << k;
    throw PartialOutputError(msg.str(), completed_);
  };
  std::string primary;
  try {
    if (formats_.ply) {
      primary = frame_file_name(frame.index, "ply");
      write_ply(frame.scene, dir_ / primary);
    }
    if (formats_.obj) {
      const std::string obj = frame_file_name(frame.index, "obj");
      write_obj_soup(frame.scene, dir_ / obj);
      if (primary.empty()) primary = obj;
    }
  } catch (const Error& e) {
    fail(e.what());
  }
  std::ofstream manifest(dir_ / kManifestName, std::ios::binary | std::ios::app);
  manifest << manifest_record(frame, primary) << '\n';
  manifest.flush();
  if (!manifest) fail("manifest append failed");
  completed_.push_back(frame.index);
}

void write_frame_sequence(const std::vector<FrameResult>& frames, const fs::path& directory,
                          FrameFormats formats) {
  FrameWriter writer(directory, formats);
  for (const FrameResult& f : frames) writer.write(f);
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ManifestRow r;
      r.frame = j.at("frame").get<std::size_t>();
      r.time = j.at("time").get<double>();
      r.mass = j.at("mass").get<double>();
      const auto& m = j.at("momentum");
      r.momentum = Vec3(m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>());
      r.max_speed = j.at("max_speed").get<double>();
      r.escaped = j.at("escaped").get<std::size_t>();
      r.gaussians = j.at("gaussians").get<std::size_t>();
      r.file = j.at("file").get<std::string>();
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return rows;
}

}  // namespace gasp::io
