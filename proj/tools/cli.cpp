#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gasp/error.hpp"
#include "gasp/frame_io.hpp"
#include "gasp/pipeline.hpp"
#include "gasp/ply.hpp"
#include "gasp/preview.hpp"
#include "gasp/scene_config.hpp"
#include "gasp/synth.hpp"

namespace gasp::cli {

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  fs::path scene;
  fs::path out;
  std::optional<double> alpha;
  bool deterministic = false;
  std::string kernel;
  bool no_correction = false;
};

struct ConvertArgs {
  fs::path in;
  fs::path out;
  double flatness = kDefaultFlatness;
};

struct PreviewArgs {
  fs::path frames;
  fs::path camera;
  fs::path out;
};

struct SynthArgs {
  std::string kind = "blob";
  std::size_t count = 1000;
  double radius = 0.25;
  int lattice = 8;
  std::uint64_t seed = 1;
  std::vector<double> center{0.0, 0.0, 0.0};
  fs::path out;
};

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

SceneConfig load_scene(const fs::path& path) { return io::read_scene_config(path); }

int do_validate(const fs::path& scene_path, std::ostream& out, std::ostream& err) {
  const SceneConfig scene = load_scene(scene_path);
  const BoundState bound = gasp::bind(scene, load_assets(scene));
  for (const auto& w : bound.warnings) err << "warning: " << w << '\n';
  const mpm::SimGrid grid = make_grid(scene, bound);
  const auto& r = grid.resolution();
  out << "scene: " << scene_path.string() << '\n'
      << "objects: " << scene.objects.size() << '\n'
      << "gaussians: " << bound.rest_scene.size() << " (simulated " << bound.simulated_count() << ", static "
      << bound.static_count() << ")\n"
      << "particles: " << bound.particles.size() << '\n'
      << "grid: " << r.x() << "x" << r.y() << "x" << r.z() << " nodes (" << grid.node_count()
      << "), cell size " << grid.cell_size() << '\n'
      << "frames: " << scene.frame_count() << " at " << scene.frame_rate << " fps\n";
  return kOk;
}

int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SceneConfig scene = load_scene(a.scene);
  if (a.alpha) scene.correction.alpha = *a.alpha;
  if (a.no_correction) scene.correction.enabled = false;
  if (a.deterministic) scene.deterministic = true;
  if (a.kernel == "cubic") scene.kernel = mpm::KernelDegree::cubic;
  if (a.kernel == "quadratic") scene.kernel = mpm::KernelDegree::quadratic;
  scene.validate();

  const BoundState bound = gasp::bind(scene, load_assets(scene));
  for (const auto& w : bound.warnings) err << "warning: " << w << '\n';

  const fs::path dir = a.out.empty() ? scene.base_dir / scene.output.directory : a.out;
  io::FrameWriter writer(dir, io::FrameFormats{scene.output.ply, scene.output.obj});
  MpmDeformation deform(bound, scene, [&err](const std::string& w) { err << "warning: " << w << '\n'; });
  try {
    const std::size_t n = run(bound, scene, deform, [&writer](const FrameResult& f) { writer.write(f); });
    const FrameDiagnostics d = deform.diagnostics();
    out << "wrote " << n << " frames to " << dir.string() << " (" << d.steps << " solver steps, " << d.escaped
        << " escaped particles)\n";
  } catch (const RunError& e) {
    err << "error: " << e.what() << '\n';
    if (auto k = e.last_good_frame()) {
      err << "last good frame: " << *k << '\n';
    } else {
      err << "no frames were written\n";
    }
    return kRuntimeError;
  }
  return kOk;
}

int do_convert(const ConvertArgs& a, std::ostream& out) {
  const std::string in_ext = lower_ext(a.in);
  const std::string out_ext = lower_ext(a.out);
  GaussianScene scene;
  if (in_ext == ".ply") {
    scene = io::read_ply(a.in, a.flatness);
  } else if (in_ext == ".obj") {
    scene = io::scene_from_soup(io::read_obj_soup(a.in), a.flatness);
  } else {
    throw ConfigError("convert: input must be .ply or .obj, got '" + a.in.string() + "'");
  }
  if (out_ext == ".ply") {
    io::write_ply(scene, a.out);
  } else if (out_ext == ".obj") {
    io::write_obj_soup(scene, a.out);
  } else {
    throw ConfigError("convert: output must be .ply or .obj, got '" + a.out.string() + "'");
  }
  out << "converted " << scene.size() << " Gaussians: " << a.in.string() << " -> " << a.out.string() << '\n';
  return kOk;
}

int do_preview(const PreviewArgs& a, std::ostream& out) {
  const preview::PreviewCamera cam = preview::read_camera_config(a.camera);
  std::vector<fs::path> inputs;
  if (fs::is_directory(a.frames)) {
    for (const auto& e : fs::directory_iterator(a.frames)) {
      if (e.is_regular_file() && lower_ext(e.path()) == ".ply") inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());
  } else if (fs::is_regular_file(a.frames)) {
    inputs.push_back(a.frames);
  } else {
    throw ConfigError("preview: '" + a.frames.string() + "' is neither a directory nor a file");
  }
  if (inputs.empty()) throw ConfigError("preview: no .ply frames in '" + a.frames.string() + "'");
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create '" + a.out.string() + "': " + ec.message());
  for (const fs::path& p : inputs) {
    const GaussianScene frame = io::read_ply(p);
    fs::path png = a.out / p.filename();
    png.replace_extension(".png");
    preview::write_png(preview::render_preview(frame, cam), png);
  }
  out << "rendered " << inputs.size() << " images to " << a.out.string() << '\n';
  return kOk;
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  if (a.center.size() != 3) throw ConfigError("synth: --center takes three numbers");
  const Vec3 c(a.center[0], a.center[1], a.center[2]);
  GaussianScene scene;
  if (a.kind == "blob") {
    scene = synth::blob(a.count, a.radius, a.seed);
    for (auto& g : scene.gaussians) g.mean += c;
  } else {
    scene = synth::cube_lattice(a.lattice, 2.0 * a.radius, c);
  }
  io::write_ply(scene, a.out);
  out << "wrote " << scene.size() << " Gaussians to " << a.out.string() << '\n';
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-driven animation of flat Gaussian splatting scenes"};
  app.name("gasp");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scene and write frames");
  simulate->add_option("--scene", sim.scene, "Scene config (TOML)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory (default: output.directory of the scene)");
  simulate->add_option("--alpha", sim.alpha, "Correction factor, > 1");
  simulate->add_flag("--no-correction", sim.no_correction, "Disable scale clipping");
  simulate->add_flag("--deterministic", sim.deterministic, "Serial, order-fixed particle-to-grid transfer");
  simulate->add_option("--kernel", sim.kernel, "Interpolation kernel")->check(CLI::IsMember({"cubic", "quadratic"}));

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Convert between Gaussian PLY and triangle-soup OBJ");
  convert->add_option("--in", conv.in, "Input .ply or .obj")->required()->check(CLI::ExistingFile);
  convert->add_option("--out", conv.out, "Output .ply or .obj")->required();
  convert->add_option("--flatness", conv.flatness, "Pinned smallest scale")->check(CLI::PositiveNumber);

  fs::path validate_scene;
  auto* validate = app.add_subcommand("validate", "Parse a scene and bind it without stepping");
  validate->add_option("--scene", validate_scene, "Scene config (TOML)")->required()->check(CLI::ExistingFile);

  PreviewArgs prev;
  auto* preview_cmd = app.add_subcommand("preview", "Render PNG quick-look images of frames");
  preview_cmd->add_option("--frames", prev.frames, "Frame directory or single .ply")->required();
  preview_cmd->add_option("--camera", prev.camera, "Camera config (TOML)")->required()->check(CLI::ExistingFile);
  preview_cmd->add_option("--out", prev.out, "Image directory")->required();

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Write a procedural Gaussian asset");
  synth_cmd->add_option("--kind", syn.kind, "blob or cube")->check(CLI::IsMember({"blob", "cube"}));
  synth_cmd->add_option("--count", syn.count, "Blob Gaussian count");
  synth_cmd->add_option("--lattice", syn.lattice, "Cube Gaussians per edge")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--radius", syn.radius, "Blob radius or cube half edge")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", syn.seed, "Random seed");
  synth_cmd->add_option("--center", syn.center, "Center x y z")->expected(3);
  synth_cmd->add_option("--out", syn.out, "Output .ply")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (*simulate) return do_simulate(sim, out, err);
    if (*convert) return do_convert(conv, out);
    if (*validate) return do_validate(validate_scene, out, err);
    if (*preview_cmd) return do_preview(prev, out);
    if (*synth_cmd) return do_synth(syn, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace gasp::cli
