#include "gasp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "gasp/error.hpp"

namespace gasp::synth {

namespace {

// std::uniform_real_distribution is implementation defined; this mapping
// keeps generated assets identical across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GaussianScene blob(std::size_t count, double radius, std::uint64_t seed, double eps) {
  if (!(radius > 0.0)) throw ConfigError("blob radius must be positive");
  std::mt19937_64 rng(seed);
  GaussianScene scene;
  scene.metadata.source = "synth:blob";
  scene.metadata.flatness = eps;
  scene.gaussians.reserve(count);
  const double disc = radius * 1.2 / std::cbrt(static_cast<double>(std::max<std::size_t>(count, 1)));
  while (scene.gaussians.size() < count) {
    const Vec3 p(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    if (p.squaredNorm() > 1.0) continue;
    Eigen::Quaterniond q(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
    if (q.norm() < 1e-3) continue;
    q.normalize();
    FlatGaussian g;
    g.mean = radius * p;
    g.rotation = q.toRotationMatrix();
    g.scales = Vec3(eps, disc * (0.5 + unit(rng)), disc * (0.5 + unit(rng)));
    g.opacity = 0.6 + 0.35 * unit(rng);
    for (float& c : g.sh.dc) c = static_cast<float>(2.0 * unit(rng) - 1.0);
    const Vec3 n = g.rotation.col(0);
    g.normal = {static_cast<float>(n.x()), static_cast<float>(n.y()), static_cast<float>(n.z())};
    scene.gaussians.push_back(g);
  }
  return scene;
}

GaussianScene cube_lattice(int n, double side, const Vec3& center, double eps) {
  if (n < 1 || !(side > 0.0)) throw ConfigError("cube lattice needs n >= 1 and a positive side");
  GaussianScene scene;
  scene.metadata.source = "synth:cube";
  scene.metadata.flatness = eps;
  const double spacing = side / n;
  const Vec3 lo = center - Vec3::Constant(0.5 * side);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        FlatGaussian g;
        g.mean = lo + spacing * Vec3(i + 0.5, j + 0.5, k + 0.5);
        g.rotation = Mat3::Identity();
        g.scales = Vec3(eps, spacing / 3.0, spacing / 3.0);
        g.opacity = 0.9;
        g.sh.dc = {0.5f, 0.5f, 0.5f};
        g.normal = {1.0f, 0.0f, 0.0f};
        scene.gaussians.push_back(g);
      }
    }
  }
  return scene;
}

}  // namespace gasp::synth
