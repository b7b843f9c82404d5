#pragma once

#include <cstddef>
#include <cstdint>

#include "gasp/splat_model.hpp"

namespace gasp::synth {

/// Roughly uniform cloud of flat Gaussians inside a ball, with random
/// orientations and colors. Same seed, same scene.
GaussianScene blob(std::size_t count, double radius, std::uint64_t seed, double eps = kDefaultFlatness);

/// n x n x n lattice of axis-aligned discs filling a cube of edge `side`
/// centered at `center`; in-plane scales are a third of the spacing.
GaussianScene cube_lattice(int n, double side, const Vec3& center = Vec3::Zero(),
                           double eps = kDefaultFlatness);

}  // namespace gasp::synth
