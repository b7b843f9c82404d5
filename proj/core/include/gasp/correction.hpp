#pragma once

#include "gasp/splat_model.hpp"

namespace gasp {

/// Scale clipping for stretched faces. A face edge longer than `alpha` times
/// its bound length has the matching in-plane scale capped at that limit.
struct CorrectionConfig {
  double alpha = 2.0;
  bool enabled = true;

  /// Throws ConfigError unless alpha > 1.
  void validate() const;
};

/// Reconstructs a Gaussian from a deformed face and clips s2/s3 to
/// alpha * rest length. Mean and rotation are those of the plain
/// reconstruction. Degenerate faces raise DegenerateError.
FlatGaussian apply_scale_clip(const SoupTriangle& t, const CorrectionConfig& cfg,
                              double eps = kDefaultFlatness);

/// As apply_scale_clip, but degenerate faces fall back to `previous`'s rotation.
FlatGaussian apply_scale_clip_or(const SoupTriangle& t, const CorrectionConfig& cfg, double eps,
                                 const FlatGaussian& previous);

/// Clip rule on an already reconstructed Gaussian.
void clip_scales(FlatGaussian& g, const SoupTriangle& t, const CorrectionConfig& cfg) noexcept;

}  // namespace gasp
