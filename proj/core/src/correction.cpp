#include "gasp/correction.hpp"

#include <algorithm>
#include <string>

#include "gasp/error.hpp"

namespace gasp {

void CorrectionConfig::validate() const {
  if (!(alpha > 1.0)) {
    throw ConfigError("correction.alpha must be greater than 1 (got " + std::to_string(alpha) + ")");
  }
}

void clip_scales(FlatGaussian& g, const SoupTriangle& t, const CorrectionConfig& cfg) noexcept {
  if (!cfg.enabled) return;
  const double limit2 = cfg.alpha * t.rest_len2;
  const double limit3 = cfg.alpha * t.rest_len3;
  // Never enlarge: for sheared faces s3 is the residual, shorter than |v3 - v1|.
  if ((t.v2 - t.v1).norm() > limit2) g.scales[1] = std::min(g.scales[1], limit2);
  if ((t.v3 - t.v1).norm() > limit3) g.scales[2] = std::min(g.scales[2], limit3);
}

FlatGaussian apply_scale_clip(const SoupTriangle& t, const CorrectionConfig& cfg, double eps) {
  FlatGaussian g = triangle_to_gauss(t, eps);
  clip_scales(g, t, cfg);
  return g;
}

FlatGaussian apply_scale_clip_or(const SoupTriangle& t, const CorrectionConfig& cfg, double eps,
                                 const FlatGaussian& previous) {
  FlatGaussian g = triangle_to_gauss_or(t, eps, previous);
  clip_scales(g, t, cfg);
  return g;
}

}  // namespace gasp
