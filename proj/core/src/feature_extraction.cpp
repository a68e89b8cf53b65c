#include "referee/feature_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "referee/errors.hpp"

namespace referee {

namespace {

void validate(const RadarScan& scan, const FeatureConfig& cfg) {
  if (scan.intensities.rows() < 1 || scan.intensities.cols() < 1)
    throw ValidationError("extract_features: empty scan");
  if (cfg.smooth_window < 1 || cfg.smooth_window % 2 == 0)
    throw ValidationError("extract_features: smooth_window must be odd and positive");
  if (cfg.smooth_window > scan.intensities.cols())
    throw ValidationError("extract_features: smooth_window exceeds range bin count");
  if (cfg.z_score <= 0.0)
    throw ValidationError("extract_features: z_score must be positive");
  if (cfg.min_intensity < 0.0 || cfg.min_intensity > 1.0)
    throw ValidationError("extract_features: min_intensity must be in [0, 1]");
}

}  // namespace

FeatureImage extract_features(const RadarScan& scan, const FeatureConfig& cfg) {
  validate(scan, cfg);
  const Eigen::Index h = scan.intensities.rows();
  const Eigen::Index w = scan.intensities.cols();
  const Eigen::Index half = cfg.smooth_window / 2;

  FeatureImage fi;
  fi.scan_id = scan.scan_id;
  fi.mask = MaskXb::Constant(h, w, false);

  std::vector<double> prefix(static_cast<std::size_t>(w) + 1);
  std::vector<double> high(static_cast<std::size_t>(w));

  for (Eigen::Index i = 0; i < h; ++i) {
    prefix[0] = 0.0;
    for (Eigen::Index j = 0; j < w; ++j)
      prefix[j + 1] = prefix[j] + static_cast<double>(scan.intensities(i, j));

    double neg_sq_sum = 0.0;
    for (Eigen::Index j = 0; j < w; ++j) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, j - half);
      const Eigen::Index hi = std::min<Eigen::Index>(w - 1, j + half);
      const double low = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
      high[j] = static_cast<double>(scan.intensities(i, j)) - low;
      const double neg = std::min(high[j], 0.0);
      neg_sq_sum += neg * neg;
    }

    double sigma = std::sqrt(neg_sq_sum / static_cast<double>(w));
    if (sigma == 0.0) sigma = std::numeric_limits<double>::epsilon();

    const double gate = cfg.z_score * sigma;
    for (Eigen::Index j = 0; j < w; ++j) {
      if (high[j] > gate && static_cast<double>(scan.intensities(i, j)) > cfg.min_intensity)
        fi.mask(i, j) = true;
    }
  }
  return fi;
}

std::int64_t count_free_space(const FeatureImage& fi) {
  return static_cast<std::int64_t>(fi.mask.size()) - fi.feature_count();
}

}  // namespace referee
