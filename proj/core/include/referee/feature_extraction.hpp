#pragma once

#include <cstdint>

#include "referee/scan.hpp"

namespace referee {

struct FeatureConfig {
  int smooth_window = 17;      // odd, <= range bins
  double z_score = 3.0;        // > 0
  double min_intensity = 0.08; // in [0, 1]
};

// Per-azimuth-row decomposition: low = moving average (window shrinks at the
// row ends), high = row - low, sigma = sqrt(mean(min(high, 0)^2)) over the
// row. A pixel is a feature iff high > z_score * sigma and the raw intensity
// exceeds min_intensity.
FeatureImage extract_features(const RadarScan& scan, const FeatureConfig& cfg);

// Pixels that are not features.
std::int64_t count_free_space(const FeatureImage& fi);

}  // namespace referee
