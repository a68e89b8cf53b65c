#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "referee/scan.hpp"

namespace referee {

// beta = 0 resolves to W / 42 when 42 divides W (the descriptor then has 42
// range blocks); any other non-divisible choice is a configuration error.
struct DescriptorConfig {
  Eigen::Index beta = 0;   // range-wise block width, bins
  Eigen::Index alpha = 1;  // angle-wise block height, rows
};

Eigen::Index resolve_beta(const DescriptorConfig& cfg, Eigen::Index range_bins);

// Range-wise free-space histogram: element k counts free pixels with column
// in [k*beta, (k+1)*beta) over all rows. Invariant under any cyclic row shift.
Eigen::VectorXf r_referee(const FeatureImage& fi, const DescriptorConfig& cfg);

// Angle-wise free-space profile: per row, free pixels are counted only up to
// the farthest feature of that row (rows without features contribute zero),
// then summed over alpha-row blocks. With alpha = 1, cyclically shifting the
// mask rows shifts this vector identically.
Eigen::VectorXf a_referee(const FeatureImage& fi, const DescriptorConfig& cfg);

struct ConfusionCounts {
  std::int64_t fp_feature = 0;  // ground-truth free, predicted feature
  std::int64_t fn_feature = 0;  // ground-truth feature, predicted free
  std::int64_t fp_free = 0;     // ground-truth feature, predicted free
  std::int64_t fn_free = 0;     // ground-truth free, predicted feature
};

// Counts both views of the same misclassifications; by construction
// fp_feature + fn_feature == fn_free + fp_free.
ConfusionCounts confusion_duality(const FeatureImage& gt, const FeatureImage& pred);

// One descriptor database row; config_hash ties it to the parameters that
// produced it.
struct DescriptorRecord {
  std::int64_t scan_id = 0;
  Eigen::VectorXf r_referee;
  Eigen::VectorXf a_referee;
  std::uint64_t config_hash = 0;
};

}  // namespace referee
