#include "referee/descriptor.hpp"

#include <string>

#include "referee/errors.hpp"

namespace referee {

Eigen::Index resolve_beta(const DescriptorConfig& cfg, Eigen::Index range_bins) {
  Eigen::Index beta = cfg.beta;
  if (beta == 0) {
    if (range_bins % 42 != 0)
      throw ValidationError("descriptor: beta=0 needs 42 | range_bins, got " +
                            std::to_string(range_bins) + "; set beta explicitly");
    beta = range_bins / 42;
  }
  if (beta < 1 || range_bins % beta != 0)
    throw ValidationError("descriptor: beta " + std::to_string(beta) +
                          " must divide range bin count " + std::to_string(range_bins));
  return beta;
}

namespace {

Eigen::Index checked_alpha(const DescriptorConfig& cfg, Eigen::Index rows) {
  if (cfg.alpha < 1 || rows % cfg.alpha != 0)
    throw ValidationError("descriptor: alpha " + std::to_string(cfg.alpha) +
                          " must divide azimuth count " + std::to_string(rows));
  return cfg.alpha;
}

}  // namespace

Eigen::VectorXf r_referee(const FeatureImage& fi, const DescriptorConfig& cfg) {
  const Eigen::Index beta = resolve_beta(cfg, fi.cols());
  const Eigen::Index n_w = fi.cols() / beta;
  Eigen::VectorXf values = Eigen::VectorXf::Zero(n_w);
  for (Eigen::Index k = 0; k < n_w; ++k) {
    std::int64_t features = fi.mask.block(0, k * beta, fi.rows(), beta).count();
    values[k] = static_cast<float>(fi.rows() * beta - features);
  }
  return values;
}

Eigen::VectorXf a_referee(const FeatureImage& fi, const DescriptorConfig& cfg) {
  const Eigen::Index alpha = checked_alpha(cfg, fi.rows());
  const Eigen::Index n_h = fi.rows() / alpha;
  Eigen::VectorXf values = Eigen::VectorXf::Zero(n_h);
  for (Eigen::Index i = 0; i < fi.rows(); ++i) {
    Eigen::Index farthest = -1;  // 0-based column of the last feature
    for (Eigen::Index j = fi.cols() - 1; j >= 0; --j) {
      if (fi.mask(i, j)) {
        farthest = j;
        break;
      }
    }
    if (farthest < 0) continue;
    std::int64_t features_before = 0;
    for (Eigen::Index j = 0; j <= farthest; ++j) features_before += fi.mask(i, j) ? 1 : 0;
    values[i / alpha] += static_cast<float>((farthest + 1) - features_before);
  }
  return values;
}

ConfusionCounts confusion_duality(const FeatureImage& gt, const FeatureImage& pred) {
  if (gt.rows() != pred.rows() || gt.cols() != pred.cols())
    throw ValidationError("confusion_duality: shape mismatch");
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < gt.rows(); ++i) {
    for (Eigen::Index j = 0; j < gt.cols(); ++j) {
      const bool g = gt.mask(i, j), p = pred.mask(i, j);
      if (g && !p) {
        ++c.fn_feature;  // missed feature is also a spurious free-space call
        ++c.fp_free;
      } else if (!g && p) {
        ++c.fp_feature;  // spurious feature is also a missed free space
        ++c.fn_free;
      }
    }
  }
  return c;
}

}  // namespace referee
