#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace referee {

using MatrixXfR = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskXb = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Polar radar intensity image. Row i covers azimuth (i + 0.5) * 2pi / rows()
// (CCW from +x), column j covers range (j + 0.5) * range_resolution meters.
// Intensities are normalized to [0, 1].
struct RadarScan {
  MatrixXfR intensities;
  double range_resolution = 1.0;  // meters per bin, > 0
  double timestamp = 0.0;         // seconds
  std::int64_t scan_id = 0;

  Eigen::Index azimuth_count() const { return intensities.rows(); }
  Eigen::Index range_bins() const { return intensities.cols(); }
};

// Boolean companion of a RadarScan: true = feature return, false = free space.
struct FeatureImage {
  MaskXb mask;
  std::int64_t scan_id = 0;

  Eigen::Index rows() const { return mask.rows(); }
  Eigen::Index cols() const { return mask.cols(); }
  std::int64_t feature_count() const { return static_cast<std::int64_t>(mask.count()); }
};

// Cyclic row shift: row i of the input lands on row (i + s) mod rows.
// A positive s is the row-space image of rotating the sensor clockwise by
// s azimuth steps (scene content moves CCW through the rows).
template <typename Derived>
auto shift_rows(const Eigen::DenseBase<Derived>& in, Eigen::Index s) {
  typename Derived::PlainObject out(in.rows(), in.cols());
  const Eigen::Index h = in.rows();
  s = ((s % h) + h) % h;
  for (Eigen::Index i = 0; i < h; ++i) out.row((i + s) % h) = in.row(i);
  return out;
}

}  // namespace referee
