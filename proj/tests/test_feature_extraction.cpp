#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "referee/errors.hpp"
#include "referee/feature_extraction.hpp"
#include "test_util.hpp"

using namespace referee;

namespace {

RadarScan scan_from(const MatrixXfR& m) {
  RadarScan s;
  s.intensities = m;
  s.range_resolution = 0.5;
  return s;
}

// 32-bin row: 0.1 background with a 0.9 return at bin 16. With window 17 the
// peak's block average is 2.5/17, so high[16] = 0.9 - 2.5/17 ~ 0.75294 and
// the negative-residual sigma works out to ~0.0334094; the peak clears the
// gate up to z ~ 22.54.
MatrixXfR spike_row() {
  MatrixXfR m = MatrixXfR::Constant(1, 32, 0.1f);
  m(0, 16) = 0.9f;
  return m;
}

}  // namespace

TEST_CASE("all-zero scan yields no features") {
  const FeatureImage fi = extract_features(scan_from(MatrixXfR::Zero(6, 24)), FeatureConfig{});
  CHECK(fi.feature_count() == 0);
  CHECK_FALSE(fi.mask.any());
}

TEST_CASE("constant row has zero high-pass residual and no features") {
  const FeatureImage fi =
      extract_features(scan_from(MatrixXfR::Constant(4, 32, 0.5f)), FeatureConfig{});
  CHECK(fi.feature_count() == 0);
}

TEST_CASE("single spike above background is the only feature") {
  const FeatureConfig cfg{17, 3.0, 0.08};
  const FeatureImage fi = extract_features(scan_from(spike_row()), cfg);
  REQUIRE(fi.mask.rows() == 1);
  for (Eigen::Index j = 0; j < 32; ++j) CHECK(fi.mask(0, j) == (j == 16));
}

TEST_CASE("spike clears the gate up to its exact z ratio") {
  const FeatureImage at_low = extract_features(scan_from(spike_row()), FeatureConfig{17, 22.5, 0.08});
  CHECK(at_low.feature_count() == 1);
  const FeatureImage at_high =
      extract_features(scan_from(spike_row()), FeatureConfig{17, 22.6, 0.08});
  CHECK(at_high.feature_count() == 0);
}

TEST_CASE("min_intensity suppresses low-amplitude exceedances") {
  const FeatureImage fi = extract_features(scan_from(spike_row()), FeatureConfig{17, 3.0, 0.95});
  CHECK(fi.feature_count() == 0);
}

TEST_CASE("free space is the mask complement") {
  FeatureImage fi;
  fi.mask = MaskXb::Constant(4, 6, false);
  CHECK(count_free_space(fi) == 24);
  fi.mask = MaskXb::Constant(4, 6, true);
  CHECK(count_free_space(fi) == 0);
  fi.mask.setConstant(false);
  fi.mask(0, 1) = fi.mask(2, 4) = fi.mask(3, 3) = true;
  CHECK(count_free_space(fi) == 21);
}

TEST_CASE("rows are processed independently") {
  std::mt19937_64 rng(21);
  RadarScan scan = testutil::random_scan(8, 40, rng);
  const FeatureImage base = extract_features(scan, FeatureConfig{});

  std::vector<Eigen::Index> perm{3, 7, 1, 0, 6, 2, 5, 4};
  RadarScan permuted = scan;
  for (Eigen::Index i = 0; i < 8; ++i) permuted.intensities.row(perm[i]) = scan.intensities.row(i);
  const FeatureImage shuffled = extract_features(permuted, FeatureConfig{});
  for (Eigen::Index i = 0; i < 8; ++i)
    CHECK((shuffled.mask.row(perm[i]) == base.mask.row(i)).all());
}

TEST_CASE("cyclically shifting rows shifts the mask rows identically") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    RadarScan scan = testutil::random_scan(12, 36, rng);
    const Eigen::Index s = static_cast<Eigen::Index>(rng() % 12);
    RadarScan shifted = scan;
    shifted.intensities = shift_rows(scan.intensities, s);
    const MaskXb expect = shift_rows(extract_features(scan, FeatureConfig{}).mask, s);
    const MaskXb got = extract_features(shifted, FeatureConfig{}).mask;
    CHECK((got == expect).all());
  }
}

TEST_CASE("raising z_score never adds a feature") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const RadarScan scan = testutil::random_scan(6, 48, rng);
    const FeatureImage loose = extract_features(scan, FeatureConfig{9, 1.0, 0.05});
    const FeatureImage tight = extract_features(scan, FeatureConfig{9, 2.5, 0.05});
    CHECK((!tight.mask || loose.mask).all());
    CHECK(tight.feature_count() <= loose.feature_count());
  }
}

TEST_CASE("extraction is deterministic") {
  std::mt19937_64 rng(24);
  const RadarScan scan = testutil::random_scan(10, 64, rng);
  const FeatureImage a = extract_features(scan, FeatureConfig{});
  const FeatureImage b = extract_features(scan, FeatureConfig{});
  CHECK((a.mask == b.mask).all());
}

TEST_CASE("feature config is validated") {
  const RadarScan scan = scan_from(MatrixXfR::Zero(4, 16));
  CHECK_THROWS_AS(extract_features(scan, FeatureConfig{4, 3.0, 0.1}), ValidationError);
  CHECK_THROWS_AS(extract_features(scan, FeatureConfig{17, 3.0, 0.1}), ValidationError);
  CHECK_THROWS_AS(extract_features(scan, FeatureConfig{5, 0.0, 0.1}), ValidationError);
  CHECK_THROWS_AS(extract_features(scan, FeatureConfig{5, 3.0, 1.5}), ValidationError);
  CHECK_THROWS_AS(extract_features(scan, FeatureConfig{5, 3.0, -0.1}), ValidationError);
}

TEST_CASE("feature mask keeps the scan id") {
  RadarScan scan = scan_from(MatrixXfR::Zero(4, 16));
  scan.scan_id = 77;
  CHECK(extract_features(scan, FeatureConfig{5, 3.0, 0.1}).scan_id == 77);
}
