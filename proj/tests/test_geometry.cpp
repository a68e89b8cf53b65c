#include <cmath>
#include <random>

#include "doctest.h"
#include "referee/geometry.hpp"

using namespace referee;

namespace {
constexpr double kTol = 1e-12;
}

TEST_CASE("wrap_angle maps into (-pi, pi] with pi kept") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0).epsilon(kTol));
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3.0 * M_PI / 2.0) == doctest::Approx(-M_PI / 2.0));
  CHECK(wrap_angle(-3.0 * M_PI / 2.0) == doctest::Approx(M_PI / 2.0));
  CHECK(std::abs(wrap_angle(2.0 * M_PI)) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-50.0, 50.0);
  std::uniform_int_distribution<int> turns(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const double a = angle(rng);
    const double w = wrap_angle(a);
    CHECK(w > -M_PI);
    CHECK(w <= M_PI);
    const double shifted = wrap_angle(a + 2.0 * M_PI * turns(rng));
    CHECK(std::abs(wrap_angle(shifted - w)) < 1e-9);
  }
}

TEST_CASE("compose and relative_pose invert each other") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 500; ++i) {
    const Pose2 a{coord(rng), coord(rng), angle(rng)};
    const Pose2 d{coord(rng), coord(rng), angle(rng)};
    const Pose2 b = compose(a, d);
    const Pose2 d2 = relative_pose(a, b);
    CHECK(d2.x == doctest::Approx(d.x).epsilon(1e-9));
    CHECK(d2.y == doctest::Approx(d.y).epsilon(1e-9));
    CHECK(std::abs(wrap_angle(d2.yaw - d.yaw)) < 1e-9);
  }
}

TEST_CASE("identity and inverse behave as group operations") {
  const Pose2 id{};
  const Pose2 a{1.5, -2.0, 0.7};
  const Pose2 ai = inverse(a);
  const Pose2 back = compose(a, ai);
  CHECK(back.x == doctest::Approx(0.0));
  CHECK(back.y == doctest::Approx(0.0));
  CHECK(std::abs(wrap_angle(back.yaw)) < kTol);
  const Pose2 same = compose(a, id);
  CHECK(same.x == doctest::Approx(a.x));
  CHECK(same.y == doctest::Approx(a.y));
  CHECK(same.yaw == doctest::Approx(a.yaw));
}

TEST_CASE("rigid transform mirrors pose composition") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const Pose2 a{coord(rng), coord(rng), angle(rng)};
    const Pose2 b{coord(rng), coord(rng), angle(rng)};
    const RigidTransform2 ta = RigidTransform2::from_pose(a);
    const RigidTransform2 tb = RigidTransform2::from_pose(b);
    const Pose2 ab = compose(a, b);
    const Pose2 tab = (ta * tb).to_pose();
    CHECK(tab.x == doctest::Approx(ab.x).epsilon(1e-9));
    CHECK(tab.y == doctest::Approx(ab.y).epsilon(1e-9));
    CHECK(std::abs(wrap_angle(tab.yaw - ab.yaw)) < 1e-9);

    const Eigen::Vector2d p{coord(rng), coord(rng)};
    const Eigen::Vector2d q = ta * p;
    const Eigen::Vector2d back = ta.inverse() * q;
    CHECK(back.x() == doctest::Approx(p.x()).epsilon(1e-9));
    CHECK(back.y() == doctest::Approx(p.y()).epsilon(1e-9));
  }
}

TEST_CASE("transform angle round-trips through from_angle") {
  for (double deg = 0.0; deg < 360.0; deg += 17.0) {
    const double rad = deg * M_PI / 180.0;
    const RigidTransform2 t = RigidTransform2::from_angle(rad);
    CHECK(std::abs(wrap_angle(t.angle() - rad)) < kTol);
  }
}
