#include <random>

#include "doctest.h"
#include "referee/errors.hpp"
#include "referee/kdtree.hpp"

using namespace referee;

namespace {

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
PointMatrix<Scalar> random_points(Eigen::Index n, Eigen::Index dim, std::mt19937_64& rng,
                                  Scalar lo, Scalar hi) {
  std::uniform_real_distribution<double> value(static_cast<double>(lo), static_cast<double>(hi));
  return PointMatrix<Scalar>::NullaryExpr(n, dim,
                                          [&](Eigen::Index) { return static_cast<Scalar>(value(rng)); });
}

}  // namespace

TEST_CASE("a single point is always the answer") {
  PointMatrix<double> pts(1, 3);
  pts << 1.0, 2.0, 3.0;
  const KdTree<double> tree(pts);
  const auto r = tree.nearest(Eigen::Vector3d(0.0, 0.0, 0.0));
  CHECK(r.index == 0);
  CHECK(r.sq_dist == doctest::Approx(14.0));
}

TEST_CASE("duplicates resolve to the smallest index") {
  PointMatrix<double> pts(4, 2);
  pts << 5.0, 5.0, 1.0, 1.0, 1.0, 1.0, 5.0, 5.0;
  const KdTree<double> tree(pts);
  CHECK(tree.nearest(Eigen::Vector2d(1.1, 1.0)).index == 1);
  CHECK(tree.nearest(Eigen::Vector2d(5.0, 5.0)).index == 0);
}

TEST_CASE("symmetric equal-distance points resolve to the smallest index") {
  // Both points sit exactly 1.0 from the query, on opposite sides of the
  // splitting plane.
  PointMatrix<double> pts(2, 1);
  pts << 2.0, 4.0;
  const KdTree<double> tree(pts);
  Eigen::Matrix<double, 1, 1> q;
  q << 3.0;
  const auto r = tree.nearest(q);
  CHECK(r.index == 0);
  CHECK(r.sq_dist == doctest::Approx(1.0));
}

TEST_CASE("empty point sets are rejected") {
  CHECK_THROWS_AS(KdTree<double>(PointMatrix<double>(0, 3)), ValidationError);
}

TEST_CASE("query dimension is checked") {
  PointMatrix<double> pts(2, 3);
  pts.setZero();
  const KdTree<double> tree(pts);
  CHECK_THROWS_AS(tree.nearest(Eigen::Vector2d(0.0, 0.0)), ValidationError);
}

TEST_CASE("tree search equals linear scan on random data") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 5; ++round) {
    const Eigen::Index n = 50 + static_cast<Eigen::Index>(rng() % 400);
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng() % 8);
    const KdTree<double> tree(random_points<double>(n, dim, rng, -10.0, 10.0));
    const auto all = [](Eigen::Index) { return true; };
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd q = random_points<double>(1, dim, rng, -12.0, 12.0).row(0);
      const auto a = tree.nearest_if(q, all);
      const auto b = tree.linear_nearest_if(q, all);
      CHECK(a.index == b.index);
      CHECK(a.sq_dist == b.sq_dist);
    }
  }
}

TEST_CASE("tree search equals linear scan on clustered float data with ties") {
  std::mt19937_64 rng(42);
  // Low-resolution grid coordinates force many exact ties.
  std::uniform_int_distribution<int> grid(0, 4);
  for (int round = 0; round < 5; ++round) {
    PointMatrix<float> pts(300, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (Eigen::Index j = 0; j < 3; ++j) pts(i, j) = static_cast<float>(grid(rng));
    const KdTree<float> tree(pts);
    const auto all = [](Eigen::Index) { return true; };
    for (int k = 0; k < 200; ++k) {
      Eigen::Vector3f q;
      for (int j = 0; j < 3; ++j) q[j] = static_cast<float>(grid(rng));
      const auto a = tree.nearest_if(q, all);
      const auto b = tree.linear_nearest_if(q, all);
      CHECK(a.index == b.index);
      CHECK(a.sq_dist == b.sq_dist);
    }
  }
}

TEST_CASE("admissibility predicate matches the filtered linear scan") {
  std::mt19937_64 rng(43);
  const Eigen::Index n = 500;
  const KdTree<double> tree(random_points<double>(n, 4, rng, 0.0, 1.0));
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index blocked_lo = static_cast<Eigen::Index>(rng() % n);
    const Eigen::Index blocked_hi = blocked_lo + static_cast<Eigen::Index>(rng() % 100);
    const auto admissible = [&](Eigen::Index i) { return i < blocked_lo || i > blocked_hi; };
    const Eigen::VectorXd q = random_points<double>(1, 4, rng, 0.0, 1.0).row(0);
    const auto a = tree.nearest_if(q, admissible);
    const auto b = tree.linear_nearest_if(q, admissible);
    CHECK(a.index == b.index);
    CHECK(a.sq_dist == b.sq_dist);
  }
}

TEST_CASE("an all-blocking predicate yields an empty result") {
  std::mt19937_64 rng(44);
  const KdTree<double> tree(random_points<double>(20, 2, rng, 0.0, 1.0));
  const auto r = tree.nearest_if(Eigen::Vector2d(0.5, 0.5), [](Eigen::Index) { return false; });
  CHECK(r.index == -1);
}
