#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "referee/errors.hpp"

namespace referee {

// Exact nearest-neighbor KD-tree over runtime-dimension points. Squared
// distances accumulate in double over dimensions in ascending order, the
// same arithmetic a linear scan uses, so results agree bit-for-bit with
// an exhaustive search under the same tie rule (smallest point index wins).
template <typename Scalar>
class KdTree {
 public:
  struct Result {
    Eigen::Index index = -1;
    double sq_dist = std::numeric_limits<double>::infinity();
  };

  KdTree() = default;

  // points: one row per point, rows kept in insertion order by index.
  explicit KdTree(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> points)
      : points_(std::move(points)) {
    if (points_.rows() == 0) throw ValidationError("KdTree: empty point set");
    order_.resize(static_cast<std::size_t>(points_.rows()));
    std::iota(order_.begin(), order_.end(), 0);
    root_ = build(0, points_.rows(), 0);
  }

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

  template <typename Vec>
  Result nearest(const Vec& q) const {
    return nearest_if(q, [](Eigen::Index) { return true; });
  }

  // Exact NN among points whose index satisfies admissible(). Returns an
  // empty Result (index -1) when nothing is admissible.
  template <typename Vec, typename Pred>
  Result nearest_if(const Vec& q, Pred admissible) const {
    if (q.size() != points_.cols()) throw ValidationError("KdTree: query dimension mismatch");
    Result best;
    search(root_, q, admissible, best);
    return best;
  }

  // Reference implementation used as an oracle and as the config-selectable
  // fallback; identical arithmetic and tie rule.
  template <typename Vec, typename Pred>
  Result linear_nearest_if(const Vec& q, Pred admissible) const {
    Result best;
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
      if (!admissible(i)) continue;
      const double d = sq_dist(i, q);
      if (d < best.sq_dist || (d == best.sq_dist && i < best.index)) best = {i, d};
    }
    return best;
  }

 private:
  struct Node {
    int left = -1, right = -1;
    Eigen::Index split_dim = 0;
    double split_val = 0.0;
    Eigen::Index begin = 0, end = 0;  // leaf range in order_
    bool leaf = false;
  };

  static constexpr Eigen::Index kLeafSize = 8;

  int build(Eigen::Index begin, Eigen::Index end, int depth) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.leaf = true;
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    const Eigen::Index d = depth % points_.cols();
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                       if (points_(a, d) != points_(b, d)) return points_(a, d) < points_(b, d);
                       return a < b;
                     });
    node.split_dim = d;
    node.split_val = static_cast<double>(points_(order_[static_cast<std::size_t>(mid)], d));
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  template <typename Vec>
  double sq_dist(Eigen::Index i, const Vec& q) const {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < points_.cols(); ++d) {
      const double diff = static_cast<double>(points_(i, d)) - static_cast<double>(q[d]);
      acc += diff * diff;
    }
    return acc;
  }

  template <typename Vec, typename Pred>
  void search(int node_id, const Vec& q, Pred& admissible, Result& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.leaf) {
      for (Eigen::Index k = node.begin; k < node.end; ++k) {
        const Eigen::Index i = order_[static_cast<std::size_t>(k)];
        if (!admissible(i)) continue;
        const double d = sq_dist(i, q);
        if (d < best.sq_dist || (d == best.sq_dist && i < best.index)) best = {i, d};
      }
      return;
    }
    const double delta = static_cast<double>(q[node.split_dim]) - node.split_val;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, admissible, best);
    // Equal plane distance may still hide an equally near, smaller index.
    if (delta * delta <= best.sq_dist) search(far, q, admissible, best);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> points_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace referee
