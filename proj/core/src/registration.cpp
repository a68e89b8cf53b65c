#include "referee/registration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "referee/errors.hpp"
#include "referee/kdtree.hpp"

namespace referee {

HeadingEstimate estimate_heading(const Eigen::VectorXf& a_q, const Eigen::VectorXf& a_c) {
  if (a_q.size() != a_c.size())
    throw ValidationError("estimate_heading: length mismatch " + std::to_string(a_q.size()) +
                          " vs " + std::to_string(a_c.size()));
  if (a_q.size() == 0) throw ValidationError("estimate_heading: empty descriptors");
  const Eigen::Index n = a_q.size();

  double norm_q = 0.0, norm_c = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    norm_q += static_cast<double>(a_q[i]) * static_cast<double>(a_q[i]);
    norm_c += static_cast<double>(a_c[i]) * static_cast<double>(a_c[i]);
  }
  norm_q = std::sqrt(norm_q);
  norm_c = std::sqrt(norm_c);

  HeadingEstimate est;
  if (norm_q == 0.0 || norm_c == 0.0) {
    est.degenerate = true;
    return est;
  }

  double best = std::numeric_limits<double>::infinity();
  int best_n = 0;
  for (Eigen::Index shift = 0; shift < n; ++shift) {
    // candidate shifted forward by `shift`: element at index i comes from i - shift
    double dot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index src = (i - shift + n) % n;
      dot += static_cast<double>(a_q[i]) * static_cast<double>(a_c[src]);
    }
    const double d = 1.0 - dot / (norm_q * norm_c);
    if (d < best) {
      best = d;
      best_n = static_cast<int>(shift);
    }
  }
  est.n_hat = best_n;
  est.angle_deg = 360.0 * static_cast<double>(best_n) / static_cast<double>(n);
  est.cosine_distance = best;
  return est;
}

RigidTransform2 heading_to_transform(const HeadingEstimate& h) {
  return RigidTransform2::from_angle(h.angle_deg * M_PI / 180.0);
}

PointCloud2 polar_to_cloud(const FeatureImage& fi, double range_resolution) {
  if (range_resolution <= 0.0) throw ValidationError("polar_to_cloud: range_resolution must be > 0");
  PointCloud2 cloud;
  cloud.points.reserve(static_cast<std::size_t>(fi.feature_count()));
  const double dtheta = 2.0 * M_PI / static_cast<double>(fi.rows());
  for (Eigen::Index i = 0; i < fi.rows(); ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * dtheta;
    for (Eigen::Index j = 0; j < fi.cols(); ++j) {
      if (!fi.mask(i, j)) continue;
      const double r = (static_cast<double>(j) + 0.5) * range_resolution;
      cloud.points.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }
  return cloud;
}

PointCloud2 apply_initial_alignment(const PointCloud2& cloud_q, const RigidTransform2& t) {
  return transformed(cloud_q, t.inverse());
}

namespace {

struct Matches {
  std::vector<Eigen::Index> source_idx;
  std::vector<Eigen::Index> target_idx;
  double mean_sq = 0.0;
};

Matches find_matches(const PointCloud2& moved_source, const PointCloud2& target,
                     const KdTree<double>& tree, double max_corr_dist) {
  Matches m;
  const double max_sq = max_corr_dist * max_corr_dist;
  double acc = 0.0;
  for (std::size_t s = 0; s < moved_source.points.size(); ++s) {
    const auto r = tree.nearest(moved_source.points[s]);
    if (r.sq_dist > max_sq) continue;
    m.source_idx.push_back(static_cast<Eigen::Index>(s));
    m.target_idx.push_back(r.index);
    acc += r.sq_dist;
  }
  if (!m.source_idx.empty()) m.mean_sq = acc / static_cast<double>(m.source_idx.size());
  return m;
}

// Least-squares rigid fit mapping source[i] -> target[i] over the matched pairs.
RigidTransform2 fit_rigid(const PointCloud2& source, const PointCloud2& target, const Matches& m) {
  const double n = static_cast<double>(m.source_idx.size());
  Eigen::Vector2d cs = Eigen::Vector2d::Zero(), ct = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < m.source_idx.size(); ++k) {
    cs += source.points[static_cast<std::size_t>(m.source_idx[k])];
    ct += target.points[static_cast<std::size_t>(m.target_idx[k])];
  }
  cs /= n;
  ct /= n;
  double sxx = 0.0, sxy = 0.0, syx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m.source_idx.size(); ++k) {
    const Eigen::Vector2d s = source.points[static_cast<std::size_t>(m.source_idx[k])] - cs;
    const Eigen::Vector2d t = target.points[static_cast<std::size_t>(m.target_idx[k])] - ct;
    sxx += s.x() * t.x();
    sxy += s.x() * t.y();
    syx += s.y() * t.x();
    syy += s.y() * t.y();
  }
  const double theta = std::atan2(sxy - syx, sxx + syy);
  RigidTransform2 t = RigidTransform2::from_angle(theta);
  t.translation = ct - t.rotation * cs;
  return t;
}

double mean_sq_on_matches(const PointCloud2& moved_source, const PointCloud2& target,
                          const Matches& m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m.source_idx.size(); ++k) {
    const Eigen::Vector2d d = moved_source.points[static_cast<std::size_t>(m.source_idx[k])] -
                              target.points[static_cast<std::size_t>(m.target_idx[k])];
    acc += d.squaredNorm();
  }
  return m.source_idx.empty() ? 0.0 : acc / static_cast<double>(m.source_idx.size());
}

}  // namespace

IcpResult icp(const PointCloud2& source, const PointCloud2& target, const IcpConfig& cfg) {
  if (source.size() < 3 || target.size() < 3)
    throw ValidationError("icp: each cloud needs at least 3 points");
  if (cfg.max_corr_dist <= 0.0 || cfg.max_iterations < 1 || cfg.tolerance <= 0.0)
    throw ValidationError("icp: invalid configuration");

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts(
      static_cast<Eigen::Index>(target.size()), 2);
  for (std::size_t i = 0; i < target.points.size(); ++i)
    pts.row(static_cast<Eigen::Index>(i)) = target.points[i].transpose();
  const KdTree<double> tree(std::move(pts));

  IcpResult res;
  res.transform = RigidTransform2{};
  PointCloud2 moved = source;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Matches m = find_matches(moved, target, tree, cfg.max_corr_dist);
    if (m.source_idx.size() < 3) {
      res.iterations = it;
      res.fitness = m.mean_sq;
      res.converged = false;
      return res;
    }
    const RigidTransform2 next = fit_rigid(source, target, m);
    PointCloud2 next_moved = transformed(source, next);
    const double before = m.mean_sq;
    const double after = mean_sq_on_matches(next_moved, target, m);
    res.step_errors.emplace_back(before, after);

    const Pose2 prev_p = res.transform.to_pose();
    const Pose2 next_p = next.to_pose();
    const double step = std::abs(next_p.x - prev_p.x) + std::abs(next_p.y - prev_p.y) +
                        std::abs(wrap_angle(next_p.yaw - prev_p.yaw));
    res.transform = next;
    moved = std::move(next_moved);
    res.iterations = it + 1;
    if (step < cfg.tolerance) break;
  }

  const Matches final_m = find_matches(moved, target, tree, cfg.max_corr_dist);
  if (final_m.source_idx.size() < 3) {
    res.converged = false;
    res.fitness = final_m.mean_sq;
    return res;
  }
  res.fitness = final_m.mean_sq;
  res.converged = true;
  return res;
}

std::optional<RigidTransform2> compose_and_verify(const RigidTransform2& t_heading,
                                                  const IcpResult& icp_res,
                                                  double fitness_threshold) {
  if (!icp_res.converged) return std::nullopt;
  if (!(icp_res.fitness < fitness_threshold)) return std::nullopt;
  return t_heading * icp_res.transform;
}

}  // namespace referee
