#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "referee/geometry.hpp"
#include "referee/scan.hpp"

namespace referee {

struct HeadingEstimate {
  int n_hat = 0;                  // block shift in [0, N_h)
  double angle_deg = 0.0;         // n_hat * 360 / N_h, in [0, 360)
  double cosine_distance = 1.0;   // d at the argmin, in [0, 2]
  bool degenerate = false;        // an all-zero input forced n_hat = 0
};

// Exhaustive shift search: n_hat = argmin_n of the cosine distance between
// a_q and a_c cyclically shifted forward by n blocks (element j moves to
// j + n). Ties resolve to the smallest n. estimate_heading(shift(a, s), a)
// recovers s exactly for any nonzero a.
HeadingEstimate estimate_heading(const Eigen::VectorXf& a_q, const Eigen::VectorXf& a_c);

// Pure rotation by the estimated heading angle.
RigidTransform2 heading_to_transform(const HeadingEstimate& h);

// One point per feature pixel at the bin-center polar position:
// theta = (i + 0.5) * 2pi / rows, r = (j + 0.5) * range_resolution.
PointCloud2 polar_to_cloud(const FeatureImage& fi, double range_resolution);

// Maps the query cloud by the INVERSE of t, undoing the estimated heading so
// the result is expressed with the candidate's orientation.
PointCloud2 apply_initial_alignment(const PointCloud2& cloud_q, const RigidTransform2& t);

struct IcpConfig {
  double max_corr_dist = 2.0;     // meters; pairs beyond this are dropped
  int max_iterations = 50;
  double tolerance = 1e-6;        // stop when the (x, y, yaw) step is smaller
  double fitness_threshold = 1.0; // m^2, strict acceptance bound for loops
};

struct IcpResult {
  RigidTransform2 transform;      // maps source points onto the target
  double fitness = 0.0;           // mean squared correspondence distance, m^2
  int iterations = 0;
  bool converged = false;
  // Per-iteration mean squared error on that iteration's fixed matches,
  // before and after the closed-form realignment.
  std::vector<std::pair<double, double>> step_errors;
};

// Point-to-point ICP: nearest-neighbor matches against a KD-tree over the
// target, rejection beyond max_corr_dist, closed-form rigid fit per
// iteration. Fewer than 3 retained matches flags a non-converged result.
IcpResult icp(const PointCloud2& source, const PointCloud2& target, const IcpConfig& cfg);

// Composes the heading seed with the ICP refinement; the loop survives only
// when fitness < fitness_threshold (strict).
std::optional<RigidTransform2> compose_and_verify(const RigidTransform2& t_heading,
                                                  const IcpResult& icp_res,
                                                  double fitness_threshold);

// A verified loop: candidate's pose expressed in the query frame.
struct LoopClosure {
  std::int64_t query_id = 0;
  std::int64_t candidate_id = 0;
  double descriptor_distance = 0.0;
  double heading_deg = 0.0;
  Pose2 relative;
  double fitness = 0.0;
};

}  // namespace referee
