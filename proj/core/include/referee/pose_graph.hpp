#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "referee/geometry.hpp"
#include "referee/registration.hpp"

namespace referee {

struct Factor {
  enum class Kind { kPrior, kOdometry, kLoop };
  Kind kind = Kind::kOdometry;
  int from = 0;
  int to = 0;            // unused for priors
  Pose2 measurement;     // relative pose (binary) or anchored pose (prior)
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

struct FactorGraph {
  int node_count = 0;
  std::vector<Factor> factors;
};

struct PoseGraphConfig {
  Eigen::Vector3d odom_information{50.0, 50.0, 100.0};  // 1/m^2, 1/m^2, 1/rad^2
  Eigen::Vector3d loop_information{20.0, 20.0, 50.0};
  double prior_information = 1e6;
  int max_iterations = 100;
  double lambda_init = 1e-4;
  double relative_cost_tol = 1e-9;
};

struct OptimizeReport {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;         // accepted steps
  bool converged = false;
  std::vector<double> cost_trace;  // cost after each accepted step
};

// One prior anchoring node 0 at the first odometry pose, an odometry factor
// per consecutive pair, one loop factor per closure.
FactorGraph build_graph(const std::vector<Pose2>& odom, const std::vector<LoopClosure>& loops,
                        const PoseGraphConfig& cfg);

// Levenberg-Marquardt with identity damping: lambda starts at lambda_init,
// x10 when a proposal raises the cost, /10 (floored at 1e-12) after an
// accepted step; stops when the relative cost drop of an accepted step falls
// below relative_cost_tol, when lambda exceeds 1e12, or at max_iterations.
std::pair<std::vector<Pose2>, OptimizeReport> optimize(const FactorGraph& graph,
                                                       const std::vector<Pose2>& initial,
                                                       const PoseGraphConfig& cfg);

// Residual of a binary factor: measurement minus relative_pose(x_from, x_to),
// yaw wrapped. Exposed for Jacobian tests.
Eigen::Vector3d factor_residual(const Factor& f, const Pose2& x_from, const Pose2& x_to);

// Analytic 3x3 residual Jacobians with respect to the from and to nodes.
std::pair<Eigen::Matrix3d, Eigen::Matrix3d> factor_jacobians(const Factor& f, const Pose2& x_from,
                                                             const Pose2& x_to);

}  // namespace referee
