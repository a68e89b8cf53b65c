#include "referee/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>
#include <vector>

#include "referee/errors.hpp"

namespace referee {

namespace {

Eigen::Matrix3d diag_info(const Eigen::Vector3d& d) {
  return d.asDiagonal();
}

void check_spd(const Eigen::Matrix3d& info, const char* what) {
  Eigen::LLT<Eigen::Matrix3d> llt(info);
  if (llt.info() != Eigen::Success)
    throw ValidationError(std::string(what) + ": information matrix is not SPD");
}

double total_cost(const FactorGraph& graph, const std::vector<Pose2>& x) {
  double cost = 0.0;
  for (const Factor& f : graph.factors) {
    const Eigen::Vector3d r = factor_residual(f, x[static_cast<std::size_t>(f.from)],
                                              f.kind == Factor::Kind::kPrior
                                                  ? x[static_cast<std::size_t>(f.from)]
                                                  : x[static_cast<std::size_t>(f.to)]);
    cost += r.dot(f.information * r);
  }
  return cost;
}

void check_connected(const FactorGraph& graph) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(graph.node_count));
  for (const Factor& f : graph.factors) {
    if (f.kind == Factor::Kind::kPrior) continue;
    adj[static_cast<std::size_t>(f.from)].push_back(f.to);
    adj[static_cast<std::size_t>(f.to)].push_back(f.from);
  }
  std::vector<bool> seen(static_cast<std::size_t>(graph.node_count), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = true;
        stack.push_back(u);
      }
    }
  }
  for (int v = 0; v < graph.node_count; ++v) {
    if (!seen[static_cast<std::size_t>(v)])
      throw ValidationError("optimize: node " + std::to_string(v) + " is disconnected");
  }
}

}  // namespace

Eigen::Vector3d factor_residual(const Factor& f, const Pose2& x_from, const Pose2& x_to) {
  if (f.kind == Factor::Kind::kPrior) {
    return {f.measurement.x - x_from.x, f.measurement.y - x_from.y,
            wrap_angle(f.measurement.yaw - x_from.yaw)};
  }
  const Pose2 rel = relative_pose(x_from, x_to);
  return {f.measurement.x - rel.x, f.measurement.y - rel.y,
          wrap_angle(f.measurement.yaw - rel.yaw)};
}

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> factor_jacobians(const Factor& f, const Pose2& x_from,
                                                             const Pose2& x_to) {
  if (f.kind == Factor::Kind::kPrior) {
    return {-Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Zero()};
  }
  const double c = std::cos(x_from.yaw), s = std::sin(x_from.yaw);
  const double dx = x_to.x - x_from.x, dy = x_to.y - x_from.y;
  // rel.t = R(from.yaw)^T (p_to - p_from); residual = meas - rel.
  Eigen::Matrix3d ja = Eigen::Matrix3d::Zero();
  ja(0, 0) = c;
  ja(0, 1) = s;
  ja(1, 0) = -s;
  ja(1, 1) = c;
  ja(0, 2) = -(-s * dx + c * dy);
  ja(1, 2) = -(-c * dx - s * dy);
  ja(2, 2) = 1.0;
  Eigen::Matrix3d jb = Eigen::Matrix3d::Zero();
  jb(0, 0) = -c;
  jb(0, 1) = -s;
  jb(1, 0) = s;
  jb(1, 1) = -c;
  jb(2, 2) = -1.0;
  return {ja, jb};
}

FactorGraph build_graph(const std::vector<Pose2>& odom, const std::vector<LoopClosure>& loops,
                        const PoseGraphConfig& cfg) {
  if (odom.size() < 2) throw ValidationError("build_graph: need at least 2 odometry poses");
  FactorGraph graph;
  graph.node_count = static_cast<int>(odom.size());

  Factor prior;
  prior.kind = Factor::Kind::kPrior;
  prior.from = 0;
  prior.to = 0;
  prior.measurement = odom[0];
  prior.information = Eigen::Matrix3d::Identity() * cfg.prior_information;
  check_spd(prior.information, "build_graph prior");
  graph.factors.push_back(prior);

  const Eigen::Matrix3d odom_info = diag_info(cfg.odom_information);
  check_spd(odom_info, "build_graph odometry");
  for (std::size_t t = 0; t + 1 < odom.size(); ++t) {
    Factor f;
    f.kind = Factor::Kind::kOdometry;
    f.from = static_cast<int>(t);
    f.to = static_cast<int>(t + 1);
    f.measurement = relative_pose(odom[t], odom[t + 1]);
    f.information = odom_info;
    graph.factors.push_back(f);
  }

  const Eigen::Matrix3d loop_info = diag_info(cfg.loop_information);
  check_spd(loop_info, "build_graph loop");
  for (const LoopClosure& loop : loops) {
    if (loop.query_id < 0 || loop.query_id >= graph.node_count || loop.candidate_id < 0 ||
        loop.candidate_id >= graph.node_count)
      throw ValidationError("build_graph: loop references node out of range (" +
                            std::to_string(loop.query_id) + " -> " +
                            std::to_string(loop.candidate_id) + " of " +
                            std::to_string(graph.node_count) + ")");
    if (loop.query_id == loop.candidate_id)
      throw ValidationError("build_graph: loop factor endpoints must differ");
    Factor f;
    f.kind = Factor::Kind::kLoop;
    f.from = static_cast<int>(loop.query_id);
    f.to = static_cast<int>(loop.candidate_id);
    f.measurement = loop.relative;
    f.information = loop_info;
    graph.factors.push_back(f);
  }
  return graph;
}

std::pair<std::vector<Pose2>, OptimizeReport> optimize(const FactorGraph& graph,
                                                       const std::vector<Pose2>& initial,
                                                       const PoseGraphConfig& cfg) {
  if (static_cast<int>(initial.size()) != graph.node_count)
    throw ValidationError("optimize: initial guess size does not match node count");
  if (graph.node_count < 1) throw ValidationError("optimize: empty graph");
  check_connected(graph);

  const int n = graph.node_count;
  std::vector<Pose2> x = initial;
  for (Pose2& p : x) p.yaw = wrap_angle(p.yaw);

  OptimizeReport report;
  double cost = total_cost(graph, x);
  report.initial_cost = cost;
  report.cost_trace.push_back(cost);

  double lambda = cfg.lambda_init;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(graph.factors.size() * 36);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3 * n);
    for (const Factor& f : graph.factors) {
      const Pose2& xa = x[static_cast<std::size_t>(f.from)];
      const Pose2& xb = x[static_cast<std::size_t>(f.kind == Factor::Kind::kPrior ? f.from : f.to)];
      const Eigen::Vector3d r = factor_residual(f, xa, xb);
      const auto [ja, jb] = factor_jacobians(f, xa, xb);
      const Eigen::Matrix3d wja = f.information * ja;
      g.segment<3>(3 * f.from) += ja.transpose() * (f.information * r);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          triplets.emplace_back(3 * f.from + a, 3 * f.from + b,
                                (ja.transpose() * wja)(a, b));
      if (f.kind == Factor::Kind::kPrior) continue;
      const Eigen::Matrix3d wjb = f.information * jb;
      g.segment<3>(3 * f.to) += jb.transpose() * (f.information * r);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          triplets.emplace_back(3 * f.to + a, 3 * f.to + b, (jb.transpose() * wjb)(a, b));
          triplets.emplace_back(3 * f.from + a, 3 * f.to + b, (ja.transpose() * wjb)(a, b));
          triplets.emplace_back(3 * f.to + a, 3 * f.from + b, (jb.transpose() * wja)(a, b));
        }
      }
    }

    bool accepted = false;
    double rel = 0.0;
    while (true) {
      std::vector<Eigen::Triplet<double>> damped = triplets;
      for (int k = 0; k < 3 * n; ++k) damped.emplace_back(k, k, lambda);
      Eigen::SparseMatrix<double> h(3 * n, 3 * n);
      h.setFromTriplets(damped.begin(), damped.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(h);
      if (solver.info() != Eigen::Success) {
        lambda *= 10.0;
        if (lambda > 1e12)
          throw ValidationError("optimize: singular normal equations after damping");
        continue;
      }
      const Eigen::VectorXd d = solver.solve(-g);
      if (!d.allFinite()) {
        lambda *= 10.0;
        if (lambda > 1e12)
          throw ValidationError("optimize: singular normal equations after damping");
        continue;
      }
      std::vector<Pose2> xn = x;
      for (int k = 0; k < n; ++k) {
        xn[static_cast<std::size_t>(k)].x += d[3 * k];
        xn[static_cast<std::size_t>(k)].y += d[3 * k + 1];
        xn[static_cast<std::size_t>(k)].yaw = wrap_angle(xn[static_cast<std::size_t>(k)].yaw + d[3 * k + 2]);
      }
      const double cn = total_cost(graph, xn);
      if (cn < cost) {
        rel = (cost - cn) / std::max(cost, 1e-30);
        x = std::move(xn);
        cost = cn;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        ++report.iterations;
        report.cost_trace.push_back(cost);
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) {
        // No downhill proposal left; converged if the best proposal is flat.
        report.converged = (cn - cost) <= cfg.relative_cost_tol * std::max(cost, 1e-30);
        report.final_cost = cost;
        return {x, report};
      }
    }
    if (accepted && rel < cfg.relative_cost_tol) {
      report.converged = true;
      break;
    }
  }
  report.final_cost = cost;
  return {x, report};
}

}  // namespace referee
