#pragma once

#include <Eigen/Core>
#include <vector>

namespace referee {

// Normalizes an angle to (-pi, pi].
double wrap_angle(double rad);

// 3-DoF pose (x m, y m, yaw rad). yaw is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

// b composed onto a: the pose of "a then b" in a's parent frame.
Pose2 compose(const Pose2& a, const Pose2& b);

// Pose of b expressed in a's frame; inverse of compose(a, .).
Pose2 relative_pose(const Pose2& a, const Pose2& b);

Pose2 inverse(const Pose2& p);

// Rigid transform in the plane. rotation stays orthonormal with det +1.
struct RigidTransform2 {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  static RigidTransform2 from_angle(double rad);
  static RigidTransform2 from_pose(const Pose2& p);

  RigidTransform2 inverse() const;
  RigidTransform2 operator*(const RigidTransform2& rhs) const;
  Eigen::Vector2d operator*(const Eigen::Vector2d& point) const;

  double angle() const;  // atan2 of the rotation, in (-pi, pi]
  Pose2 to_pose() const;
};

struct PointCloud2 {
  std::vector<Eigen::Vector2d> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

PointCloud2 transformed(const PointCloud2& cloud, const RigidTransform2& t);

}  // namespace referee
