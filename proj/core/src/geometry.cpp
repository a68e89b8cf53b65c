#include "referee/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace referee {

double wrap_angle(double rad) {
  if (rad > -M_PI && rad <= M_PI) return rad;
  double r = std::fmod(rad + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.yaw), s = std::sin(a.yaw);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, wrap_angle(a.yaw + b.yaw)};
}

Pose2 relative_pose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.yaw), s = std::sin(a.yaw);
  const double dx = b.x - a.x, dy = b.y - a.y;
  return {c * dx + s * dy, -s * dx + c * dy, wrap_angle(b.yaw - a.yaw)};
}

Pose2 inverse(const Pose2& p) {
  const double c = std::cos(p.yaw), s = std::sin(p.yaw);
  return {-(c * p.x + s * p.y), -(-s * p.x + c * p.y), wrap_angle(-p.yaw)};
}

RigidTransform2 RigidTransform2::from_angle(double rad) {
  RigidTransform2 t;
  t.rotation = Eigen::Rotation2Dd(rad).toRotationMatrix();
  return t;
}

RigidTransform2 RigidTransform2::from_pose(const Pose2& p) {
  RigidTransform2 t = from_angle(p.yaw);
  t.translation = Eigen::Vector2d(p.x, p.y);
  return t;
}

RigidTransform2 RigidTransform2::inverse() const {
  RigidTransform2 t;
  t.rotation = rotation.transpose();
  t.translation = -(rotation.transpose() * translation);
  return t;
}

RigidTransform2 RigidTransform2::operator*(const RigidTransform2& rhs) const {
  RigidTransform2 t;
  t.rotation = rotation * rhs.rotation;
  t.translation = rotation * rhs.translation + translation;
  return t;
}

Eigen::Vector2d RigidTransform2::operator*(const Eigen::Vector2d& point) const {
  return rotation * point + translation;
}

double RigidTransform2::angle() const {
  return std::atan2(rotation(1, 0), rotation(0, 0));
}

Pose2 RigidTransform2::to_pose() const {
  return {translation.x(), translation.y(), wrap_angle(angle())};
}

PointCloud2 transformed(const PointCloud2& cloud, const RigidTransform2& t) {
  PointCloud2 out;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(t * p);
  return out;
}

}  // namespace referee
