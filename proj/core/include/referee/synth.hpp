#pragma once

#include <cstdint>
#include <vector>

#include "referee/geometry.hpp"
#include "referee/scan.hpp"

namespace referee {

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double reflectivity = 1.0;  // in (0, 1]
};

struct World {
  std::vector<Landmark> landmarks;
  double extent = 60.0;  // landmarks live in [-extent/2, extent/2]^2
  std::uint64_t rng_seed = 0;
};

World make_world(int n_landmarks, double extent, double reflectivity_min,
                 double reflectivity_max, std::uint64_t seed);

enum class TrajectoryKind { kLoop, kReverseLoop, kFigureEight };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::kLoop;
  int n_scans = 60;
  double radius = 20.0;        // loop radius / reverse-loop half-length / eight lobe size
  double odom_sigma_xy = 0.0;  // per-step drift, meters
  double odom_sigma_yaw = 0.0; // per-step drift, radians
  std::uint64_t seed = 0;
};

struct SynthConfig {
  Eigen::Index azimuths = 360;
  Eigen::Index range_bins = 168;
  double range_resolution = 0.5;   // m per bin
  double beam_sigma_bins = 2.0;    // Gaussian range spread of a return
  double angular_sigma_rows = 1.0; // Gaussian azimuth spread of a return
  double speckle_scale = 0.05;     // exponential noise scale; 0 disables
  double multipath_prob = 0.0;     // ghost at 2x range, 0.4x amplitude
  std::vector<Pose2> trajectory;   // ground-truth poses for session rendering
};

struct RenderedScan {
  RadarScan scan;
  FeatureImage gt_mask;  // generator-defined truth, real returns only
};

// Deposits one Gaussian bump per visible landmark (plus, with probability
// multipath_prob, a 0.4x ghost at twice the range), adds i.i.d. exponential
// speckle, clamps to [0, 1]. The GT mask marks pixels within one sigma of
// each real return in both range and azimuth. Bit-reproducible per seed.
RenderedScan render_scan(const World& world, const Pose2& pose, const SynthConfig& cfg,
                         std::uint64_t seed);

struct RotatedPair {
  RenderedScan a;
  RenderedScan b;
  double gt_rotation_deg = 0.0;  // requested rotation snapped to the row grid
};

// scan_b views the scene with sensor yaw increased by rotation_deg (snapped
// to a whole number of azimuth rows, applied as an exact integer row shift of
// the deposits). Noise for b comes from seed_b; passing seed_b == seed with a
// zero rotation reproduces scan_a bit for bit.
RotatedPair render_rotated_pair(const World& world, const Pose2& pose, double rotation_deg,
                                const SynthConfig& cfg, std::uint64_t seed);
RotatedPair render_rotated_pair(const World& world, const Pose2& pose, double rotation_deg,
                                const SynthConfig& cfg, std::uint64_t seed, std::uint64_t seed_b);

// Independent per-scan noise stream from one session seed.
std::uint64_t derive_scan_seed(std::uint64_t session_seed, std::int64_t scan_id);

struct Trajectory {
  std::vector<Pose2> gt;
  std::vector<Pose2> odometry;  // ground truth re-integrated with per-step noise
};

// loop: a circle that re-enters its start. reverse_loop: out and back along
// the same line, return leg facing 180 degrees the other way. figure_eight:
// a lemniscate crossing its own path.
Trajectory make_trajectory(const TrajectoryConfig& cfg);

}  // namespace referee
