#include "referee/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "referee/errors.hpp"

namespace referee {

namespace {

std::uint64_t mix_seed(std::uint64_t seed) {
  // splitmix64 step; derives an independent stream for the pair's second render.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void validate(const SynthConfig& cfg) {
  if (cfg.azimuths < 4 || cfg.range_bins < 4)
    throw ValidationError("synth: scans need at least 4 azimuths and 4 range bins");
  if (cfg.range_resolution <= 0.0) throw ValidationError("synth: range_resolution must be > 0");
  if (cfg.beam_sigma_bins <= 0.0 || cfg.angular_sigma_rows <= 0.0)
    throw ValidationError("synth: beam spreads must be > 0");
  if (cfg.speckle_scale < 0.0) throw ValidationError("synth: speckle_scale must be >= 0");
  if (cfg.multipath_prob < 0.0 || cfg.multipath_prob > 1.0)
    throw ValidationError("synth: multipath_prob must be in [0, 1]");
}

// Deposits all landmark bumps with rows offset by row_shift (exact integer
// cyclic shift of the deposit pattern), consuming rng only for multipath
// draws. Returns the noiseless image and the GT mask.
RenderedScan render_deposits(const World& world, const Pose2& pose, const SynthConfig& cfg,
                             int row_shift, std::mt19937_64& rng) {
  const Eigen::Index h = cfg.azimuths, w = cfg.range_bins;
  RenderedScan out;
  out.scan.intensities = MatrixXfR::Zero(h, w);
  out.scan.range_resolution = cfg.range_resolution;
  out.gt_mask.mask = MaskXb::Constant(h, w, false);

  const double dtheta = 2.0 * M_PI / static_cast<double>(h);
  const int row_spread = static_cast<int>(std::ceil(3.0 * cfg.angular_sigma_rows));
  const int bin_spread = static_cast<int>(std::ceil(3.0 * cfg.beam_sigma_bins));
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  auto deposit = [&](double u_row, double v_bin, double amplitude) {
    const Eigen::Index ic = static_cast<Eigen::Index>(std::floor(u_row));
    for (int dr = -row_spread; dr <= row_spread; ++dr) {
      Eigen::Index row = ((ic + dr) % h + h) % h;
      row = (row + row_shift % h + h) % h;
      const double row_dist = static_cast<double>(ic + dr) + 0.5 - u_row;
      const double wa = std::exp(-row_dist * row_dist /
                                 (2.0 * cfg.angular_sigma_rows * cfg.angular_sigma_rows));
      const Eigen::Index jc = static_cast<Eigen::Index>(std::floor(v_bin));
      for (int db = -bin_spread; db <= bin_spread; ++db) {
        const Eigen::Index bin = jc + db;
        if (bin < 0 || bin >= w) continue;
        const double bin_dist = static_cast<double>(bin) + 0.5 - v_bin;
        const double wr = std::exp(-bin_dist * bin_dist /
                                   (2.0 * cfg.beam_sigma_bins * cfg.beam_sigma_bins));
        out.scan.intensities(row, bin) += static_cast<float>(amplitude * wa * wr);
      }
    }
  };

  auto mark_gt = [&](double u_row, double v_bin) {
    const Eigen::Index ic = static_cast<Eigen::Index>(std::floor(u_row));
    for (int dr = -row_spread - 1; dr <= row_spread + 1; ++dr) {
      const double row_dist = std::abs(static_cast<double>(ic + dr) + 0.5 - u_row);
      if (row_dist > cfg.angular_sigma_rows) continue;
      Eigen::Index row = ((ic + dr) % h + h) % h;
      row = (row + row_shift % h + h) % h;
      for (int db = -bin_spread - 1; db <= bin_spread + 1; ++db) {
        const Eigen::Index bin = static_cast<Eigen::Index>(std::floor(v_bin)) + db;
        if (bin < 0 || bin >= w) continue;
        const double bin_dist = std::abs(static_cast<double>(bin) + 0.5 - v_bin);
        if (bin_dist > cfg.beam_sigma_bins) continue;
        out.gt_mask.mask(row, bin) = true;
      }
    }
  };

  const double max_range = static_cast<double>(w) * cfg.range_resolution;
  for (const Landmark& lm : world.landmarks) {
    const double dx = lm.x - pose.x, dy = lm.y - pose.y;
    const double r = std::hypot(dx, dy);
    const bool ghost = uni(rng) < cfg.multipath_prob;  // drawn per landmark, visible or not
    if (r <= 0.0 || r >= max_range) continue;
    double theta_rel = std::atan2(dy, dx) - pose.yaw;
    theta_rel = std::fmod(theta_rel, 2.0 * M_PI);
    if (theta_rel < 0.0) theta_rel += 2.0 * M_PI;
    const double u_row = theta_rel / dtheta;
    const double v_bin = r / cfg.range_resolution;

    deposit(u_row, v_bin, lm.reflectivity);
    mark_gt(u_row, v_bin);
    if (ghost && 2.0 * r < max_range) deposit(u_row, 2.0 * v_bin, 0.4 * lm.reflectivity);
  }
  return out;
}

void add_speckle_and_clamp(RadarScan& scan, double scale, std::mt19937_64& rng) {
  if (scale > 0.0) {
    std::exponential_distribution<double> speckle(1.0 / scale);
    for (Eigen::Index i = 0; i < scan.intensities.rows(); ++i)
      for (Eigen::Index j = 0; j < scan.intensities.cols(); ++j)
        scan.intensities(i, j) += static_cast<float>(speckle(rng));
  }
  scan.intensities = scan.intensities.cwiseMax(0.0f).cwiseMin(1.0f);
}

}  // namespace

World make_world(int n_landmarks, double extent, double reflectivity_min,
                 double reflectivity_max, std::uint64_t seed) {
  if (n_landmarks < 1) throw ValidationError("make_world: need at least one landmark");
  if (extent <= 0.0) throw ValidationError("make_world: extent must be positive");
  if (!(0.0 < reflectivity_min && reflectivity_min <= reflectivity_max && reflectivity_max <= 1.0))
    throw ValidationError("make_world: reflectivity range must satisfy 0 < min <= max <= 1");
  World world;
  world.extent = extent;
  world.rng_seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-extent / 2.0, extent / 2.0);
  std::uniform_real_distribution<double> refl(reflectivity_min, reflectivity_max);
  world.landmarks.reserve(static_cast<std::size_t>(n_landmarks));
  for (int i = 0; i < n_landmarks; ++i) {
    Landmark lm;
    lm.x = pos(rng);
    lm.y = pos(rng);
    lm.reflectivity = refl(rng);
    world.landmarks.push_back(lm);
  }
  return world;
}

std::uint64_t derive_scan_seed(std::uint64_t session_seed, std::int64_t scan_id) {
  return mix_seed(session_seed ^ mix_seed(static_cast<std::uint64_t>(scan_id)));
}

RenderedScan render_scan(const World& world, const Pose2& pose, const SynthConfig& cfg,
                         std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  RenderedScan out = render_deposits(world, pose, cfg, 0, rng);
  add_speckle_and_clamp(out.scan, cfg.speckle_scale, rng);
  return out;
}

RotatedPair render_rotated_pair(const World& world, const Pose2& pose, double rotation_deg,
                                const SynthConfig& cfg, std::uint64_t seed) {
  return render_rotated_pair(world, pose, rotation_deg, cfg, seed, mix_seed(seed));
}

RotatedPair render_rotated_pair(const World& world, const Pose2& pose, double rotation_deg,
                                const SynthConfig& cfg, std::uint64_t seed, std::uint64_t seed_b) {
  validate(cfg);
  const double step_deg = 360.0 / static_cast<double>(cfg.azimuths);
  const long k = std::lround(rotation_deg / step_deg);
  RotatedPair pair;
  pair.gt_rotation_deg = static_cast<double>(((k % cfg.azimuths) + cfg.azimuths) % cfg.azimuths) * step_deg;

  std::mt19937_64 rng_a(seed);
  pair.a = render_deposits(world, pose, cfg, 0, rng_a);
  add_speckle_and_clamp(pair.a.scan, cfg.speckle_scale, rng_a);

  // Yaw + k steps moves scene content k rows toward lower indices.
  std::mt19937_64 rng_b(seed_b);
  pair.b = render_deposits(world, pose, cfg, static_cast<int>(-k), rng_b);
  add_speckle_and_clamp(pair.b.scan, cfg.speckle_scale, rng_b);
  pair.b.scan.scan_id = 1;
  pair.b.gt_mask.scan_id = 1;
  return pair;
}

Trajectory make_trajectory(const TrajectoryConfig& cfg) {
  if (cfg.n_scans < 8) throw ValidationError("make_trajectory: need at least 8 scans");
  if (cfg.radius <= 0.0) throw ValidationError("make_trajectory: radius must be positive");
  Trajectory traj;
  traj.gt.reserve(static_cast<std::size_t>(cfg.n_scans));
  const int n = cfg.n_scans;

  switch (cfg.kind) {
    case TrajectoryKind::kLoop:
      for (int t = 0; t < n; ++t) {
        const double phi = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(n);
        traj.gt.push_back({cfg.radius * std::cos(phi), cfg.radius * std::sin(phi),
                           wrap_angle(phi + M_PI / 2.0)});
      }
      break;
    case TrajectoryKind::kReverseLoop: {
      const int half = n / 2;
      const double step = 2.0 * cfg.radius / static_cast<double>(half - 1);
      for (int t = 0; t < half; ++t)
        traj.gt.push_back({-cfg.radius + step * static_cast<double>(t), 0.0, 0.0});
      for (int t = half; t < n; ++t) {
        const int back = n - 1 - t;
        traj.gt.push_back({-cfg.radius + step * static_cast<double>(back), 0.0, M_PI});
      }
      break;
    }
    case TrajectoryKind::kFigureEight:
      for (int t = 0; t < n; ++t) {
        const double phi = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(n);
        const double x = cfg.radius * std::sin(phi);
        const double y = cfg.radius * std::sin(phi) * std::cos(phi);
        const double dx = cfg.radius * std::cos(phi);
        const double dy = cfg.radius * std::cos(2.0 * phi);
        traj.gt.push_back({x, y, std::atan2(dy, dx)});
      }
      break;
  }

  if (cfg.odom_sigma_xy == 0.0 && cfg.odom_sigma_yaw == 0.0) {
    traj.odometry = traj.gt;
    return traj;
  }
  traj.odometry.reserve(traj.gt.size());
  traj.odometry.push_back(traj.gt.front());
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise_xy(0.0, cfg.odom_sigma_xy);
  std::normal_distribution<double> noise_yaw(0.0, cfg.odom_sigma_yaw);
  for (std::size_t t = 0; t + 1 < traj.gt.size(); ++t) {
    Pose2 rel = relative_pose(traj.gt[t], traj.gt[t + 1]);
    if (cfg.odom_sigma_xy > 0.0) {
      rel.x += noise_xy(rng);
      rel.y += noise_xy(rng);
    }
    if (cfg.odom_sigma_yaw > 0.0) rel.yaw = wrap_angle(rel.yaw + noise_yaw(rng));
    traj.odometry.push_back(compose(traj.odometry.back(), rel));
  }
  return traj;
}

}  // namespace referee
