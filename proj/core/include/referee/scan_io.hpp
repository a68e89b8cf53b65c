#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "referee/config.hpp"
#include "referee/descriptor.hpp"
#include "referee/geometry.hpp"
#include "referee/scan.hpp"

namespace referee {

struct PoseRecord {
  double timestamp = 0.0;
  Pose2 gt;
  std::optional<Pose2> odom;
};

struct SessionPoses {
  std::map<std::int64_t, PoseRecord> by_id;
  bool has_odometry = false;  // all rows carry odometry columns, or none do
};

struct Session {
  std::vector<RadarScan> scans;  // ascending scan_id
  SessionPoses poses;
};

// Reads scan_<id>.png / scan_<id>.pgm (8-bit grayscale, intensity v maps to
// v/255) plus poses.csv. Every scan needs a pose row; all scans must share
// one shape. range_resolution comes from the config's synth section.
Session load_session(const std::filesystem::path& dir, const PipelineConfig& config);

// poses.csv: header `scan_id,timestamp,x,y,yaw` with optional
// `,odom_x,odom_y,odom_yaw`; yaw in radians, normalized on load.
SessionPoses load_poses_csv(const std::filesystem::path& path);
void save_poses_csv(const std::filesystem::path& path, const SessionPoses& poses);

// 8-bit grayscale container; the format follows the file extension.
void save_scan_image(const std::filesystem::path& path, const RadarScan& scan);

// Binary descriptor interchange: magic "RFRE", u16 version, u32 N_w, u32 N_h,
// u64 config_hash, u64 count, then per record u64 scan_id followed by the
// R and A vectors as little-endian f32. Round-trips bit-exactly.
void save_descriptors(const std::vector<DescriptorRecord>& db, const std::filesystem::path& path);
std::vector<DescriptorRecord> load_descriptors(const std::filesystem::path& path);

void save_trajectory_csv(const std::filesystem::path& path,
                         const std::vector<std::int64_t>& scan_ids,
                         const std::vector<Pose2>& poses);

}  // namespace referee
