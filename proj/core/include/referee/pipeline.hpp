#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "referee/config.hpp"
#include "referee/metrics.hpp"
#include "referee/pose_graph.hpp"
#include "referee/registration.hpp"
#include "referee/scan_io.hpp"

namespace referee {

// Writes a synthetic session (scan images + poses.csv with odometry columns)
// rendered over the configured world and trajectory. Deterministic per seed.
void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
               std::uint64_t seed);

// One descriptor record per scan, written to out_file.
void cmd_describe(const std::filesystem::path& session_dir, const PipelineConfig& cfg,
                  const std::filesystem::path& out_file);

// Top-1 match per query against the database file; rows
// `query_id,cand_id,distance,accepted` (cand_id -1, distance nan when the
// exclusion window leaves no candidate). Refuses mismatched config hashes.
void cmd_retrieve(const std::filesystem::path& query_descs, const std::filesystem::path& db_descs,
                  const PipelineConfig& cfg, const std::filesystem::path& out_csv);

// Joins a matches CSV with ground-truth poses and writes pr_curve.csv and
// summary.csv. Without db_poses the run is treated as single-session: the
// exclusion window defines which revisits count as reachable truth. Heading
// and trajectory errors are not derivable from a matches file, so those
// summary columns are nan here; cmd_slam fills them.
void cmd_eval(const std::filesystem::path& matches_csv, const std::filesystem::path& poses_csv,
              const std::optional<std::filesystem::path>& db_poses_csv, const PipelineConfig& cfg,
              const std::filesystem::path& out_dir);

// One retrieval-accepted candidate that went through heading + ICP
// verification; ids are scan ids.
struct LoopAttempt {
  std::int64_t query_id = 0;
  std::int64_t cand_id = 0;
  double desc_dist = 0.0;
  double heading_deg = 0.0;
  double fitness = 0.0;
  bool accepted = false;
};

struct SlamResult {
  std::vector<std::int64_t> scan_ids;       // node order
  std::vector<Pose2> odometry;
  std::vector<Pose2> optimized;
  std::vector<Pose2> ground_truth;
  std::vector<LoopClosure> accepted_loops;  // scan ids
  std::vector<LoopAttempt> attempts;
  std::vector<MatchOutcome> outcomes;       // causal, one per query that had a database
  OptimizeReport report;
};

// Online loop closing over one session: causal retrieval (database holds
// only past scans), heading seed, ICP verification, pose-graph optimization.
// Falls back to raw odometry (with a warning) when no loop survives.
// Writes trajectory.csv, loops.csv, pr_curve.csv, summary.csv.
SlamResult cmd_slam(const std::filesystem::path& session_dir, const PipelineConfig& cfg,
                    const std::filesystem::path& out_dir);

// In-memory core of cmd_slam, exposed for tests.
SlamResult run_slam(const Session& session, const PipelineConfig& cfg);

}  // namespace referee
