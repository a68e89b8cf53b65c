#include "referee/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "referee/descriptor.hpp"
#include "referee/errors.hpp"
#include "referee/feature_extraction.hpp"
#include "referee/retrieval.hpp"
#include "referee/synth.hpp"

namespace referee {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

std::string scan_filename(std::int64_t id) {
  std::ostringstream name;
  name << "scan_" << std::setw(6) << std::setfill('0') << id << ".png";
  return name.str();
}

struct DescribedSession {
  std::vector<FeatureImage> features;
  std::vector<DescriptorRecord> records;
};

DescribedSession describe_session(const Session& session, const PipelineConfig& cfg) {
  DescribedSession out;
  out.features.reserve(session.scans.size());
  out.records.reserve(session.scans.size());
  const std::uint64_t hash =
      config_hash(cfg, session.scans.front().intensities.rows(), session.scans.front().intensities.cols());
  for (const RadarScan& scan : session.scans) {
    FeatureImage fi = extract_features(scan, cfg.feature);
    DescriptorRecord rec;
    rec.scan_id = scan.scan_id;
    rec.r_referee = r_referee(fi, cfg.descriptor);
    rec.a_referee = a_referee(fi, cfg.descriptor);
    rec.config_hash = hash;
    out.records.push_back(std::move(rec));
    out.features.push_back(std::move(fi));
  }
  return out;
}

struct MatchRow {
  std::int64_t query_id = 0;
  std::int64_t cand_id = -1;  // -1 means no admissible candidate
  double distance = kNan;
  bool accepted = false;
};

void write_matches_csv(const std::filesystem::path& path, const std::vector<MatchRow>& rows) {
  std::ofstream out = open_out(path);
  out << "query_id,cand_id,distance,accepted\n";
  for (const MatchRow& r : rows)
    out << r.query_id << ',' << r.cand_id << ',' << r.distance << ',' << (r.accepted ? 1 : 0)
        << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("matches csv: bad " + what + " value '" + s + "'");
  }
}

std::int64_t parse_int_field(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("matches csv: bad " + what + " value '" + s + "'");
  }
}

std::vector<MatchRow> load_matches_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("matches csv: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "query_id,cand_id,distance,accepted")
    throw ValidationError("matches csv: unexpected header '" + line + "'");
  std::vector<MatchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw ValidationError("matches csv: expected 4 fields, got " +
                            std::to_string(fields.size()));
    MatchRow r;
    r.query_id = parse_int_field(fields[0], "query_id");
    r.cand_id = parse_int_field(fields[1], "cand_id");
    r.distance = parse_double_field(fields[2], "distance");
    const std::int64_t acc = parse_int_field(fields[3], "accepted");
    if (acc != 0 && acc != 1) throw ValidationError("matches csv: accepted must be 0 or 1");
    r.accepted = acc == 1;
    rows.push_back(r);
  }
  return rows;
}

void write_pr_curve_csv(const std::filesystem::path& path, const std::vector<PrPoint>& points) {
  std::ofstream out = open_out(path);
  out << "tau,precision,recall,f1\n";
  for (const PrPoint& p : points)
    out << p.tau << ',' << p.precision << ',' << p.recall << ',' << p.f1 << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

struct Summary {
  double auc = kNan;
  double f1_max = kNan;
  double recall_at_1 = kNan;
  double mean_re_deg = kNan;
  double ape_rmse_m = kNan;
  double ape_literal_m = kNan;
};

void write_summary_csv(const std::filesystem::path& path, const Summary& s) {
  std::ofstream out = open_out(path);
  out << "auc,f1_max,recall_at_1,mean_re_deg,ape_rmse_m,ape_literal_m\n";
  out << s.auc << ',' << s.f1_max << ',' << s.recall_at_1 << ',' << s.mean_re_deg << ','
      << s.ape_rmse_m << ',' << s.ape_literal_m << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

const PoseRecord& pose_of(const SessionPoses& poses, std::int64_t id, const char* role) {
  const auto it = poses.by_id.find(id);
  if (it == poses.by_id.end())
    throw ValidationError(std::string("no pose for ") + role + " scan " + std::to_string(id));
  return it->second;
}

double planar_distance(const Pose2& a, const Pose2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// The heading estimate approximates the row shift between the two scans,
// whose ground truth is -(yaw_q - yaw_c) mapped to [0, 360).
double gt_heading_deg(const Pose2& query, const Pose2& cand) {
  const double deg = -(query.yaw - cand.yaw) * 180.0 / M_PI;
  const double wrapped = std::fmod(deg, 360.0);
  return wrapped < 0.0 ? wrapped + 360.0 : wrapped;
}

}  // namespace

void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
               std::uint64_t seed) {
  validate_config(cfg);
  ensure_dir(out_dir);

  const World world = make_world(cfg.world.n_landmarks, cfg.world.extent,
                                 cfg.world.reflectivity_min, cfg.world.reflectivity_max, seed);
  TrajectoryConfig traj_cfg = cfg.trajectory;
  traj_cfg.seed = derive_scan_seed(seed, -1);
  const Trajectory traj = make_trajectory(traj_cfg);

  SessionPoses poses;
  poses.has_odometry = true;
  for (std::size_t i = 0; i < traj.gt.size(); ++i) {
    const auto id = static_cast<std::int64_t>(i);
    RenderedScan rendered = render_scan(world, traj.gt[i], cfg.synth, derive_scan_seed(seed, id));
    rendered.scan.scan_id = id;
    rendered.scan.timestamp = 0.25 * static_cast<double>(i);
    save_scan_image(out_dir / scan_filename(id), rendered.scan);
    poses.by_id[id] = PoseRecord{rendered.scan.timestamp, traj.gt[i], traj.odometry[i]};
  }
  save_poses_csv(out_dir / "poses.csv", poses);
}

void cmd_describe(const std::filesystem::path& session_dir, const PipelineConfig& cfg,
                  const std::filesystem::path& out_file) {
  validate_config(cfg);
  const Session session = load_session(session_dir, cfg);
  const DescribedSession described = describe_session(session, cfg);
  save_descriptors(described.records, out_file);
}

void cmd_retrieve(const std::filesystem::path& query_descs, const std::filesystem::path& db_descs,
                  const PipelineConfig& cfg, const std::filesystem::path& out_csv) {
  validate_config(cfg);
  const std::vector<DescriptorRecord> queries = load_descriptors(query_descs);
  std::vector<DescriptorRecord> db_records = load_descriptors(db_descs);
  if (queries.empty()) throw ValidationError("query descriptor file has no records");
  if (!db_records.empty() && queries.front().config_hash != db_records.front().config_hash)
    throw ValidationError("config hash mismatch between query and database descriptor files");

  const DescriptorDatabase db = build_database(std::move(db_records));
  std::vector<MatchRow> rows;
  rows.reserve(queries.size());
  for (const DescriptorRecord& q : queries) {
    MatchRow row;
    row.query_id = q.scan_id;
    if (const auto cand = db.nearest(q.r_referee, q.scan_id, cfg.retrieval)) {
      row.cand_id = cand->scan_id;
      row.distance = cand->distance;
      row.accepted = cand->distance < cfg.retrieval.tau;
    }
    rows.push_back(row);
  }
  write_matches_csv(out_csv, rows);
}

void cmd_eval(const std::filesystem::path& matches_csv, const std::filesystem::path& poses_csv,
              const std::optional<std::filesystem::path>& db_poses_csv, const PipelineConfig& cfg,
              const std::filesystem::path& out_dir) {
  validate_config(cfg);
  const std::vector<MatchRow> rows = load_matches_csv(matches_csv);
  const SessionPoses query_poses = load_poses_csv(poses_csv);
  const SessionPoses db_poses = db_poses_csv ? load_poses_csv(*db_poses_csv) : query_poses;
  const bool single_session = !db_poses_csv.has_value();
  const int window = single_session ? cfg.retrieval.exclusion_window : 0;

  std::vector<MatchOutcome> outcomes;
  outcomes.reserve(rows.size());
  for (const MatchRow& r : rows) {
    const PoseRecord& qp = pose_of(query_poses, r.query_id, "query");
    MatchOutcome o;
    o.query_id = r.query_id;
    if (r.cand_id >= 0) {
      const PoseRecord& cp = pose_of(db_poses, r.cand_id, "candidate");
      o.retrieved_id = r.cand_id;
      o.descriptor_distance = r.distance;
      o.metric_distance_m = planar_distance(qp.gt, cp.gt);
    }
    for (const auto& [cid, cp] : db_poses.by_id) {
      if (window > 0 && std::llabs(cid - r.query_id) <= window) continue;
      if (planar_distance(qp.gt, cp.gt) <= cfg.metrics.revisit_radius_m) {
        o.has_true_revisit = true;
        break;
      }
    }
    outcomes.push_back(o);
  }

  const PrCurve curve = pr_curve(outcomes, cfg.metrics.revisit_radius_m);
  ensure_dir(out_dir);
  write_pr_curve_csv(out_dir / "pr_curve.csv", curve.points);
  Summary s;
  s.auc = curve.auc;
  s.f1_max = curve.f1_max;
  s.recall_at_1 = recall_at_1(outcomes, cfg.metrics.revisit_radius_m);
  write_summary_csv(out_dir / "summary.csv", s);
  std::cout << "auc=" << curve.auc << " f1_max=" << curve.f1_max << " recall_at_1=" << s.recall_at_1
            << '\n';
}

SlamResult run_slam(const Session& session, const PipelineConfig& cfg) {
  validate_config(cfg);
  if (session.scans.empty()) throw ValidationError("slam: session has no scans");
  if (!session.poses.has_odometry)
    throw ValidationError("slam: poses.csv carries no odometry columns");

  SlamResult res;
  const std::size_t n = session.scans.size();
  res.scan_ids.reserve(n);
  res.odometry.reserve(n);
  res.ground_truth.reserve(n);
  for (const RadarScan& scan : session.scans) {
    const PoseRecord& pr = pose_of(session.poses, scan.scan_id, "session");
    res.scan_ids.push_back(scan.scan_id);
    res.odometry.push_back(*pr.odom);
    res.ground_truth.push_back(pr.gt);
  }

  const DescribedSession described = describe_session(session, cfg);
  const auto node_of = [&](std::int64_t id) {
    const auto it = std::lower_bound(res.scan_ids.begin(), res.scan_ids.end(), id);
    return static_cast<std::size_t>(it - res.scan_ids.begin());
  };

  std::vector<LoopClosure> graph_loops;  // node indices, for the factor graph
  std::vector<DescriptorRecord> past;
  past.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const DescriptorRecord& q = described.records[t];
    if (!past.empty()) {
      const DescriptorDatabase db(past);
      MatchOutcome outcome;
      outcome.query_id = q.scan_id;
      const auto cand = db.nearest(q.r_referee, q.scan_id, cfg.retrieval);
      if (cand) {
        outcome.retrieved_id = cand->scan_id;
        outcome.descriptor_distance = cand->distance;
        outcome.metric_distance_m =
            planar_distance(res.ground_truth[t], res.ground_truth[node_of(cand->scan_id)]);
      }
      for (std::size_t s = 0; s < t; ++s) {
        if (cfg.retrieval.exclusion_window > 0 &&
            std::llabs(res.scan_ids[s] - q.scan_id) <= cfg.retrieval.exclusion_window)
          continue;
        if (planar_distance(res.ground_truth[t], res.ground_truth[s]) <=
            cfg.metrics.revisit_radius_m) {
          outcome.has_true_revisit = true;
          break;
        }
      }
      res.outcomes.push_back(outcome);

      if (cand && cand->distance < cfg.retrieval.tau) {
        const std::size_t c = node_of(cand->scan_id);
        const HeadingEstimate heading =
            estimate_heading(q.a_referee, described.records[c].a_referee);
        const RigidTransform2 t_heading = heading_to_transform(heading);
        const PointCloud2 cloud_q =
            polar_to_cloud(described.features[t], session.scans[t].range_resolution);
        const PointCloud2 cloud_c =
            polar_to_cloud(described.features[c], session.scans[c].range_resolution);
        const PointCloud2 aligned_q = apply_initial_alignment(cloud_q, t_heading);
        const IcpResult icp_res = icp(cloud_c, aligned_q, cfg.icp);
        const auto composed = compose_and_verify(t_heading, icp_res, cfg.icp.fitness_threshold);

        LoopAttempt attempt;
        attempt.query_id = q.scan_id;
        attempt.cand_id = cand->scan_id;
        attempt.desc_dist = cand->distance;
        attempt.heading_deg = heading.angle_deg;
        attempt.fitness = icp_res.fitness;
        attempt.accepted = composed.has_value();
        res.attempts.push_back(attempt);

        if (composed) {
          LoopClosure loop;
          loop.query_id = static_cast<std::int64_t>(t);
          loop.candidate_id = static_cast<std::int64_t>(c);
          loop.descriptor_distance = cand->distance;
          loop.heading_deg = heading.angle_deg;
          loop.relative = composed->to_pose();
          loop.fitness = icp_res.fitness;
          graph_loops.push_back(loop);

          LoopClosure named = loop;
          named.query_id = q.scan_id;
          named.candidate_id = cand->scan_id;
          res.accepted_loops.push_back(named);
        }
      }
    }
    past.push_back(q);
  }

  const FactorGraph graph = build_graph(res.odometry, graph_loops, cfg.posegraph);
  auto [optimized, report] = optimize(graph, res.odometry, cfg.posegraph);
  res.optimized = std::move(optimized);
  res.report = report;
  return res;
}

SlamResult cmd_slam(const std::filesystem::path& session_dir, const PipelineConfig& cfg,
                    const std::filesystem::path& out_dir) {
  const Session session = load_session(session_dir, cfg);
  SlamResult res = run_slam(session, cfg);
  if (res.accepted_loops.empty())
    std::cerr << "warning: no verified loop closures; trajectory equals odometry\n";

  ensure_dir(out_dir);
  save_trajectory_csv(out_dir / "trajectory.csv", res.scan_ids, res.optimized);

  {
    std::ofstream out = open_out(out_dir / "loops.csv");
    out << "query_id,cand_id,desc_dist,heading_deg,fitness,accepted\n";
    for (const LoopAttempt& a : res.attempts)
      out << a.query_id << ',' << a.cand_id << ',' << a.desc_dist << ',' << a.heading_deg << ','
          << a.fitness << ',' << (a.accepted ? 1 : 0) << '\n';
    if (!out) throw IoError("failed writing " + (out_dir / "loops.csv").string());
  }

  Summary s;
  const bool any_positive =
      std::any_of(res.outcomes.begin(), res.outcomes.end(),
                  [](const MatchOutcome& o) { return o.has_true_revisit; });
  if (any_positive) {
    const PrCurve curve = pr_curve(res.outcomes, cfg.metrics.revisit_radius_m);
    write_pr_curve_csv(out_dir / "pr_curve.csv", curve.points);
    s.auc = curve.auc;
    s.f1_max = curve.f1_max;
    s.recall_at_1 = recall_at_1(res.outcomes, cfg.metrics.revisit_radius_m);
  } else {
    write_pr_curve_csv(out_dir / "pr_curve.csv", {});
  }
  if (!res.accepted_loops.empty()) {
    const auto node_of = [&](std::int64_t id) {
      return static_cast<std::size_t>(
          std::lower_bound(res.scan_ids.begin(), res.scan_ids.end(), id) - res.scan_ids.begin());
    };
    double sum = 0.0;
    for (const LoopClosure& loop : res.accepted_loops) {
      const Pose2& gq = res.ground_truth[node_of(loop.query_id)];
      const Pose2& gc = res.ground_truth[node_of(loop.candidate_id)];
      sum += rotation_error(loop.heading_deg, gt_heading_deg(gq, gc));
    }
    s.mean_re_deg = sum / static_cast<double>(res.accepted_loops.size());
  }
  s.ape_rmse_m = ape(res.optimized, res.ground_truth, ApeMode::kRmse);
  s.ape_literal_m = ape(res.optimized, res.ground_truth, ApeMode::kLiteral);
  write_summary_csv(out_dir / "summary.csv", s);

  const double odom_ape = ape(res.odometry, res.ground_truth, ApeMode::kRmse);
  std::cout << "loops_accepted=" << res.accepted_loops.size() << " ape_rmse_m=" << s.ape_rmse_m
            << " odometry_ape_rmse_m=" << odom_ape << '\n';
  return res;
}

}  // namespace referee
