#include "referee/config.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "referee/errors.hpp"

namespace referee {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const char* section, std::initializer_list<const char*> keys) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known |= item.key() == k;
    if (!known)
      throw ValidationError(std::string("config: unknown key \"") + item.key() + "\" in section " +
                            section);
  }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for \"") + key + "\": " + e.what());
  }
}

void get_index(const json& j, const char* key, Eigen::Index& out) {
  std::int64_t v = out;
  get_to(j, key, v);
  out = v;
}

void get_vec3(const json& j, const char* key, Eigen::Vector3d& out) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  get_to(j, key, v);
  if (v.size() != 3)
    throw ValidationError(std::string("config: \"") + key + "\" must hold exactly 3 numbers");
  out = Eigen::Vector3d(v[0], v[1], v[2]);
}

std::string canon(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  reject_unknown(j, "top level",
                 {"feature", "descriptor", "retrieval", "icp", "posegraph", "metrics", "synth"});

  PipelineConfig cfg;
  if (j.contains("feature")) {
    const json& s = j["feature"];
    reject_unknown(s, "feature", {"smooth_window", "z_score", "min_intensity"});
    get_to(s, "smooth_window", cfg.feature.smooth_window);
    get_to(s, "z_score", cfg.feature.z_score);
    get_to(s, "min_intensity", cfg.feature.min_intensity);
  }
  if (j.contains("descriptor")) {
    const json& s = j["descriptor"];
    reject_unknown(s, "descriptor", {"beta", "alpha"});
    get_index(s, "beta", cfg.descriptor.beta);
    get_index(s, "alpha", cfg.descriptor.alpha);
  }
  if (j.contains("retrieval")) {
    const json& s = j["retrieval"];
    reject_unknown(s, "retrieval", {"tau", "exclusion_window", "use_linear_scan"});
    get_to(s, "tau", cfg.retrieval.tau);
    get_to(s, "exclusion_window", cfg.retrieval.exclusion_window);
    get_to(s, "use_linear_scan", cfg.retrieval.use_linear_scan);
  }
  if (j.contains("icp")) {
    const json& s = j["icp"];
    reject_unknown(s, "icp", {"max_corr_dist", "max_iterations", "tolerance", "fitness_threshold"});
    get_to(s, "max_corr_dist", cfg.icp.max_corr_dist);
    get_to(s, "max_iterations", cfg.icp.max_iterations);
    get_to(s, "tolerance", cfg.icp.tolerance);
    get_to(s, "fitness_threshold", cfg.icp.fitness_threshold);
  }
  if (j.contains("posegraph")) {
    const json& s = j["posegraph"];
    reject_unknown(s, "posegraph",
                   {"odom_information", "loop_information", "prior_information", "max_iterations",
                    "lambda_init", "relative_cost_tol"});
    get_vec3(s, "odom_information", cfg.posegraph.odom_information);
    get_vec3(s, "loop_information", cfg.posegraph.loop_information);
    get_to(s, "prior_information", cfg.posegraph.prior_information);
    get_to(s, "max_iterations", cfg.posegraph.max_iterations);
    get_to(s, "lambda_init", cfg.posegraph.lambda_init);
    get_to(s, "relative_cost_tol", cfg.posegraph.relative_cost_tol);
  }
  if (j.contains("metrics")) {
    const json& s = j["metrics"];
    reject_unknown(s, "metrics", {"revisit_radius_m"});
    get_to(s, "revisit_radius_m", cfg.metrics.revisit_radius_m);
  }
  if (j.contains("synth")) {
    const json& s = j["synth"];
    reject_unknown(s, "synth",
                   {"azimuths", "range_bins", "range_resolution", "beam_sigma_bins",
                    "angular_sigma_rows", "speckle_scale", "multipath_prob", "world", "trajectory"});
    get_index(s, "azimuths", cfg.synth.azimuths);
    get_index(s, "range_bins", cfg.synth.range_bins);
    get_to(s, "range_resolution", cfg.synth.range_resolution);
    get_to(s, "beam_sigma_bins", cfg.synth.beam_sigma_bins);
    get_to(s, "angular_sigma_rows", cfg.synth.angular_sigma_rows);
    get_to(s, "speckle_scale", cfg.synth.speckle_scale);
    get_to(s, "multipath_prob", cfg.synth.multipath_prob);
    if (s.contains("world")) {
      const json& w = s["world"];
      reject_unknown(w, "synth.world",
                     {"n_landmarks", "extent", "reflectivity_min", "reflectivity_max"});
      get_to(w, "n_landmarks", cfg.world.n_landmarks);
      get_to(w, "extent", cfg.world.extent);
      get_to(w, "reflectivity_min", cfg.world.reflectivity_min);
      get_to(w, "reflectivity_max", cfg.world.reflectivity_max);
    }
    if (s.contains("trajectory")) {
      const json& t = s["trajectory"];
      reject_unknown(t, "synth.trajectory",
                     {"kind", "n_scans", "radius", "odom_sigma_xy", "odom_sigma_yaw"});
      if (t.contains("kind")) {
        std::string kind;
        get_to(t, "kind", kind);
        if (kind == "loop")
          cfg.trajectory.kind = TrajectoryKind::kLoop;
        else if (kind == "reverse_loop")
          cfg.trajectory.kind = TrajectoryKind::kReverseLoop;
        else if (kind == "figure_eight")
          cfg.trajectory.kind = TrajectoryKind::kFigureEight;
        else
          throw ValidationError("config: trajectory kind must be loop, reverse_loop, or figure_eight");
      }
      get_to(t, "n_scans", cfg.trajectory.n_scans);
      get_to(t, "radius", cfg.trajectory.radius);
      get_to(t, "odom_sigma_xy", cfg.trajectory.odom_sigma_xy);
      get_to(t, "odom_sigma_yaw", cfg.trajectory.odom_sigma_yaw);
    }
  }
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("config: cannot read " + path.string());
  return parse_config(buf.str());
}

void validate_config(const PipelineConfig& cfg) {
  const auto& f = cfg.feature;
  if (f.smooth_window < 1 || f.smooth_window % 2 == 0)
    throw ValidationError("config: feature.smooth_window must be odd and positive");
  if (f.z_score <= 0.0) throw ValidationError("config: feature.z_score must be positive");
  if (f.min_intensity < 0.0 || f.min_intensity > 1.0)
    throw ValidationError("config: feature.min_intensity must be in [0, 1]");

  if (cfg.descriptor.beta < 0) throw ValidationError("config: descriptor.beta must be >= 0");
  if (cfg.descriptor.alpha < 1) throw ValidationError("config: descriptor.alpha must be >= 1");

  if (cfg.retrieval.tau < 0.0) throw ValidationError("config: retrieval.tau must be >= 0");
  if (cfg.retrieval.exclusion_window < 0)
    throw ValidationError("config: retrieval.exclusion_window must be >= 0");

  if (cfg.icp.max_corr_dist <= 0.0) throw ValidationError("config: icp.max_corr_dist must be > 0");
  if (cfg.icp.max_iterations < 1) throw ValidationError("config: icp.max_iterations must be >= 1");
  if (cfg.icp.tolerance <= 0.0) throw ValidationError("config: icp.tolerance must be > 0");
  if (cfg.icp.fitness_threshold <= 0.0)
    throw ValidationError("config: icp.fitness_threshold must be > 0");

  const auto& pg = cfg.posegraph;
  if (pg.odom_information.minCoeff() <= 0.0 || pg.loop_information.minCoeff() <= 0.0 ||
      pg.prior_information <= 0.0)
    throw ValidationError("config: posegraph information entries must be positive");
  if (pg.max_iterations < 1) throw ValidationError("config: posegraph.max_iterations must be >= 1");
  if (pg.lambda_init <= 0.0) throw ValidationError("config: posegraph.lambda_init must be > 0");
  if (pg.relative_cost_tol <= 0.0)
    throw ValidationError("config: posegraph.relative_cost_tol must be > 0");

  if (cfg.metrics.revisit_radius_m <= 0.0)
    throw ValidationError("config: metrics.revisit_radius_m must be > 0");

  const auto& s = cfg.synth;
  if (s.azimuths < 4 || s.range_bins < 4)
    throw ValidationError("config: synth scans need at least 4 azimuths and 4 range bins");
  if (s.range_resolution <= 0.0)
    throw ValidationError("config: synth.range_resolution must be > 0");
  if (s.beam_sigma_bins <= 0.0 || s.angular_sigma_rows <= 0.0)
    throw ValidationError("config: synth beam spreads must be > 0");
  if (s.speckle_scale < 0.0) throw ValidationError("config: synth.speckle_scale must be >= 0");
  if (s.multipath_prob < 0.0 || s.multipath_prob > 1.0)
    throw ValidationError("config: synth.multipath_prob must be in [0, 1]");
  if (s.azimuths % cfg.descriptor.alpha != 0)
    throw ValidationError("config: descriptor.alpha must divide synth.azimuths");

  const auto& w = cfg.world;
  if (w.n_landmarks < 1) throw ValidationError("config: synth.world.n_landmarks must be >= 1");
  if (w.extent <= 0.0) throw ValidationError("config: synth.world.extent must be > 0");
  if (!(0.0 < w.reflectivity_min && w.reflectivity_min <= w.reflectivity_max &&
        w.reflectivity_max <= 1.0))
    throw ValidationError("config: synth.world reflectivity range must satisfy 0 < min <= max <= 1");

  const auto& t = cfg.trajectory;
  if (t.n_scans < 8) throw ValidationError("config: synth.trajectory.n_scans must be >= 8");
  if (t.radius <= 0.0) throw ValidationError("config: synth.trajectory.radius must be > 0");
  if (t.odom_sigma_xy < 0.0 || t.odom_sigma_yaw < 0.0)
    throw ValidationError("config: synth.trajectory noise sigmas must be >= 0");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t config_hash(const PipelineConfig& cfg, Eigen::Index azimuths,
                          Eigen::Index range_bins) {
  const Eigen::Index beta = resolve_beta(cfg.descriptor, range_bins);
  if (azimuths % cfg.descriptor.alpha != 0)
    throw ValidationError("config_hash: alpha must divide the azimuth count");
  std::string canonical;
  canonical += "smooth_window=" + std::to_string(cfg.feature.smooth_window) + ";";
  canonical += "z_score=" + canon(cfg.feature.z_score) + ";";
  canonical += "min_intensity=" + canon(cfg.feature.min_intensity) + ";";
  canonical += "beta=" + std::to_string(beta) + ";";
  canonical += "alpha=" + std::to_string(cfg.descriptor.alpha) + ";";
  canonical += "azimuths=" + std::to_string(azimuths) + ";";
  canonical += "range_bins=" + std::to_string(range_bins) + ";";
  return fnv1a64(canonical);
}

}  // namespace referee
