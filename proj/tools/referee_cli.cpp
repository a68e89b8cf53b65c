#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "referee/config.hpp"
#include "referee/errors.hpp"
#include "referee/pipeline.hpp"

namespace {

referee::PipelineConfig load_validated(const std::string& path) {
  referee::PipelineConfig cfg = referee::load_config(path);
  referee::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReFeree radar place recognition pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::string session_dir;
  std::string query_path;
  std::string db_path;
  std::string matches_path;
  std::string poses_path;
  std::string db_poses_path;

  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic radar session");
  synth->add_option("--config", config_path, "JSON pipeline configuration")->required();
  synth->add_option("--out", out_path, "output session directory")->required();
  synth->add_option("--seed", seed, "session seed");

  CLI::App* describe = app.add_subcommand("describe", "Compute descriptors for a session");
  describe->add_option("--config", config_path, "JSON pipeline configuration")->required();
  describe->add_option("--session", session_dir, "session directory")->required();
  describe->add_option("--out", out_path, "output descriptor file")->required();

  CLI::App* retrieve = app.add_subcommand("retrieve", "Match query descriptors against a database");
  retrieve->add_option("--config", config_path, "JSON pipeline configuration")->required();
  retrieve->add_option("--query", query_path, "query descriptor file")->required();
  retrieve->add_option("--db", db_path, "database descriptor file")->required();
  retrieve->add_option("--out", out_path, "output matches CSV")->required();

  CLI::App* eval = app.add_subcommand("eval", "Score a matches CSV against ground-truth poses");
  eval->add_option("--config", config_path, "JSON pipeline configuration")->required();
  eval->add_option("--matches", matches_path, "matches CSV from retrieve")->required();
  eval->add_option("--poses", poses_path, "query poses.csv")->required();
  eval->add_option("--db-poses", db_poses_path,
                   "database poses.csv (omit for single-session evaluation)");
  eval->add_option("--out", out_path, "output directory")->required();

  CLI::App* slam = app.add_subcommand("slam", "Online loop closing and pose-graph optimization");
  slam->add_option("--config", config_path, "JSON pipeline configuration")->required();
  slam->add_option("--session", session_dir, "session directory with odometry")->required();
  slam->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  }

  try {
    const referee::PipelineConfig cfg = load_validated(config_path);
    if (synth->parsed()) {
      referee::cmd_synth(cfg, out_path, seed);
    } else if (describe->parsed()) {
      referee::cmd_describe(session_dir, cfg, out_path);
    } else if (retrieve->parsed()) {
      referee::cmd_retrieve(query_path, db_path, cfg, out_path);
    } else if (eval->parsed()) {
      std::optional<std::filesystem::path> db_poses;
      if (!db_poses_path.empty()) db_poses = db_poses_path;
      referee::cmd_eval(matches_path, poses_path, db_poses, cfg, out_path);
    } else if (slam->parsed()) {
      referee::cmd_slam(session_dir, cfg, out_path);
    }
  } catch (const referee::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const referee::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
