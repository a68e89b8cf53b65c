#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "referee/descriptor.hpp"
#include "referee/feature_extraction.hpp"
#include "referee/pose_graph.hpp"
#include "referee/registration.hpp"
#include "referee/retrieval.hpp"
#include "referee/synth.hpp"

namespace referee {

struct WorldConfig {
  int n_landmarks = 64;
  double extent = 70.0;
  double reflectivity_min = 0.55;
  double reflectivity_max = 1.0;
};

struct MetricsConfig {
  double revisit_radius_m = 20.0;
};

// One artifact of record for every module's parameters. JSON sections:
// feature, descriptor, retrieval, icp, posegraph, metrics, synth (with
// nested world and trajectory). Missing keys keep their defaults; unknown
// keys are rejected.
struct PipelineConfig {
  FeatureConfig feature;
  DescriptorConfig descriptor;
  RetrievalConfig retrieval;
  IcpConfig icp;
  PoseGraphConfig posegraph;
  MetricsConfig metrics;
  SynthConfig synth;
  WorldConfig world;
  TrajectoryConfig trajectory;
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
void validate_config(const PipelineConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

// Fingerprint of everything that shapes a descriptor: feature parameters,
// resolved block sizes, and the scan geometry. Descriptor files with equal
// hashes are directly comparable.
std::uint64_t config_hash(const PipelineConfig& cfg, Eigen::Index azimuths,
                          Eigen::Index range_bins);

}  // namespace referee
