#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "referee/descriptor.hpp"
#include "referee/kdtree.hpp"

namespace referee {

struct RetrievalConfig {
  double tau = 100.0;        // acceptance threshold on L2 distance, >= 0
  int exclusion_window = 50; // 0 disables; otherwise |query_id - cand_id| <= window is skipped
  bool use_linear_scan = false;
};

struct LoopCandidate {
  std::int64_t scan_id = 0;
  double distance = 0.0;
};

double l2_distance(const Eigen::VectorXf& a, const Eigen::VectorXf& b);

// Ordered descriptor set with an exact-NN index. Entries keep ascending
// scan_id order so index ties equal scan_id ties.
class DescriptorDatabase {
 public:
  explicit DescriptorDatabase(std::vector<DescriptorRecord> records);

  const std::vector<DescriptorRecord>& entries() const { return entries_; }
  std::uint64_t config_hash() const { return config_hash_; }
  Eigen::Index dim() const { return tree_.dim(); }

  // Nearest admissible entry regardless of tau; nullopt when the exclusion
  // window leaves nothing. Used for Recall@1 and as the query() core.
  std::optional<LoopCandidate> nearest(const Eigen::VectorXf& q, std::int64_t query_id,
                                       const RetrievalConfig& cfg) const;

  // Eq-style acceptance: nearest admissible entry if its distance < tau.
  std::optional<LoopCandidate> query(const Eigen::VectorXf& q, std::int64_t query_id,
                                     const RetrievalConfig& cfg) const;

 private:
  std::vector<DescriptorRecord> entries_;
  KdTree<float> tree_;
  std::uint64_t config_hash_ = 0;
};

DescriptorDatabase build_database(std::vector<DescriptorRecord> records);

}  // namespace referee
