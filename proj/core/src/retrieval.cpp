#include "referee/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "referee/errors.hpp"

namespace referee {

double l2_distance(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
  if (a.size() != b.size())
    throw ValidationError("l2_distance: length mismatch " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {

Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> to_matrix(
    const std::vector<DescriptorRecord>& records) {
  if (records.empty()) throw ValidationError("build_database: empty record list");
  const Eigen::Index dim = records.front().r_referee.size();
  if (dim == 0) throw ValidationError("build_database: zero-dimensional descriptors");
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].r_referee.size() != dim)
      throw ValidationError("build_database: mixed descriptor dimensions");
    m.row(static_cast<Eigen::Index>(i)) = records[i].r_referee.transpose();
  }
  return m;
}

}  // namespace

DescriptorDatabase::DescriptorDatabase(std::vector<DescriptorRecord> records)
    : entries_(std::move(records)) {
  if (entries_.empty()) throw ValidationError("build_database: empty record list");
  std::sort(entries_.begin(), entries_.end(),
            [](const DescriptorRecord& a, const DescriptorRecord& b) { return a.scan_id < b.scan_id; });
  config_hash_ = entries_.front().config_hash;
  for (const auto& rec : entries_) {
    if (rec.config_hash != config_hash_)
      throw ValidationError("build_database: records carry different config hashes");
  }
  tree_ = KdTree<float>(to_matrix(entries_));
}

std::optional<LoopCandidate> DescriptorDatabase::nearest(const Eigen::VectorXf& q,
                                                         std::int64_t query_id,
                                                         const RetrievalConfig& cfg) const {
  if (q.size() != tree_.dim()) throw ValidationError("query: descriptor dimension mismatch");
  const auto admissible = [&](Eigen::Index i) {
    if (cfg.exclusion_window <= 0) return true;
    const std::int64_t cand = entries_[static_cast<std::size_t>(i)].scan_id;
    return std::llabs(cand - query_id) > cfg.exclusion_window;
  };
  const KdTree<float>::Result r = cfg.use_linear_scan ? tree_.linear_nearest_if(q, admissible)
                                                      : tree_.nearest_if(q, admissible);
  if (r.index < 0) return std::nullopt;
  return LoopCandidate{entries_[static_cast<std::size_t>(r.index)].scan_id, std::sqrt(r.sq_dist)};
}

std::optional<LoopCandidate> DescriptorDatabase::query(const Eigen::VectorXf& q,
                                                       std::int64_t query_id,
                                                       const RetrievalConfig& cfg) const {
  auto cand = nearest(q, query_id, cfg);
  if (!cand || !(cand->distance < cfg.tau)) return std::nullopt;
  return cand;
}

DescriptorDatabase build_database(std::vector<DescriptorRecord> records) {
  return DescriptorDatabase(std::move(records));
}

}  // namespace referee
