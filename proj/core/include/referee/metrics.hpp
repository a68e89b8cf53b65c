#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "referee/geometry.hpp"

namespace referee {

// One retrieval outcome joined with ground truth. metric_distance_m is the
// Euclidean distance between the query and retrieved poses, present exactly
// when retrieved_id is.
struct MatchOutcome {
  std::int64_t query_id = 0;
  std::optional<std::int64_t> retrieved_id;
  double descriptor_distance = 0.0;
  double metric_distance_m = 0.0;
  bool has_true_revisit = false;
};

struct Classification {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct PrPoint {
  double tau = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // tau ascending
  double auc = 0.0;
  double f1_max = 0.0;
};

// A query is accepted iff it retrieved something at descriptor distance < tau.
// TP: accepted and within revisit_radius; FP: accepted but farther; FN: not
// accepted although a true revisit exists.
Classification classify(const std::vector<MatchOutcome>& outcomes, double tau,
                        double revisit_radius_m);

// Precision with zero acceptances is defined as 1 (curve anchor).
double precision_of(const Classification& c);
double recall_of(const Classification& c);

// Sweeps tau over every observed descriptor distance plus +inf; AUC by
// trapezoidal integration over recall.
PrCurve pr_curve(const std::vector<MatchOutcome>& outcomes, double revisit_radius_m);

// Fraction of true-revisit queries whose top-1 retrieval lies within the
// radius; no tau involved.
double recall_at_1(const std::vector<MatchOutcome>& outcomes, double revisit_radius_m);

// Smallest absolute angular difference on the circle, degrees in [0, 180].
double rotation_error(double est_deg, double gt_deg);

enum class ApeMode { kRmse, kLiteral };

// kRmse: sqrt(mean squared positional error). kLiteral: sqrt(mean of
// unsquared norms); both are reported by the CLI.
double ape(const std::vector<Pose2>& est, const std::vector<Pose2>& gt, ApeMode mode);

}  // namespace referee
