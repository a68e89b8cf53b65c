#include "referee/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "referee/errors.hpp"

namespace referee {

Classification classify(const std::vector<MatchOutcome>& outcomes, double tau,
                        double revisit_radius_m) {
  if (revisit_radius_m <= 0.0) throw ValidationError("classify: revisit radius must be positive");
  Classification c;
  for (const MatchOutcome& o : outcomes) {
    const bool accepted = o.retrieved_id.has_value() && o.descriptor_distance < tau;
    if (accepted) {
      if (o.metric_distance_m <= revisit_radius_m)
        ++c.tp;
      else
        ++c.fp;
    } else if (o.has_true_revisit) {
      ++c.fn;
    }
  }
  return c;
}

double precision_of(const Classification& c) {
  const std::int64_t denom = c.tp + c.fp;
  return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall_of(const Classification& c) {
  const std::int64_t denom = c.tp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

PrCurve pr_curve(const std::vector<MatchOutcome>& outcomes, double revisit_radius_m) {
  bool any_positive = false;
  for (const MatchOutcome& o : outcomes) any_positive |= o.has_true_revisit;
  if (!any_positive) throw ValidationError("pr_curve: no query has a true revisit");

  std::vector<double> taus;
  for (const MatchOutcome& o : outcomes) {
    if (o.retrieved_id) taus.push_back(o.descriptor_distance);
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  taus.push_back(std::numeric_limits<double>::infinity());

  PrCurve curve;
  curve.points.reserve(taus.size());
  for (double tau : taus) {
    const Classification c = classify(outcomes, tau, revisit_radius_m);
    PrPoint p;
    p.tau = tau;
    p.precision = precision_of(c);
    p.recall = recall_of(c);
    p.f1 = (p.precision + p.recall) > 0.0
               ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
               : 0.0;
    curve.points.push_back(p);
    curve.f1_max = std::max(curve.f1_max, p.f1);
  }

  // Trapezoid over recall, anchored at (recall 0, precision 1).
  double auc = 0.0;
  double prev_recall = 0.0, prev_precision = 1.0;
  for (const PrPoint& p : curve.points) {
    auc += (p.recall - prev_recall) * 0.5 * (p.precision + prev_precision);
    prev_recall = p.recall;
    prev_precision = p.precision;
  }
  curve.auc = auc;
  return curve;
}

double recall_at_1(const std::vector<MatchOutcome>& outcomes, double revisit_radius_m) {
  std::int64_t positives = 0, hits = 0;
  for (const MatchOutcome& o : outcomes) {
    if (!o.has_true_revisit) continue;
    ++positives;
    if (o.retrieved_id && o.metric_distance_m <= revisit_radius_m) ++hits;
  }
  if (positives == 0) throw ValidationError("recall_at_1: no query has a true revisit");
  return static_cast<double>(hits) / static_cast<double>(positives);
}

double rotation_error(double est_deg, double gt_deg) {
  double d = std::fmod(std::fabs(est_deg - gt_deg), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

double ape(const std::vector<Pose2>& est, const std::vector<Pose2>& gt, ApeMode mode) {
  if (est.size() != gt.size()) throw ValidationError("ape: trajectory length mismatch");
  if (est.empty()) throw ValidationError("ape: empty trajectories");
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double dx = est[i].x - gt[i].x, dy = est[i].y - gt[i].y;
    const double norm = std::sqrt(dx * dx + dy * dy);
    acc += mode == ApeMode::kRmse ? norm * norm : norm;
  }
  return std::sqrt(acc / static_cast<double>(est.size()));
}

}  // namespace referee
