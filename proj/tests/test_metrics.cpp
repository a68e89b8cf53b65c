#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "referee/errors.hpp"
#include "referee/metrics.hpp"

using namespace referee;

namespace {

MatchOutcome outcome(std::int64_t id, double desc_dist, double metric_dist, bool positive) {
  MatchOutcome o;
  o.query_id = id;
  o.retrieved_id = id + 1000;
  o.descriptor_distance = desc_dist;
  o.metric_distance_m = metric_dist;
  o.has_true_revisit = positive;
  return o;
}

MatchOutcome empty_outcome(std::int64_t id, bool positive) {
  MatchOutcome o;
  o.query_id = id;
  o.has_true_revisit = positive;
  return o;
}

std::vector<MatchOutcome> random_outcomes(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> desc(0.0, 100.0);
  std::uniform_real_distribution<double> metric(0.0, 60.0);
  std::bernoulli_distribution positive(0.6);
  std::bernoulli_distribution retrieved(0.9);
  std::vector<MatchOutcome> outcomes;
  outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (retrieved(rng))
      outcomes.push_back(outcome(static_cast<std::int64_t>(i), desc(rng), metric(rng), positive(rng)));
    else
      outcomes.push_back(empty_outcome(static_cast<std::int64_t>(i), positive(rng)));
  }
  // Every metric-near retrieval implies a true revisit exists.
  for (auto& o : outcomes)
    if (o.retrieved_id && o.metric_distance_m <= 20.0) o.has_true_revisit = true;
  return outcomes;
}

// Independent O(n^2) sweep used as the AUC oracle.
PrCurve brute_force_curve(const std::vector<MatchOutcome>& outcomes, double radius) {
  std::vector<double> taus;
  for (const auto& o : outcomes)
    if (o.retrieved_id) taus.push_back(o.descriptor_distance);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  taus.push_back(std::numeric_limits<double>::infinity());

  PrCurve curve;
  for (double tau : taus) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (const auto& o : outcomes) {
      const bool accepted = o.retrieved_id.has_value() && o.descriptor_distance < tau;
      if (accepted && o.metric_distance_m <= radius) ++tp;
      if (accepted && o.metric_distance_m > radius) ++fp;
      if (!accepted && o.has_true_revisit) ++fn;
    }
    PrPoint p;
    p.tau = tau;
    p.precision = (tp + fp) == 0 ? 1.0 : double(tp) / double(tp + fp);
    p.recall = (tp + fn) == 0 ? 0.0 : double(tp) / double(tp + fn);
    p.f1 = (p.precision + p.recall) == 0.0 ? 0.0
                                           : 2.0 * p.precision * p.recall / (p.precision + p.recall);
    curve.points.push_back(p);
    curve.f1_max = std::max(curve.f1_max, p.f1);
  }
  double auc = 0.0;
  double prev_r = 0.0, prev_p = 1.0;
  for (const auto& p : curve.points) {
    auc += (p.recall - prev_r) * 0.5 * (p.precision + prev_p);
    prev_r = p.recall;
    prev_p = p.precision;
  }
  curve.auc = auc;
  return curve;
}

}  // namespace

TEST_CASE("classification over perfect retrievals") {
  std::vector<MatchOutcome> outcomes;
  for (int i = 0; i < 10; ++i) outcomes.push_back(outcome(i, 0.0, 0.0, true));
  const Classification c = classify(outcomes, 1.0, 20.0);
  CHECK(c.tp == 10);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  CHECK(precision_of(c) == 1.0);
  CHECK(recall_of(c) == 1.0);
}

TEST_CASE("zero tau accepts nothing and anchors precision at one") {
  std::vector<MatchOutcome> outcomes{outcome(0, 5.0, 1.0, true), outcome(1, 9.0, 30.0, true)};
  const Classification c = classify(outcomes, 0.0, 20.0);
  CHECK(c.tp == 0);
  CHECK(c.fp == 0);
  CHECK(c.fn == 2);
  CHECK(precision_of(c) == 1.0);
  CHECK(recall_of(c) == 0.0);
}

TEST_CASE("classification arithmetic") {
  std::vector<MatchOutcome> outcomes{
      outcome(0, 1.0, 1.0, true),  outcome(1, 1.0, 2.0, true),  outcome(2, 1.0, 3.0, true),
      outcome(3, 1.0, 50.0, false), outcome(4, 99.0, 1.0, true),
  };
  const Classification c = classify(outcomes, 10.0, 20.0);
  CHECK(c.tp == 3);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(precision_of(c) == doctest::Approx(0.75));
  CHECK(recall_of(c) == doctest::Approx(0.75));
}

TEST_CASE("classification counting identities hold on random data") {
  std::mt19937_64 rng(81);
  const auto outcomes = random_outcomes(200, rng);
  for (double tau : {5.0, 20.0, 50.0, 80.0}) {
    const Classification c = classify(outcomes, tau, 20.0);
    std::int64_t accepted = 0, positives = 0;
    for (const auto& o : outcomes) {
      if (o.retrieved_id && o.descriptor_distance < tau) ++accepted;
      if (o.has_true_revisit) ++positives;
    }
    CHECK(c.tp + c.fp == accepted);
    CHECK(c.tp + c.fn <= positives);
    CHECK(precision_of(c) >= 0.0);
    CHECK(precision_of(c) <= 1.0);
    CHECK(recall_of(c) >= 0.0);
    CHECK(recall_of(c) <= 1.0);
  }
}

TEST_CASE("perfectly separable outcomes reach auc and f1 of one") {
  std::vector<MatchOutcome> outcomes;
  for (int i = 0; i < 6; ++i) outcomes.push_back(outcome(i, 1.0 + i * 0.1, 5.0, true));
  for (int i = 6; i < 10; ++i) outcomes.push_back(outcome(i, 50.0 + i, 45.0, false));
  const PrCurve curve = pr_curve(outcomes, 20.0);
  CHECK(curve.auc == doctest::Approx(1.0));
  CHECK(curve.f1_max == doctest::Approx(1.0));
}

TEST_CASE("a single correct query yields the (1,1) point") {
  const PrCurve curve = pr_curve({outcome(0, 3.0, 1.0, true)}, 20.0);
  const bool has_perfect = std::any_of(curve.points.begin(), curve.points.end(), [](const PrPoint& p) {
    return p.precision == 1.0 && p.recall == 1.0;
  });
  CHECK(has_perfect);
}

TEST_CASE("pr curve equals the brute-force sweep") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 10; ++trial) {
    const auto outcomes = random_outcomes(150, rng);
    const PrCurve fast = pr_curve(outcomes, 20.0);
    const PrCurve slow = brute_force_curve(outcomes, 20.0);
    REQUIRE(fast.points.size() == slow.points.size());
    for (std::size_t k = 0; k < fast.points.size(); ++k) {
      CHECK(fast.points[k].precision == doctest::Approx(slow.points[k].precision).epsilon(1e-9));
      CHECK(fast.points[k].recall == doctest::Approx(slow.points[k].recall).epsilon(1e-9));
    }
    CHECK(fast.auc == doctest::Approx(slow.auc).epsilon(1e-9));
    CHECK(fast.f1_max == doctest::Approx(slow.f1_max).epsilon(1e-9));
  }
}

TEST_CASE("auc is a rank statistic of the distances") {
  std::mt19937_64 rng(83);
  auto outcomes = random_outcomes(120, rng);
  const double base = pr_curve(outcomes, 20.0).auc;
  for (auto& o : outcomes)
    o.descriptor_distance = std::exp(o.descriptor_distance / 25.0);  // strictly monotone
  CHECK(pr_curve(outcomes, 20.0).auc == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("pr curve requires at least one positive query") {
  std::vector<MatchOutcome> outcomes{outcome(0, 1.0, 50.0, false)};
  CHECK_THROWS_AS(pr_curve(outcomes, 20.0), ValidationError);
}

TEST_CASE("recall at one ignores the threshold") {
  std::vector<MatchOutcome> outcomes;
  for (int i = 0; i < 7; ++i) outcomes.push_back(outcome(i, 1000.0, 5.0, true));
  for (int i = 7; i < 10; ++i) outcomes.push_back(outcome(i, 0.001, 35.0, true));
  CHECK(recall_at_1(outcomes, 20.0) == doctest::Approx(0.7));

  std::vector<MatchOutcome> all;
  for (int i = 0; i < 4; ++i) all.push_back(outcome(i, 1.0, 1.0, true));
  CHECK(recall_at_1(all, 20.0) == 1.0);

  std::vector<MatchOutcome> none;
  for (int i = 0; i < 4; ++i) none.push_back(outcome(i, 1.0, 30.0, true));
  CHECK(recall_at_1(none, 20.0) == 0.0);

  CHECK_THROWS_AS(recall_at_1({outcome(0, 1.0, 1.0, false)}, 20.0), ValidationError);
}

TEST_CASE("rotation error is the circle metric") {
  CHECK(rotation_error(90.0, 90.0) == 0.0);
  CHECK(rotation_error(359.0, 1.0) == doctest::Approx(2.0));
  CHECK(rotation_error(180.0, 0.0) == doctest::Approx(180.0));

  std::mt19937_64 rng(84);
  std::uniform_real_distribution<double> deg(0.0, 360.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = deg(rng), b = deg(rng), c = deg(rng);
    CHECK(rotation_error(a, b) == rotation_error(b, a));
    CHECK(rotation_error(a, b) >= 0.0);
    CHECK(rotation_error(a, b) <= 180.0);
    CHECK(rotation_error(a, c) <= rotation_error(a, b) + rotation_error(b, c) + 1e-12);
  }
}

TEST_CASE("ape in both modes") {
  const std::vector<Pose2> gt{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK(ape(gt, gt, ApeMode::kRmse) == 0.0);
  CHECK(ape(gt, gt, ApeMode::kLiteral) == 0.0);

  std::vector<Pose2> off = gt;
  for (auto& p : off) p.y += 2.0;
  CHECK(ape(off, gt, ApeMode::kRmse) == doctest::Approx(2.0));
  CHECK(ape(off, gt, ApeMode::kLiteral) == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(ape(off, std::vector<Pose2>{{0, 0, 0}}, ApeMode::kRmse), ValidationError);
}

TEST_CASE("ape equals naive loops on random trajectories") {
  std::mt19937_64 rng(85);
  std::uniform_real_distribution<double> coord(-30.0, 30.0);
  std::vector<Pose2> est(40), gt(40);
  for (int i = 0; i < 40; ++i) {
    est[i] = {coord(rng), coord(rng), 0.0};
    gt[i] = {coord(rng), coord(rng), 0.0};
  }
  double sq = 0.0, lin = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double d = std::hypot(est[i].x - gt[i].x, est[i].y - gt[i].y);
    sq += d * d;
    lin += d;
  }
  CHECK(ape(est, gt, ApeMode::kRmse) == doctest::Approx(std::sqrt(sq / 40.0)).epsilon(1e-9));
  CHECK(ape(est, gt, ApeMode::kLiteral) == doctest::Approx(std::sqrt(lin / 40.0)).epsilon(1e-9));
}
