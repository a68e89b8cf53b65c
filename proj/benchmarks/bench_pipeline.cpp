#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "referee/config.hpp"
#include "referee/descriptor.hpp"
#include "referee/feature_extraction.hpp"
#include "referee/geometry.hpp"
#include "referee/pose_graph.hpp"
#include "referee/registration.hpp"
#include "referee/retrieval.hpp"
#include "referee/synth.hpp"

namespace {

using namespace referee;

SynthConfig bench_synth() {
  SynthConfig s;
  s.azimuths = 400;
  s.range_bins = 3360;
  s.range_resolution = 0.0596;
  return s;
}

RenderedScan bench_scan(std::uint64_t seed) {
  const World world = make_world(96, 180.0, 0.5, 1.0, seed);
  return render_scan(world, Pose2{}, bench_synth(), seed + 1);
}

void bm_extract_features(benchmark::State& state) {
  const RenderedScan rendered = bench_scan(1);
  const FeatureConfig cfg;
  for (auto _ : state) {
    FeatureImage fi = extract_features(rendered.scan, cfg);
    benchmark::DoNotOptimize(fi.mask.data());
  }
}
BENCHMARK(bm_extract_features)->Unit(benchmark::kMillisecond);

void bm_describe(benchmark::State& state) {
  const RenderedScan rendered = bench_scan(2);
  const FeatureImage fi = extract_features(rendered.scan, FeatureConfig{});
  const DescriptorConfig cfg;
  for (auto _ : state) {
    Eigen::VectorXf r = r_referee(fi, cfg);
    Eigen::VectorXf a = a_referee(fi, cfg);
    benchmark::DoNotOptimize(r.data());
    benchmark::DoNotOptimize(a.data());
  }
}
BENCHMARK(bm_describe)->Unit(benchmark::kMillisecond);

void bm_retrieval_query(benchmark::State& state) {
  const Eigen::Index dim = 42;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> value(0.0f, 400.0f);
  std::vector<DescriptorRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    records[i].scan_id = static_cast<std::int64_t>(i);
    records[i].r_referee = Eigen::VectorXf::NullaryExpr(dim, [&](Eigen::Index) { return value(rng); });
    records[i].a_referee = Eigen::VectorXf::Zero(4);
  }
  const DescriptorDatabase db(std::move(records));
  RetrievalConfig cfg;
  cfg.exclusion_window = 50;
  Eigen::VectorXf q = Eigen::VectorXf::NullaryExpr(dim, [&](Eigen::Index) { return value(rng); });
  std::int64_t query_id = static_cast<std::int64_t>(n);
  for (auto _ : state) {
    auto hit = db.nearest(q, query_id, cfg);
    benchmark::DoNotOptimize(hit);
  }
}
BENCHMARK(bm_retrieval_query)->Arg(2000)->Arg(20000);

void bm_heading(benchmark::State& state) {
  const RenderedScan rendered = bench_scan(5);
  const FeatureImage fi = extract_features(rendered.scan, FeatureConfig{});
  const Eigen::VectorXf a_c = a_referee(fi, DescriptorConfig{});
  Eigen::VectorXf a_q(a_c.size());
  for (Eigen::Index i = 0; i < a_c.size(); ++i) a_q[(i + 137) % a_c.size()] = a_c[i];
  for (auto _ : state) {
    HeadingEstimate h = estimate_heading(a_q, a_c);
    benchmark::DoNotOptimize(h.n_hat);
  }
}
BENCHMARK(bm_heading);

void bm_pose_graph(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise_xy(0.0, 0.05);
  std::normal_distribution<double> noise_yaw(0.0, 0.01);
  std::vector<Pose2> gt, odom;
  for (int t = 0; t < n; ++t) {
    const double phi = 4.0 * M_PI * t / n;
    gt.push_back({20.0 * std::cos(phi), 20.0 * std::sin(phi), wrap_angle(phi + M_PI_2)});
  }
  odom.push_back(gt.front());
  for (int t = 0; t + 1 < n; ++t) {
    Pose2 rel = relative_pose(gt[t], gt[t + 1]);
    rel.x += noise_xy(rng);
    rel.y += noise_xy(rng);
    rel.yaw = wrap_angle(rel.yaw + noise_yaw(rng));
    odom.push_back(compose(odom.back(), rel));
  }
  std::vector<LoopClosure> loops;
  for (int q = n / 2; q < n; ++q) {
    LoopClosure loop;
    loop.query_id = q;
    loop.candidate_id = q - n / 2;
    loop.relative = relative_pose(gt[q], gt[q - n / 2]);
    loops.push_back(loop);
  }
  const PoseGraphConfig cfg;
  const FactorGraph graph = build_graph(odom, loops, cfg);
  for (auto _ : state) {
    auto [poses, report] = optimize(graph, odom, cfg);
    benchmark::DoNotOptimize(report.final_cost);
  }
}
BENCHMARK(bm_pose_graph)->Arg(60)->Arg(600)->Unit(benchmark::kMillisecond);

void bm_icp(benchmark::State& state) {
  const RenderedScan rendered = bench_scan(4);
  const FeatureImage fi = extract_features(rendered.scan, FeatureConfig{});
  const PointCloud2 target = polar_to_cloud(fi, bench_synth().range_resolution);
  const RigidTransform2 nudge =
      RigidTransform2::from_pose(Pose2{0.4, -0.3, 3.0 * M_PI / 180.0});
  const PointCloud2 source = transformed(target, nudge);
  const IcpConfig cfg;
  for (auto _ : state) {
    IcpResult res = icp(source, target, cfg);
    benchmark::DoNotOptimize(res.fitness);
  }
}
BENCHMARK(bm_icp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
