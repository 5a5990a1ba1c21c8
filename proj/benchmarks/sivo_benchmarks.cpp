#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sivo/estimator.hpp"
#include "sivo/scenario.hpp"
#include "sivo/selection.hpp"
#include "sivo/sim.hpp"

namespace {

using namespace sivo;

struct Frame {
  Scenario scenario = default_scenario();
  std::vector<Landmark> world;
  std::vector<Pose3> truth;
  std::vector<CandidateFeature> candidates;
  PoseBelief belief;

  explicit Frame(std::size_t frame = 0) {
    world = generate_world(scenario.world, scenario.selection.taxonomy);
    truth = generate_trajectory(scenario.trajectory);
    candidates = observe_frame(world, scenario.rig, truth[frame], scenario.observation,
                               scenario.seed, frame);
    for (auto& c : candidates) {
      c.semantics = simulate_mc_samples(c.landmark, scenario.dropout, scenario.seed, frame);
    }
    belief = {truth[frame], scenario.estimator.initial_covariance + scenario.estimator.process_noise};
  }
};

const Frame& shared_frame() {
  static const Frame frame;
  return frame;
}

void BM_MutualInformationScore(benchmark::State& state) {
  const Frame& f = shared_frame();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mutual_information_score(f.belief.covariance, f.candidates[i++ % f.candidates.size()]));
  }
}
BENCHMARK(BM_MutualInformationScore);

void BM_LiftedCovariance(benchmark::State& state) {
  const Frame& f = shared_frame();
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::span<const CandidateFeature> cs(f.candidates.data(), n);
  for (auto _ : state) benchmark::DoNotOptimize(lifted_covariance(f.belief.covariance, cs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LiftedCovariance)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_SelectBatch(benchmark::State& state) {
  const Frame& f = shared_frame();
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_batch(f.belief, f.candidates, f.scenario.selection));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.candidates.size()));
}
BENCHMARK(BM_SelectBatch);

void BM_GaussNewtonUpdate(benchmark::State& state) {
  const Frame& f = shared_frame();
  std::vector<StereoMeasurement> ms;
  for (const auto& c : f.candidates) {
    if (ms.size() == static_cast<std::size_t>(state.range(0))) break;
    ms.push_back({c.landmark.position, c.observation});
  }
  for (auto _ : state) benchmark::DoNotOptimize(update(f.belief, f.scenario.rig, ms));
}
BENCHMARK(BM_GaussNewtonUpdate)->Arg(16)->Arg(128);

void BM_ShortSequence(benchmark::State& state) {
  const Frame& f = shared_frame();
  const std::span<const Pose3> truth(f.truth.data(), 50);
  const Scenario& s = f.scenario;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sequence(f.world, truth, s.rig, s.selection, s.estimator,
                                          s.dropout, s.observation, s.seed));
  }
}
BENCHMARK(BM_ShortSequence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
