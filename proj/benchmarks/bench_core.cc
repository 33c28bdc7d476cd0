// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "sepkit/estimator.h"
#include "sepkit/features.h"
#include "sepkit/masks.h"
#include "sepkit/metrics.h"
#include "sepkit/room.h"
#include "sepkit/stft.h"
#include "sepkit/util.h"

namespace {

using namespace sepkit;

Eigen::VectorXd NoiseSignal(Eigen::Index n, uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.Normal();
  return x;
}

void BM_Stft(benchmark::State& state) {
  const StftKernel kernel = MakeStftKernel(DefaultAnalysisConfig(16000.0));
  const Eigen::VectorXd x = NoiseSignal(16000 * state.range(0), 1);
  for (auto _ : state) {
    auto spec = Stft(x, kernel);
    benchmark::DoNotOptimize(spec.values.data());
  }
}
BENCHMARK(BM_Stft)->Arg(1)->Arg(4);

void BM_IstftRoundtrip(benchmark::State& state) {
  const StftKernel kernel = MakeStftKernel(DefaultAnalysisConfig(16000.0));
  const ComplexSpectrogram spec = Stft(NoiseSignal(16000, 2), kernel);
  for (auto _ : state) {
    auto y = Istft(spec, kernel);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_IstftRoundtrip);

void BM_SimulateRir(benchmark::State& state) {
  RoomSpec room{5.0, 6.0, 3.0, 0.05 * state.range(0)};
  const double absorption = T60ToAbsorption(room, AbsorptionModel::kIsm);
  std::vector<Eigen::Vector3d> mics;
  ArrayGeometry array;
  array.center = {2.5, 3.0, 1.5};
  for (int m = 0; m < 6; ++m) mics.push_back(array.MicPosition(m));
  for (auto _ : state) {
    auto rirs = SimulateRirs(room, {1.2, 1.5, 1.5}, mics, absorption);
    benchmark::DoNotOptimize(rirs.data());
  }
}
BENCHMARK(BM_SimulateRir)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SiSnr(benchmark::State& state) {
  const Eigen::VectorXd ref = NoiseSignal(16000, 3);
  const Eigen::VectorXd est = ref + 0.1 * NoiseSignal(16000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(SiSnr(est, ref));
}
BENCHMARK(BM_SiSnr);

void BM_Sdr512(benchmark::State& state) {
  const Eigen::VectorXd r0 = NoiseSignal(16000, 5);
  const Eigen::VectorXd r1 = NoiseSignal(16000, 6);
  const Eigen::VectorXd est = r0 + 0.2 * r1;
  const std::vector<Eigen::VectorXd> refs = {r0, r1};
  for (auto _ : state) benchmark::DoNotOptimize(Sdr(est, refs, 0, 512));
}
BENCHMARK(BM_Sdr512)->Unit(benchmark::kMillisecond);

void BM_ComputeIpd(benchmark::State& state) {
  const StftKernel kernel = MakeStftKernel(DefaultAnalysisConfig(16000.0));
  std::vector<ComplexSpectrogram> specs;
  for (int m = 0; m < 6; ++m) specs.push_back(Stft(NoiseSignal(16000, 10 + m), kernel));
  const auto pairs = DefaultPairList();
  for (auto _ : state) {
    auto ipd = ComputeIpd(specs, pairs);
    benchmark::DoNotOptimize(ipd.raw.data());
  }
}
BENCHMARK(BM_ComputeIpd)->Unit(benchmark::kMillisecond);

void BM_EstimatorForward(benchmark::State& state) {
  const MaskEstimator est =
      MaskEstimator::Create(FeatureMode::kMagIpdAngle, 2, 257, 6, {128}, 7);
  Rng rng(8);
  Eigen::MatrixXd features(120, est.input_width());
  for (Eigen::Index t = 0; t < features.rows(); ++t)
    for (Eigen::Index c = 0; c < features.cols(); ++c) features(t, c) = rng.Uniform(-1, 1);
  for (auto _ : state) {
    auto masks = est.Forward(features);
    benchmark::DoNotOptimize(masks.data());
  }
}
BENCHMARK(BM_EstimatorForward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
