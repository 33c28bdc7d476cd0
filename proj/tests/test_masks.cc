// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "sepkit/masks.h"
#include "sepkit/metrics.h"
#include "sepkit/room.h"
#include "sepkit/util.h"

using namespace sepkit;

namespace {

AnalysisConfig TestConfig() {
  AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  cfg.hop = 256;
  return cfg;
}

// Tone complex whose partials sit on exact FFT bins, so its spectrogram
// support is exactly the chosen bins plus their immediate neighbours.
Eigen::VectorXd ExactBinComplex(const AnalysisConfig& cfg, const std::vector<int>& bins,
                                Eigen::Index length, uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(length);
  for (int k : bins) {
    const double f = cfg.bin_hz(k);
    const double phi = rng.Uniform(0.0, 2.0 * M_PI);
    const double amp = rng.Uniform(0.5, 1.0);
    for (Eigen::Index n = 0; n < length; ++n)
      x[n] += amp * std::sin(2.0 * M_PI * f * static_cast<double>(n) / cfg.sample_rate + phi);
  }
  return x;
}

ComplexSpectrogram SumSpecs(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  ComplexSpectrogram out;
  out.values = a.values + b.values;
  return out;
}

}  // namespace

TEST_CASE("oracle masks: single active source makes its IAM one on the mix support") {
  const AnalysisConfig cfg = TestConfig();
  const ComplexSpectrogram active = Stft(ExactBinComplex(cfg, {20, 30}, 4000, 1), cfg);
  ComplexSpectrogram silent;
  silent.values = Eigen::MatrixXcd::Zero(active.frames(), active.bins());
  const ComplexSpectrogram mix = active;  // mix == the active source

  const MaskSet iam = ComputeOracleMask(MaskKind::kIam, {active, silent}, mix);
  for (Eigen::Index t = 0; t < mix.frames(); ++t)
    for (Eigen::Index k = 0; k < mix.bins(); ++k) {
      if (std::abs(mix.values(t, k)) < 1e-12) continue;
      CHECK(iam.masks[0](t, k) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(iam.masks[1](t, k) == 0.0);
    }
}

TEST_CASE("oracle masks: disjoint supports give indicator IBMs that partition") {
  const AnalysisConfig cfg = TestConfig();
  const ComplexSpectrogram x1 = Stft(ExactBinComplex(cfg, {15, 22, 31}, 4000, 2), cfg);
  const ComplexSpectrogram x2 = Stft(ExactBinComplex(cfg, {80, 95, 110}, 4000, 3), cfg);
  const ComplexSpectrogram mix = SumSpecs(x1, x2);

  const MaskSet ibm = ComputeOracleMask(MaskKind::kIbm, {x1, x2}, mix);
  for (Eigen::Index t = 0; t < mix.frames(); ++t)
    for (Eigen::Index k = 0; k < mix.bins(); ++k) {
      const double m0 = ibm.masks[0](t, k), m1 = ibm.masks[1](t, k);
      CHECK((m0 == 0.0 || m0 == 1.0));
      CHECK((m1 == 0.0 || m1 == 1.0));
      if (std::abs(mix.values(t, k)) >= 1e-12) {
        CHECK(m0 + m1 == 1.0);  // binary partition
        if (std::abs(x1.values(t, k)) > std::abs(x2.values(t, k))) CHECK(m0 == 1.0);
      } else {
        CHECK(m0 + m1 == 0.0);  // silent mix cell: all masks zero
      }
    }
}

TEST_CASE("oracle masks: identical per-cell phase makes IPSM equal IAM") {
  const AnalysisConfig cfg = TestConfig();
  const ComplexSpectrogram base = Stft(ExactBinComplex(cfg, {25, 40}, 4000, 4), cfg);
  ComplexSpectrogram half;  // same phase, half magnitude
  half.values = 0.5 * base.values;
  const ComplexSpectrogram mix = SumSpecs(base, half);

  const MaskSet iam = ComputeOracleMask(MaskKind::kIam, {base, half}, mix);
  const MaskSet ipsm = ComputeOracleMask(MaskKind::kIpsm, {base, half}, mix);
  for (int s = 0; s < 2; ++s)
    CHECK((iam.masks[static_cast<size_t>(s)] - ipsm.masks[static_cast<size_t>(s)])
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("oracle masks: IRM simplex and range invariants on random spectra") {
  Rng rng(5);
  std::vector<ComplexSpectrogram> sources(2);
  for (auto& s : sources) {
    s.values.resize(30, 65);
    for (Eigen::Index t = 0; t < 30; ++t)
      for (Eigen::Index k = 0; k < 65; ++k)
        s.values(t, k) = std::complex<double>(rng.Normal(), rng.Normal());
  }
  const ComplexSpectrogram mix = SumSpecs(sources[0], sources[1]);

  const MaskSet irm = ComputeOracleMask(MaskKind::kIrm, sources, mix);
  const MaskSet iam = ComputeOracleMask(MaskKind::kIam, sources, mix);
  const MaskSet ipsm = ComputeOracleMask(MaskKind::kIpsm, sources, mix);
  for (Eigen::Index t = 0; t < 30; ++t)
    for (Eigen::Index k = 0; k < 65; ++k) {
      const double sum = irm.masks[0](t, k) + irm.masks[1](t, k);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));  // all cells active here
      for (int s = 0; s < 2; ++s) {
        CHECK(irm.masks[static_cast<size_t>(s)](t, k) >= 0.0);
        CHECK(irm.masks[static_cast<size_t>(s)](t, k) <= 1.0);
        CHECK(iam.masks[static_cast<size_t>(s)](t, k) >= 0.0);
        CHECK(iam.masks[static_cast<size_t>(s)](t, k) <= 2.0);  // ceiling
        CHECK(ipsm.masks[static_cast<size_t>(s)](t, k) >= -1.0);
        CHECK(ipsm.masks[static_cast<size_t>(s)](t, k) <= 2.0);
      }
    }
}

TEST_CASE("oracle masks: dimension mismatch and bad kind are rejected") {
  ComplexSpectrogram a, b;
  a.values = Eigen::MatrixXcd::Zero(4, 5);
  b.values = Eigen::MatrixXcd::Zero(4, 6);
  CHECK_THROWS(ComputeOracleMask(MaskKind::kIbm, {a, b}, a));
  CHECK_THROWS(ComputeOracleMask(MaskKind::kEstimated, {a, a}, a));
  CHECK_THROWS(ComputeOracleMask(MaskKind::kIbm, {}, a));
}

TEST_CASE("apply_mask: identity, zero, scaling and mask-linearity") {
  Rng rng(6);
  Eigen::MatrixXd mag(8, 12), mask_a(8, 12), mask_b(8, 12);
  for (Eigen::Index t = 0; t < 8; ++t)
    for (Eigen::Index k = 0; k < 12; ++k) {
      mag(t, k) = std::abs(rng.Normal());
      mask_a(t, k) = rng.Uniform(0.0, 1.0);
      mask_b(t, k) = rng.Uniform(0.0, 1.0);
    }
  CHECK((ApplyMask(Eigen::MatrixXd::Ones(8, 12), mag) - mag).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ApplyMask(Eigen::MatrixXd::Zero(8, 12), mag).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ApplyMask(Eigen::MatrixXd::Constant(8, 12, 0.5), mag) - 0.5 * mag)
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  // linear in the mask for a fixed mix
  const Eigen::MatrixXd lhs = ApplyMask(2.0 * mask_a + mask_b, mag);
  const Eigen::MatrixXd rhs = 2.0 * ApplyMask(mask_a, mag) + ApplyMask(mask_b, mag);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS(ApplyMask(Eigen::MatrixXd::Zero(3, 3), mag));
}

TEST_CASE("reconstruct: unit mask reproduces the mixture; zero gives silence") {
  const AnalysisConfig cfg = TestConfig();
  const StftKernel kernel = MakeStftKernel(cfg);
  const Eigen::VectorXd mix = ExactBinComplex(cfg, {18, 33, 52}, 8000, 7);
  const ComplexSpectrogram spec = Stft(mix, kernel);
  const auto [mag, phase] = Decompose(spec);

  const Eigen::VectorXd back = Reconstruct(mag, phase, kernel);
  const Eigen::Index lo = cfg.win_len, len = back.size() - 2 * cfg.win_len;
  const double rel = (back.segment(lo, len) - mix.segment(lo, len)).norm() /
                     mix.segment(lo, len).norm();
  CHECK(rel < 1e-6);

  const Eigen::VectorXd zero = Reconstruct(Eigen::MatrixXd::Zero(mag.rows(), mag.cols()),
                                           phase, kernel);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reconstruct: IBM on a disjoint-band anechoic mixture exceeds 40 dB") {
  const AnalysisConfig cfg = TestConfig();
  const StftKernel kernel = MakeStftKernel(cfg);

  SceneSpec scene = SampleScene(99, 2);
  scene.room.t60 = 1e-6;  // effectively anechoic
  std::vector<MultichannelWaveform> dries = {
      MonoWaveform(16000.0, ExactBinComplex(cfg, {12, 19, 27, 40}, 16000, 8)),
      MonoWaveform(16000.0, ExactBinComplex(cfg, {90, 120, 150, 200}, 16000, 9))};
  const SpatializeResult spat = Spatialize(dries, scene);

  const ComplexSpectrogram mix_spec = Stft(spat.mixture.channels[0], kernel);
  const auto [mag, phase] = Decompose(mix_spec);
  const std::vector<ComplexSpectrogram> src_specs = {
      Stft(spat.references[0].channels[0], kernel),
      Stft(spat.references[1].channels[0], kernel)};
  const MaskSet ibm = ComputeOracleMask(MaskKind::kIbm, src_specs, mix_spec);

  const Eigen::Index out_len = (mix_spec.frames() - 1) * cfg.hop + cfg.win_len;
  for (int s = 0; s < 2; ++s) {
    const Eigen::VectorXd est = Reconstruct(ApplyMask(ibm.masks[static_cast<size_t>(s)], mag),
                                            phase, kernel);
    const double snr =
        SiSnr(est, spat.references[static_cast<size_t>(s)].channels[0].head(out_len));
    CHECK(snr > 40.0);
  }
}
