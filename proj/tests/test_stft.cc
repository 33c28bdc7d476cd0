// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <filesystem>

#include "doctest.h"
#include "sepkit/stft.h"
#include "sepkit/util.h"
#include "sepkit/wav.h"

using namespace sepkit;

namespace {

// Independent frame-wise oracle: plain O(N^2) windowed DFT.
std::vector<std::complex<double>> WindowedDftOracle(const Eigen::VectorXd& frame,
                                                    const Eigen::VectorXd& window,
                                                    int fft_size) {
  const int bins = fft_size / 2 + 1;
  std::vector<std::complex<double>> out(static_cast<size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index n = 0; n < frame.size(); ++n) {
      const double arg = -2.0 * M_PI * k * static_cast<double>(n) / fft_size;
      acc += frame[n] * window[n] * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    out[static_cast<size_t>(k)] = acc;
  }
  return out;
}

Eigen::VectorXd RandomSignal(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.Uniform(-1.0, 1.0);
  return x;
}

AnalysisConfig RectConfig(int win, int fft, int hop) {
  AnalysisConfig cfg;
  cfg.sample_rate = 16000.0;
  cfg.win_len = win;
  cfg.fft_size = fft;
  cfg.hop = hop;
  cfg.window = Eigen::VectorXd::Ones(win);
  return cfg;
}

double InteriorRelError(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int win) {
  const Eigen::Index lo = win;
  const Eigen::Index len = std::min(a.size(), b.size()) - 2 * win;
  REQUIRE(len > 0);
  return (a.segment(lo, len) - b.segment(lo, len)).norm() / b.segment(lo, len).norm();
}

}  // namespace

TEST_CASE("kernel: DC row of a rectangular fft_size=4 kernel is all ones") {
  const StftKernel kernel = MakeStftKernel(RectConfig(4, 4, 2));
  for (int i = 0; i < 4; ++i) {
    CHECK(kernel.analysis(0, i) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kernel.analysis(3, i) == doctest::Approx(0.0).epsilon(1e-15));  // -sin(0)
  }
}

TEST_CASE("kernel: row count is 2 * (fft_size/2 + 1)") {
  for (int fft : {4, 16, 512, 1024}) {
    AnalysisConfig cfg = RectConfig(fft, fft, fft / 2);
    CHECK(MakeStftKernel(cfg).analysis.rows() == 2 * (fft / 2 + 1));
  }
}

TEST_CASE("kernel: matches the direct windowed-DFT oracle on a random frame") {
  AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  cfg.hop = cfg.win_len;  // single frame
  const StftKernel kernel = MakeStftKernel(cfg);
  Rng rng(11);
  const Eigen::VectorXd frame = RandomSignal(rng, cfg.win_len);

  const ComplexSpectrogram spec = Stft(frame, kernel);
  REQUIRE(spec.frames() == 1);
  const auto oracle = WindowedDftOracle(frame, cfg.window, cfg.fft_size);

  double num = 0.0, den = 0.0;
  for (int k = 0; k < cfg.bins(); ++k) {
    num += std::norm(spec.values(0, k) - oracle[static_cast<size_t>(k)]);
    den += std::norm(oracle[static_cast<size_t>(k)]);
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("kernel: rejects bad configs") {
  AnalysisConfig cfg = RectConfig(16, 16, 20);  // hop > win_len
  CHECK_THROWS(MakeStftKernel(cfg));
  cfg = RectConfig(32, 16, 8);  // fft_size < win_len
  CHECK_THROWS(MakeStftKernel(cfg));
}

TEST_CASE("stft: zero signal gives a zero spectrogram") {
  const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  const ComplexSpectrogram spec = Stft(Eigen::VectorXd::Zero(8000), cfg);
  CHECK(spec.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stft: exact-bin sinusoid concentrates energy at its bin") {
  AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  const StftKernel kernel = MakeStftKernel(cfg);
  const int k0 = 40;
  const double freq = cfg.bin_hz(k0);
  Eigen::VectorXd x(8000);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * freq * static_cast<double>(i) / cfg.sample_rate);

  const ComplexSpectrogram spec = Stft(x, kernel);
  const Eigen::Index t = spec.frames() / 2;
  const double peak = std::norm(spec.values(t, k0));
  for (int k = 0; k < cfg.bins(); ++k) {
    if (std::abs(k - k0) < 2) continue;
    CHECK(peak >= 100.0 * std::norm(spec.values(t, k)));
  }
}

TEST_CASE("stft: frame count and linearity") {
  const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  Rng rng(5);
  const Eigen::VectorXd u = RandomSignal(rng, 4000);
  const Eigen::VectorXd v = RandomSignal(rng, 4000);
  CHECK(Stft(u, cfg).frames() == (4000 - cfg.win_len) / cfg.hop + 1);

  const double a = 0.7, b = -1.3;
  const ComplexSpectrogram lhs = Stft(a * u + b * v, cfg);
  const ComplexSpectrogram rhs_u = Stft(u, cfg);
  const ComplexSpectrogram rhs_v = Stft(v, cfg);
  const Eigen::MatrixXcd diff =
      lhs.values - (a * rhs_u.values + b * rhs_v.values);
  CHECK(diff.cwiseAbs().maxCoeff() / lhs.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stft: rejects a channel shorter than one frame") {
  const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  CHECK_THROWS(Stft(Eigen::VectorXd::Zero(cfg.win_len - 1), cfg));
}

TEST_CASE("istft: roundtrip on noise, tone and chirp across configs") {
  Rng rng(17);
  for (const auto& [win_ms, hop_ms] : std::vector<std::pair<double, double>>{
           {32.0, 8.0}, {64.0, 16.0}}) {
    const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0, win_ms, hop_ms);
    const StftKernel kernel = MakeStftKernel(cfg);
    const Eigen::Index n = 32000;  // 2 s

    Eigen::VectorXd noise = RandomSignal(rng, n);
    Eigen::VectorXd tone(n), chirp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / cfg.sample_rate;
      tone[i] = std::sin(2.0 * M_PI * 440.0 * t);
      chirp[i] = std::sin(2.0 * M_PI * (200.0 * t + 900.0 * t * t));
    }
    for (const auto& x : {noise, tone, chirp}) {
      const Eigen::VectorXd y = Istft(Stft(x, kernel), kernel);
      CHECK(InteriorRelError(y, x, cfg.win_len) < 1e-6);
    }
  }
}

TEST_CASE("istft: zero spectrogram synthesizes silence; linear map") {
  const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  const StftKernel kernel = MakeStftKernel(cfg);
  ComplexSpectrogram spec;
  spec.values = Eigen::MatrixXcd::Zero(20, cfg.bins());
  CHECK(Istft(spec, kernel).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  ComplexSpectrogram s1, s2;
  s1.values = Eigen::MatrixXcd::Random(20, cfg.bins());
  s2.values = Eigen::MatrixXcd::Random(20, cfg.bins());
  ComplexSpectrogram sum;
  sum.values = 2.0 * s1.values + 0.5 * s2.values;
  const Eigen::VectorXd lhs = Istft(sum, kernel);
  const Eigen::VectorXd rhs = 2.0 * Istft(s1, kernel) + 0.5 * Istft(s2, kernel);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff() + 1e-15);
}

TEST_CASE("istft: determinism, bit-identical outputs") {
  const AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  const StftKernel kernel = MakeStftKernel(cfg);
  Rng rng(23);
  const Eigen::VectorXd x = RandomSignal(rng, 9000);
  const Eigen::VectorXd y1 = Istft(Stft(x, kernel), kernel);
  const Eigen::VectorXd y2 = Istft(Stft(x, kernel), kernel);
  for (Eigen::Index i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);
}

TEST_CASE("istft adjoint: agrees with the transpose of the linear map") {
  AnalysisConfig cfg = DefaultAnalysisConfig(16000.0);
  cfg.win_len = 32;
  cfg.fft_size = 32;
  cfg.hop = 8;
  cfg.window = HammingWindow(32);
  const StftKernel kernel = MakeStftKernel(cfg);
  const Eigen::Index frames = 5;
  const int bins = cfg.bins();
  Rng rng(29);

  // <Istft(c), g> must equal <c, IstftAdjoint(g)> for random c, g.
  ComplexSpectrogram spec;
  spec.values.resize(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k)
      spec.values(t, k) = std::complex<double>(rng.Normal(), rng.Normal());
  const Eigen::VectorXd y = Istft(spec, kernel);
  const Eigen::VectorXd g = RandomSignal(rng, y.size());
  const Eigen::MatrixXd adj = IstftAdjoint(g, kernel, frames);

  double lhs = y.dot(g);
  double rhs = 0.0;
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k)
      rhs += spec.values(t, k).real() * adj(t, k) +
             spec.values(t, k).imag() * adj(t, bins + k);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("decompose/recombine: pythagorean cell and zero convention") {
  ComplexSpectrogram spec;
  spec.values.resize(1, 2);
  spec.values(0, 0) = std::complex<double>(3.0, 4.0);
  spec.values(0, 1) = std::complex<double>(0.0, 0.0);
  const auto [mag, phase] = Decompose(spec);
  CHECK(mag(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(phase(0, 0) == doctest::Approx(std::atan2(4.0, 3.0)).epsilon(1e-15));
  CHECK(mag(0, 1) == 0.0);
  CHECK(phase(0, 1) == 0.0);
}

TEST_CASE("decompose/recombine: random roundtrip to 1e-12; phase range") {
  Rng rng(31);
  ComplexSpectrogram spec;
  spec.values = Eigen::MatrixXcd::Random(40, 65);
  const auto [mag, phase] = Decompose(spec);
  CHECK((mag.array() >= 0.0).all());
  CHECK((phase.array() > -M_PI).all());
  CHECK((phase.array() <= M_PI).all());
  const ComplexSpectrogram back = Recombine(mag, phase);
  CHECK((back.values - spec.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wav: float32 and pcm16 roundtrips") {
  Rng rng(37);
  std::vector<Eigen::VectorXd> chans;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd x(1000);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.Uniform(-0.9, 0.9);
    chans.push_back(x);
  }
  const MultichannelWaveform wave(16000.0, chans);
  const std::string dir = (std::filesystem::temp_directory_path() / "sepkit_wav_test").string();
  EnsureDirectory(dir);

  WriteWav(dir + "/f32.wav", wave, WavEncoding::kFloat32);
  const MultichannelWaveform f32 = ReadWav(dir + "/f32.wav");
  CHECK(f32.sample_rate == 16000.0);
  CHECK(f32.channel_count() == 3);
  CHECK(f32.length() == 1000);
  for (int c = 0; c < 3; ++c)
    CHECK((f32.channels[c] - wave.channels[c]).cwiseAbs().maxCoeff() < 1e-7);

  WriteWav(dir + "/p16.wav", wave, WavEncoding::kPcm16);
  const MultichannelWaveform p16 = ReadWav(dir + "/p16.wav");
  for (int c = 0; c < 3; ++c)
    CHECK((p16.channels[c] - wave.channels[c]).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("wav: rejects garbage") {
  const std::string dir = (std::filesystem::temp_directory_path() / "sepkit_wav_test").string();
  EnsureDirectory(dir);
  AtomicWriteFile(dir + "/bad.wav", std::string("not a wav file"));
  CHECK_THROWS(ReadWav(dir + "/bad.wav"));
}
