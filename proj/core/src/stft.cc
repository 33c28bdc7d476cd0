// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/stft.h"

#include <cmath>
#include <stdexcept>

#include "sepkit/fft.h"

namespace sepkit {

void AnalysisConfig::Validate() const {
  if (sample_rate <= 0.0) throw std::invalid_argument("stft: sample_rate must be positive");
  if (hop <= 0) throw std::invalid_argument("stft: hop must be positive");
  if (hop > win_len) throw std::invalid_argument("stft: hop exceeds win_len");
  if (win_len > fft_size) throw std::invalid_argument("stft: fft_size smaller than win_len");
  if (window.size() != win_len)
    throw std::invalid_argument("stft: window length does not match win_len");
  for (Eigen::Index i = 0; i < window.size(); ++i) {
    if (!(window[i] > 0.0 && window[i] <= 1.09))
      throw std::invalid_argument("stft: window values must lie in (0, 1.09]");
  }
}

Eigen::VectorXd HammingWindow(int n) {
  // Periodic form: the 2*pi/n period makes the window a 3-term exponential
  // sum, so exact-bin sinusoids leak into adjacent bins only.
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / n);
  return w;
}

AnalysisConfig DefaultAnalysisConfig(double sample_rate, double win_ms, double hop_ms) {
  AnalysisConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.win_len = static_cast<int>(std::lround(sample_rate * win_ms / 1000.0));
  cfg.hop = static_cast<int>(std::lround(sample_rate * hop_ms / 1000.0));
  cfg.fft_size = static_cast<int>(NextPow2(static_cast<size_t>(cfg.win_len)));
  cfg.window = HammingWindow(cfg.win_len);
  return cfg;
}

StftKernel MakeStftKernel(const AnalysisConfig& config) {
  config.Validate();
  const int n = config.fft_size;
  const int win = config.win_len;
  const int bins = config.bins();

  StftKernel kernel;
  kernel.config = config;
  kernel.analysis.resize(2 * bins, win);
  kernel.synthesis.resize(2 * bins, win);
  kernel.window_sq = config.window.array().square();

  for (int k = 0; k < bins; ++k) {
    // c_k folds the conjugate-symmetric half back into the real inverse.
    const double ck = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    for (int i = 0; i < win; ++i) {
      const double arg = 2.0 * M_PI * k * i / n;
      const double c = std::cos(arg);
      const double s = std::sin(arg);
      const double w = config.window[i];
      kernel.analysis(k, i) = c * w;
      kernel.analysis(bins + k, i) = -s * w;
      kernel.synthesis(k, i) = ck / n * c * w;
      kernel.synthesis(bins + k, i) = -ck / n * s * w;
    }
  }
  return kernel;
}

ComplexSpectrogram Stft(const Eigen::VectorXd& channel, const StftKernel& kernel) {
  const auto& cfg = kernel.config;
  if (channel.size() < cfg.win_len)
    throw std::invalid_argument("stft: channel shorter than one frame");
  const auto frames =
      static_cast<Eigen::Index>((channel.size() - cfg.win_len) / cfg.hop) + 1;
  const int bins = cfg.bins();

  Eigen::MatrixXd stacked(frames, cfg.win_len);
  for (Eigen::Index t = 0; t < frames; ++t)
    stacked.row(t) = channel.segment(t * cfg.hop, cfg.win_len);

  const Eigen::MatrixXd coeffs = stacked * kernel.analysis.transpose();  // T x 2F

  ComplexSpectrogram spec;
  spec.values.resize(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k)
      spec.values(t, k) = std::complex<double>(coeffs(t, k), coeffs(t, bins + k));
  return spec;
}

ComplexSpectrogram Stft(const Eigen::VectorXd& channel, const AnalysisConfig& config) {
  return Stft(channel, MakeStftKernel(config));
}

Eigen::VectorXd SynthesisNorm(const StftKernel& kernel, Eigen::Index frames) {
  const auto& cfg = kernel.config;
  const Eigen::Index len = (frames - 1) * cfg.hop + cfg.win_len;
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(len);
  for (Eigen::Index t = 0; t < frames; ++t)
    norm.segment(t * cfg.hop, cfg.win_len) += kernel.window_sq;
  return norm;
}

Eigen::VectorXd Istft(const ComplexSpectrogram& spec, const StftKernel& kernel) {
  const auto& cfg = kernel.config;
  const Eigen::Index frames = spec.frames();
  const int bins = cfg.bins();
  if (spec.bins() != bins)
    throw std::invalid_argument("istft: spectrogram bins do not match config");
  if (frames < 1) throw std::invalid_argument("istft: empty spectrogram");

  Eigen::MatrixXd coeffs(frames, 2 * bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k) {
      coeffs(t, k) = spec.values(t, k).real();
      coeffs(t, bins + k) = spec.values(t, k).imag();
    }
  const Eigen::MatrixXd contrib = coeffs * kernel.synthesis;  // T x win_len

  const Eigen::Index len = (frames - 1) * cfg.hop + cfg.win_len;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(len);
  for (Eigen::Index t = 0; t < frames; ++t)
    acc.segment(t * cfg.hop, cfg.win_len) += contrib.row(t);

  const Eigen::VectorXd norm = SynthesisNorm(kernel, frames);
  for (Eigen::Index i = 0; i < len; ++i) {
    if (norm[i] < 1e-12)
      throw std::runtime_error("istft: zero window-sum at sample " + std::to_string(i));
    acc[i] /= norm[i];
  }
  return acc;
}

Eigen::VectorXd Istft(const ComplexSpectrogram& spec, const AnalysisConfig& config) {
  return Istft(spec, MakeStftKernel(config));
}

Eigen::MatrixXd IstftAdjoint(const Eigen::VectorXd& signal_grad,
                             const StftKernel& kernel, Eigen::Index frames) {
  const auto& cfg = kernel.config;
  const Eigen::Index len = (frames - 1) * cfg.hop + cfg.win_len;
  if (signal_grad.size() != len)
    throw std::invalid_argument("istft adjoint: signal length mismatch");
  const Eigen::VectorXd norm = SynthesisNorm(kernel, frames);
  const Eigen::VectorXd scaled = signal_grad.cwiseQuotient(norm);
  Eigen::MatrixXd gathered(frames, cfg.win_len);
  for (Eigen::Index t = 0; t < frames; ++t)
    gathered.row(t) = scaled.segment(t * cfg.hop, cfg.win_len);
  return gathered * kernel.synthesis.transpose();  // T x 2F
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> Decompose(const ComplexSpectrogram& spec) {
  Eigen::MatrixXd mag(spec.frames(), spec.bins());
  Eigen::MatrixXd phase(spec.frames(), spec.bins());
  for (Eigen::Index t = 0; t < spec.frames(); ++t)
    for (Eigen::Index k = 0; k < spec.bins(); ++k) {
      const std::complex<double> v = spec.values(t, k);
      const double m = std::abs(v);
      mag(t, k) = m;
      if (m == 0.0) {
        phase(t, k) = 0.0;
      } else {
        double p = std::atan2(v.imag(), v.real());
        if (p == -M_PI) p = M_PI;
        phase(t, k) = p;
      }
    }
  return {std::move(mag), std::move(phase)};
}

ComplexSpectrogram Recombine(const Eigen::MatrixXd& magnitude,
                             const Eigen::MatrixXd& phase) {
  if (magnitude.rows() != phase.rows() || magnitude.cols() != phase.cols())
    throw std::invalid_argument("recombine: magnitude/phase shape mismatch");
  ComplexSpectrogram spec;
  spec.values.resize(magnitude.rows(), magnitude.cols());
  for (Eigen::Index t = 0; t < magnitude.rows(); ++t)
    for (Eigen::Index k = 0; k < magnitude.cols(); ++k)
      spec.values(t, k) = std::polar(magnitude(t, k), phase(t, k));
  return spec;
}

}  // namespace sepkit
