// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_STFT_H_
#define SEPKIT_STFT_H_

#include <Eigen/Core>
#include <complex>
#include <utility>

namespace sepkit {

// Frame analysis settings. win_len/hop/fft_size are in samples and must
// satisfy 0 < hop <= win_len <= fft_size; window has win_len entries in
// (0, 1.09].
struct AnalysisConfig {
  double sample_rate = 16000.0;
  int win_len = 512;
  int hop = 128;
  int fft_size = 512;
  Eigen::VectorXd window;

  int bins() const { return fft_size / 2 + 1; }
  double bin_hz(int k) const { return sample_rate * k / fft_size; }
  void Validate() const;
};

Eigen::VectorXd HammingWindow(int n);

// 32 ms window / 8 ms hop, periodic hamming, fft = next power of two.
AnalysisConfig DefaultAnalysisConfig(double sample_rate = 16000.0,
                                     double win_ms = 32.0, double hop_ms = 8.0);

// T x F complex matrix (frames by bins).
struct ComplexSpectrogram {
  Eigen::MatrixXcd values;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

// Fixed Fourier bases times the window, so that analysis is a plain
// matrix product with stacked frames (Conv1d with a fixed kernel) and
// synthesis is the transposed counterpart.
//   analysis:  2F x win_len, rows 0..F-1 cos(2*pi*k*n/N)*w[n],
//              rows F..2F-1 -sin(2*pi*k*n/N)*w[n]
//   synthesis: 2F x win_len, the inverse-DFT bases scaled by c_k/N and
//              multiplied by the synthesis window
struct StftKernel {
  AnalysisConfig config;
  Eigen::MatrixXd analysis;
  Eigen::MatrixXd synthesis;
  Eigen::VectorXd window_sq;
};

StftKernel MakeStftKernel(const AnalysisConfig& config);

// Frame count is floor((len - win_len) / hop) + 1; no implicit padding.
ComplexSpectrogram Stft(const Eigen::VectorXd& channel, const StftKernel& kernel);
ComplexSpectrogram Stft(const Eigen::VectorXd& channel, const AnalysisConfig& config);

// Overlap-add divided by the running sum of squared windows. Output length
// is (frames - 1) * hop + win_len.
Eigen::VectorXd Istft(const ComplexSpectrogram& spec, const StftKernel& kernel);
Eigen::VectorXd Istft(const ComplexSpectrogram& spec, const AnalysisConfig& config);

// Per-sample sum of squared windows for a given frame count.
Eigen::VectorXd SynthesisNorm(const StftKernel& kernel, Eigen::Index frames);

// Adjoint of the linear Istft map: turns a gradient with respect to the
// synthesized signal into gradients with respect to the stacked [Re | Im]
// coefficients, T x 2F.
Eigen::MatrixXd IstftAdjoint(const Eigen::VectorXd& signal_grad,
                             const StftKernel& kernel, Eigen::Index frames);

// Magnitude is nonnegative; phase lies in (-pi, pi], zero cells get phase 0.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> Decompose(const ComplexSpectrogram& spec);
ComplexSpectrogram Recombine(const Eigen::MatrixXd& magnitude,
                             const Eigen::MatrixXd& phase);

}  // namespace sepkit

#endif  // SEPKIT_STFT_H_
