// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/sources.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sepkit/fft.h"

namespace sepkit {

namespace {

// Alternating on/off segments with 10 ms raised-cosine ramps; the bursts
// give the time-frequency sparsity masking relies on.
Eigen::VectorXd BurstEnvelope(Rng& rng, Eigen::Index length, double fs) {
  Eigen::VectorXd env = Eigen::VectorXd::Zero(length);
  const auto ramp = static_cast<Eigen::Index>(0.010 * fs);
  Eigen::Index pos = 0;
  bool on = rng.Uniform() < 0.7;
  while (pos < length) {
    const auto seg = static_cast<Eigen::Index>(rng.Uniform(0.06, 0.20) * fs);
    if (on) {
      for (Eigen::Index i = 0; i < seg && pos + i < length; ++i) {
        double g = 1.0;
        if (i < ramp) g = 0.5 * (1.0 - std::cos(M_PI * i / ramp));
        if (seg - 1 - i < ramp) g = std::min(g, 0.5 * (1.0 - std::cos(M_PI * (seg - 1 - i) / ramp)));
        env[pos + i] = g;
      }
    }
    pos += seg;
    on = !on || rng.Uniform() < 0.35;  // mostly alternate, keep duty high
  }
  return env;
}

void NormalizeRms(Rng& rng, Eigen::VectorXd* x) {
  const double rms = std::sqrt(x->squaredNorm() / static_cast<double>(x->size()));
  if (rms <= 1e-12) {
    // All-off envelope; fall back to a faint tone so the source is not silent.
    for (Eigen::Index i = 0; i < x->size(); ++i)
      (*x)[i] = 0.01 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / 16000.0);
    return;
  }
  const double gain_db = rng.Uniform(-2.5, 2.5);
  *x *= 0.1 * std::pow(10.0, gain_db / 20.0) / rms;
}

Eigen::VectorXd BandNoise(Rng& rng, Eigen::Index length, double fs, double lo, double hi) {
  const size_t n = NextPow2(static_cast<size_t>(length));
  std::vector<std::complex<double>> spec(n);
  for (auto& v : spec) v = rng.Normal();
  Fft(&spec, false);
  const double df = fs / static_cast<double>(n);
  for (size_t k = 0; k < n; ++k) {
    const double f = k <= n / 2 ? k * df : (n - k) * df;
    if (f < lo || f > hi) spec[k] = 0.0;
  }
  Fft(&spec, true);
  Eigen::VectorXd out(length);
  for (Eigen::Index i = 0; i < length; ++i) out[i] = spec[static_cast<size_t>(i)].real();
  return out;
}

}  // namespace

Eigen::VectorXd SynthDrySource(Rng& rng, SourceKind kind, Eigen::Index length,
                               double fs, double lo, double hi) {
  if (length <= 0) throw std::invalid_argument("dry source: length must be positive");
  if (!(lo > 0 && hi > lo && hi < fs / 2))
    throw std::invalid_argument("dry source: bad band");

  Eigen::VectorXd x;
  switch (kind) {
    case SourceKind::kNoiseBurst:
      x = BandNoise(rng, length, fs, lo, hi);
      break;
    case SourceKind::kChirp: {
      const double f0 = rng.Uniform(lo, hi);
      const double f1 = rng.Uniform(lo, hi);
      const double phi0 = rng.Uniform(0.0, 2.0 * M_PI);
      x.resize(length);
      double phase = phi0;
      for (Eigen::Index i = 0; i < length; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(length);
        const double f = f0 + (f1 - f0) * frac;
        phase += 2.0 * M_PI * f / fs;
        x[i] = std::sin(phase);
      }
      break;
    }
    case SourceKind::kToneComplex: {
      // Gliding partials with independent burst envelopes; static tones
      // would make frames within a scene near-identical.
      const int partials = 4 + static_cast<int>(rng.UniformInt(5));
      x = Eigen::VectorXd::Zero(length);
      const double log_lo = std::log(lo), log_hi = std::log(hi);
      for (int p = 0; p < partials; ++p) {
        const double f0 = std::exp(rng.Uniform(log_lo, log_hi));
        const double glide = rng.Uniform(-0.25, 0.25);  // log-frequency drift
        const double amp = rng.Uniform(0.3, 1.0);
        double phase = rng.Uniform(0.0, 2.0 * M_PI);
        const Eigen::VectorXd env = BurstEnvelope(rng, length, fs);
        for (Eigen::Index i = 0; i < length; ++i) {
          const double frac = static_cast<double>(i) / static_cast<double>(length);
          const double f = std::min(f0 * std::exp(glide * frac), hi);
          phase += 2.0 * M_PI * f / fs;
          x[i] += amp * env[i] * std::sin(phase);
        }
      }
      break;
    }
  }

  if (kind != SourceKind::kToneComplex)  // tones carry per-partial envelopes
    x = x.cwiseProduct(BurstEnvelope(rng, length, fs));
  NormalizeRms(rng, &x);
  return x;
}

Eigen::VectorXd RandomDrySource(Rng& rng, Eigen::Index length, double fs, double lo,
                                double hi) {
  const auto kind = static_cast<SourceKind>(rng.UniformInt(3));
  return SynthDrySource(rng, kind, length, fs, lo, hi);
}

}  // namespace sepkit
