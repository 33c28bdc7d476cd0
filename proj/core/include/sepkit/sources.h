// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_SOURCES_H_
#define SEPKIT_SOURCES_H_

#include <Eigen/Core>

#include "sepkit/util.h"

namespace sepkit {

// Synthetic dry material for simulated scenes: band-limited noise bursts,
// chirps and tone complexes sharing a band so that spectral identity alone
// does not separate two sources.
enum class SourceKind { kNoiseBurst = 0, kChirp = 1, kToneComplex = 2 };

Eigen::VectorXd SynthDrySource(Rng& rng, SourceKind kind, Eigen::Index length,
                               double sample_rate, double band_lo_hz,
                               double band_hi_hz);

// Draws the kind uniformly.
Eigen::VectorXd RandomDrySource(Rng& rng, Eigen::Index length, double sample_rate,
                                double band_lo_hz, double band_hi_hz);

}  // namespace sepkit

#endif  // SEPKIT_SOURCES_H_
