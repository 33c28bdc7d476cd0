// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_FEATURES_H_
#define SEPKIT_FEATURES_H_

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/room.h"
#include "sepkit/stft.h"

namespace sepkit {

using MicPair = std::pair<int, int>;  // zero-based mic indices

// (1,4) (2,5) (3,6) (1,2) (3,4) (5,6) in one-based numbering: the three
// diametric pairs followed by three adjacent ones.
std::vector<MicPair> DefaultPairList();

// Wrapped per-pair phase differences plus the cos/sin planes fed to the
// network. Cells where either channel is silent get IPD 0.
struct IpdFeatures {
  std::vector<Eigen::MatrixXd> raw;  // per pair, T x F, values in (-pi, pi]
  std::vector<Eigen::MatrixXd> cos_planes;
  std::vector<Eigen::MatrixXd> sin_planes;

  int pair_count() const { return static_cast<int>(raw.size()); }
};

IpdFeatures ComputeIpd(const std::vector<ComplexSpectrogram>& specs,
                       const std::vector<MicPair>& pairs);

// Expected inter-mic delay for a far-field plane wave from the azimuth,
// seconds; positive when the second mic of the pair is hit first.
double PairPlaneWaveDelay(const ArrayGeometry& array, const MicPair& pair,
                          double azimuth);

// Unit-modulus coefficients per (pair, bin) for a known speaker azimuth.
struct SteeringSet {
  std::vector<Eigen::VectorXcd> coeffs;  // per pair, length F
};

SteeringSet SteeringVectors(const ArrayGeometry& array, double azimuth,
                            const std::vector<MicPair>& pairs,
                            const AnalysisConfig& config);

// Directional alignment per speaker: sum over pairs of the real part of the
// unit phasor of steering * (Y_i1 / Y_i2). Bounded by the pair count;
// silent cells contribute zero.
std::vector<Eigen::MatrixXd> ComputeAngleFeatures(
    const std::vector<ComplexSpectrogram>& specs,
    const std::vector<SteeringSet>& steering_per_speaker,
    const std::vector<MicPair>& pairs);

enum class FeatureMode { kMagnitude = 0, kMagIpd = 1, kMagIpdAngle = 2 };

const char* FeatureModeName(FeatureMode mode);
FeatureMode FeatureModeFromName(const std::string& name);
int FeaturePlaneCount(FeatureMode mode, int pair_count, int speaker_count);

// Frame-major layout [ |Y_0| | cos IPD x P | sin IPD x P | A x S ], the
// angle planes target-first. Width is F * plane_count.
Eigen::MatrixXd AssembleFeatures(const Eigen::MatrixXd& magnitude,
                                 const IpdFeatures* ipd,
                                 const std::vector<Eigen::MatrixXd>* angle,
                                 FeatureMode mode);

// Flat binary: u32 frames, u32 bins, u32 planes, little-endian float64
// rows.
void WriteFeatureMatrix(const std::string& path, const Eigen::MatrixXd& features,
                        int bins);
Eigen::MatrixXd ReadFeatureMatrix(const std::string& path, int* bins_out = nullptr,
                                  int* planes_out = nullptr);

}  // namespace sepkit

#endif  // SEPKIT_FEATURES_H_
