// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_ROOM_H_
#define SEPKIT_ROOM_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sepkit/waveform.h"

namespace sepkit {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct RoomSpec {
  double length = 0.0;  // x extent, meters
  double width = 0.0;   // y extent
  double height = 0.0;  // z extent
  double t60 = 0.0;     // seconds

  double Volume() const { return length * width * height; }
  double SurfaceArea() const {
    return 2.0 * (length * width + length * height + width * height);
  }
};

// 6-mic circular array of 7 cm diameter, mics equally spaced on the circle.
struct ArrayGeometry {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double orientation = 0.0;  // rotation of mic 0 around +z, radians
  double diameter = 0.07;
  int mic_count = 6;

  double radius() const { return diameter / 2.0; }
  Eigen::Vector3d MicPosition(int index) const;
};

struct SceneSpec {
  RoomSpec room;
  ArrayGeometry array;
  std::vector<Eigen::Vector3d> sources;
  std::vector<double> azimuths;  // radians, from array center, world frame
  uint64_t seed = 0;
  int bucket = -1;  // angle-difference bucket; -1 for single-source scenes

  void Validate() const;
};

// Sampling ranges for SampleScene; defaults follow the simulated-data recipe
// (rooms 3x3x2.5 to 8x10x6 m, T60 0.05 to 0.5 s, sources and array coplanar,
// everything at least 0.3 m from the walls).
struct SceneRanges {
  double room_length_min = 3.0, room_length_max = 8.0;
  double room_width_min = 3.0, room_width_max = 10.0;
  double room_height_min = 2.5, room_height_max = 6.0;
  double t60_min = 0.05, t60_max = 0.5;
  double wall_margin = 0.3;
  double src_dist_min = 0.5, src_dist_max = 4.0;
};

// Angle-difference buckets are drawn with the 16/29/26/29 percent weights
// for two-source scenes; placement is constructed to satisfy the wall and
// coplanarity constraints, with a bounded resample budget as a backstop.
SceneSpec SampleScene(uint64_t seed, int source_count,
                      const SceneRanges& ranges = SceneRanges());

// Smallest pairwise circular azimuth difference, degrees in [0, 180].
double MinAngleDeltaDeg(const std::vector<double>& azimuths);

enum class AbsorptionModel {
  kSabine,  // alpha = 0.161 V / (T60 A), clamped to 1
  kEyring,  // alpha = 1 - exp(-0.161 V / (T60 A)), never clamps
  kIsm,     // inverts the direction-resolved image-lattice decay; the
            // Schroeder slope of the simulated response then tracks the
            // target instead of the diffuse-field average
};

// Uniform wall absorption coefficient in (0, 1] for the room's T60.
double T60ToAbsorption(const RoomSpec& room,
                       AbsorptionModel model = AbsorptionModel::kSabine);

// Decay-to--60dB point of the direction-averaged lattice attenuation in
// scaled time s = c * ln(1/beta^2) * t; depends on the room shape only.
double DirectionalDecayS60(const RoomSpec& room);

struct Rir {
  Eigen::VectorXd taps;
  double sample_rate = 0.0;
};

struct RirOptions {
  double sample_rate = 16000.0;
  int order_limit = -1;     // max reflection order; -1 bounds by time only
  double duration_s = 0.0;  // 0 derives the length from the decay time
  bool sinc_interp = false; // windowed-sinc fractional delays instead of
                            // nearest-sample rounding
};

// Allen-Berkley image method with uniform wall absorption. The direct tap
// lands at round(fs * dist / c); amplitudes follow 1/(4 pi d) with
// sqrt(1 - alpha) per reflection.
Rir SimulateRir(const RoomSpec& room, const Eigen::Vector3d& source,
                const Eigen::Vector3d& mic, double absorption,
                const RirOptions& opts = RirOptions());

// Shares the image lattice across microphones.
std::vector<Rir> SimulateRirs(const RoomSpec& room, const Eigen::Vector3d& source,
                              const std::vector<Eigen::Vector3d>& mics,
                              double absorption, const RirOptions& opts = RirOptions());

// Backward-integration decay estimate, fitted on the -5 to -25 dB stretch
// of the energy decay curve and extrapolated to -60 dB. A 100 Hz high-pass
// (the Allen-Berkley remedy) strips the image-method DC buildup first.
double SchroederT60(const Rir& rir);

struct SpatializeOptions {
  double sample_rate = 16000.0;
  AbsorptionModel absorption_model = AbsorptionModel::kIsm;
  int order_limit = -1;
  bool sinc_interp = false;
};

struct SpatializeResult {
  MultichannelWaveform mixture;                  // mic_count channels
  std::vector<MultichannelWaveform> references;  // per source, mic_count channels
};

// Convolves each dry source with its RIRs and sums; the mixture equals the
// sum of the reference images exactly.
SpatializeResult Spatialize(const std::vector<MultichannelWaveform>& dry_sources,
                            const SceneSpec& scene,
                            const SpatializeOptions& opts = SpatializeOptions());

}  // namespace sepkit

#endif  // SEPKIT_ROOM_H_
