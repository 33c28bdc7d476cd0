// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_CONFIG_H_
#define SEPKIT_CONFIG_H_

#include <string>
#include <vector>

#include "sepkit/features.h"
#include "sepkit/losses.h"
#include "sepkit/masks.h"
#include "sepkit/room.h"
#include "sepkit/stft.h"

namespace sepkit {

// Everything a run needs, fed from the CLI (key=value config file plus
// flag overrides) or constructed directly in tests.
struct ExperimentConfig {
  std::string workdir = ".";
  int jobs = 1;
  uint64_t seed = 1;

  // analysis
  double sample_rate = 16000.0;
  double win_ms = 32.0;
  double hop_ms = 8.0;

  // scene sampling / datagen
  SceneRanges ranges;
  int source_count = 2;
  int count = 100;
  double duration_s = 1.0;
  double band_lo_hz = 250.0;
  double band_hi_hz = 4000.0;
  // random: independent kind per source; shared: one kind per scene (the
  // sources stay spectrally confusable); noise / chirp / tones: fixed.
  std::string source_kind = "random";
  std::string absorption = "ism";  // or "eyring", "sabine"
  bool sinc_interp = false;

  // oracle masks
  std::string mask_kinds = "ibm,iam,irm,ipsm";
  double mask_ceiling = 2.0;
  bool irm_power = false;
  bool write_audio = false;

  // metrics
  int sdr_filter_len = 512;

  // training
  std::string feature_mode = "mag_ipd_angle";
  std::string loss = "upit_sisnr";
  std::vector<int> hidden = {128};
  double learning_rate = 1e-3;
  int steps = 1000;
  int batch_size = 4;
  double clip_norm = 5.0;

  void Validate() const;
  AnalysisConfig MakeAnalysisConfig() const;
  AbsorptionModel GetAbsorptionModel() const;
  FeatureMode GetFeatureMode() const;
  LossKind GetLossKind() const;
  std::vector<MaskKind> GetMaskKinds() const;
};

// The fixed 200-mixture set (plus a 60-mixture eval split) used to
// demonstrate the end-to-end learning signal: two same-band sources per
// scene, moderate reverberation, paper bucket proportions.
ExperimentConfig StandardTrainConfig(const std::string& workdir);
ExperimentConfig StandardEvalConfig(const std::string& workdir);

}  // namespace sepkit

#endif  // SEPKIT_CONFIG_H_
