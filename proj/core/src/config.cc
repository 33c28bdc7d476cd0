// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/config.h"

#include <sstream>
#include <stdexcept>

namespace sepkit {

void ExperimentConfig::Validate() const {
  if (sample_rate <= 0.0) throw std::invalid_argument("config: bad sample rate");
  if (win_ms <= 0.0 || hop_ms <= 0.0 || hop_ms > win_ms)
    throw std::invalid_argument("config: bad window/hop");
  if (source_count < 1 || source_count > 4)
    throw std::invalid_argument("config: source count must be in [1, 4]");
  if (count < 1) throw std::invalid_argument("config: count must be positive");
  if (duration_s <= 0.0) throw std::invalid_argument("config: bad duration");
  if (!(band_lo_hz > 0.0 && band_hi_hz > band_lo_hz && band_hi_hz < sample_rate / 2))
    throw std::invalid_argument("config: bad source band");
  if (source_kind != "random" && source_kind != "shared" && source_kind != "noise" &&
      source_kind != "chirp" && source_kind != "tones")
    throw std::invalid_argument("config: unknown source kind: " + source_kind);
  if (jobs < 1) throw std::invalid_argument("config: jobs must be positive");
  if (sdr_filter_len < 1) throw std::invalid_argument("config: bad sdr filter length");
  GetAbsorptionModel();
  GetFeatureMode();
  GetLossKind();
  GetMaskKinds();
}

AnalysisConfig ExperimentConfig::MakeAnalysisConfig() const {
  return DefaultAnalysisConfig(sample_rate, win_ms, hop_ms);
}

AbsorptionModel ExperimentConfig::GetAbsorptionModel() const {
  if (absorption == "ism") return AbsorptionModel::kIsm;
  if (absorption == "eyring") return AbsorptionModel::kEyring;
  if (absorption == "sabine") return AbsorptionModel::kSabine;
  throw std::invalid_argument("config: unknown absorption model: " + absorption);
}

FeatureMode ExperimentConfig::GetFeatureMode() const {
  return FeatureModeFromName(feature_mode);
}

LossKind ExperimentConfig::GetLossKind() const { return LossKindFromName(loss); }

std::vector<MaskKind> ExperimentConfig::GetMaskKinds() const {
  std::vector<MaskKind> kinds;
  std::istringstream in(mask_kinds);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) kinds.push_back(MaskKindFromName(part));
  }
  if (kinds.empty()) throw std::invalid_argument("config: no mask kinds");
  return kinds;
}

ExperimentConfig StandardTrainConfig(const std::string& workdir) {
  ExperimentConfig cfg;
  cfg.workdir = workdir;
  cfg.seed = 7001;
  cfg.count = 200;
  cfg.source_count = 2;
  cfg.duration_s = 0.8;
  // 16 ms window (F = 129) with 8 ms hop: the estimator needs hidden
  // width of order F to express per-bin spatial contrasts, and the
  // smaller F keeps 2000 steps inside the runtime budget.
  cfg.win_ms = 16.0;
  cfg.ranges.t60_min = 0.10;
  cfg.ranges.t60_max = 0.35;
  cfg.source_kind = "shared";  // spectrally confusable pairs
  cfg.feature_mode = "mag_ipd_angle";
  cfg.loss = "upit_sisnr";
  cfg.hidden = {256};
  cfg.learning_rate = 0.1;
  cfg.steps = 2000;
  cfg.batch_size = 1;
  return cfg;
}

ExperimentConfig StandardEvalConfig(const std::string& workdir) {
  ExperimentConfig cfg = StandardTrainConfig(workdir);
  cfg.seed = 7002;
  cfg.count = 60;
  return cfg;
}

}  // namespace sepkit
