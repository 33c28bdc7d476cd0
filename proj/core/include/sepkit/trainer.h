// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_TRAINER_H_
#define SEPKIT_TRAINER_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sepkit/estimator.h"
#include "sepkit/losses.h"

namespace sepkit {

struct TrainConfig {
  double learning_rate = 1e-3;
  int steps = 1000;
  int batch_size = 4;
  uint64_t seed = 0;
  double clip_norm = 5.0;  // global-norm gradient clip

  void Validate() const;
};

// Precomputed per-utterance tensors; refs are the channel-0 reverberant
// images truncated to the ISTFT output length.
struct TrainItem {
  Eigen::MatrixXd features;  // conditioned, T x input_width
  Eigen::MatrixXd mix_mag;   // T x F
  Eigen::MatrixXd mix_phase;
  std::vector<Eigen::VectorXd> refs;
  std::vector<Eigen::MatrixXd> ref_mags;  // used by the MSE loss
};

struct StepStat {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

// Scales the magnitude plane to unit mean and angle planes into [-1, 1];
// cos/sin planes pass through. Keeps gradient-descent step sizes sane
// across utterances of different level.
Eigen::MatrixXd ConditionFeatures(const Eigen::MatrixXd& raw, FeatureMode mode,
                                  int bins, int pair_count);

// Plain gradient descent with global-norm clipping. Batches are drawn in a
// seeded shuffled order; gradient accumulation is an ordered reduction, so
// runs are bit-reproducible. Aborts when the loss exceeds ten times the
// initial loss magnitude for 50 consecutive steps.
std::vector<StepStat> Train(const std::vector<TrainItem>& items,
                            MaskEstimator* estimator, LossKind loss,
                            const TrainConfig& cfg, const StftKernel& kernel);

std::string FormatLossCurve(const std::vector<StepStat>& stats);

}  // namespace sepkit

#endif  // SEPKIT_TRAINER_H_
