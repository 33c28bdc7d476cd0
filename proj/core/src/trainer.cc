// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/trainer.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sepkit/util.h"

namespace sepkit {

void TrainConfig::Validate() const {
  if (learning_rate < 0.0) throw std::invalid_argument("train: negative learning rate");
  if (steps < 1) throw std::invalid_argument("train: steps must be positive");
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be positive");
  if (clip_norm <= 0.0) throw std::invalid_argument("train: clip norm must be positive");
}

Eigen::MatrixXd ConditionFeatures(const Eigen::MatrixXd& raw, FeatureMode mode,
                                  int bins, int pair_count) {
  Eigen::MatrixXd out = raw;
  const double mag_mean = out.leftCols(bins).mean();
  out.leftCols(bins) /= mag_mean + 1e-8;
  if (mode == FeatureMode::kMagIpdAngle) {
    const Eigen::Index angle_start = static_cast<Eigen::Index>(bins) * (1 + 2 * pair_count);
    out.rightCols(out.cols() - angle_start) /= static_cast<double>(pair_count);
  }
  return out;
}

namespace {

LossResult EvalLoss(const TrainItem& item, const std::vector<Eigen::MatrixXd>& masks,
                    LossKind loss, const StftKernel& kernel) {
  switch (loss) {
    case LossKind::kUpitSiSnr:
      return LossUpitSiSnr(masks, item.mix_mag, item.mix_phase, item.refs, kernel);
    case LossKind::kUpitMse:
      return LossUpitMse(masks, item.mix_mag, item.ref_mags);
    case LossKind::kTgtSiSnr:
      return LossTgtSiSnr(masks[0], item.mix_mag, item.mix_phase, item.refs[0], kernel);
  }
  throw std::invalid_argument("bad loss kind");
}

}  // namespace

std::vector<StepStat> Train(const std::vector<TrainItem>& items,
                            MaskEstimator* estimator, LossKind loss,
                            const TrainConfig& cfg, const StftKernel& kernel) {
  cfg.Validate();
  if (items.empty()) throw std::invalid_argument("train: empty dataset");

  Rng rng(cfg.seed);
  std::vector<size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  size_t cursor = order.size();  // forces a shuffle before the first batch

  std::vector<StepStat> stats;
  stats.reserve(static_cast<size_t>(cfg.steps));
  double divergence_threshold = 0.0;
  int divergence_streak = 0;

  for (int step = 0; step < cfg.steps; ++step) {
    auto grads = estimator->ZeroGradients();
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      if (cursor >= order.size()) {
        // Fisher-Yates reshuffle per epoch, seeded.
        for (size_t i = order.size(); i > 1; --i) {
          const size_t j = rng.UniformInt(i);
          std::swap(order[i - 1], order[j]);
        }
        cursor = 0;
      }
      const TrainItem& item = items[order[cursor++]];
      MaskEstimator::ForwardCache cache;
      const auto masks = estimator->Forward(item.features, &cache);
      const LossResult result = EvalLoss(item, masks, loss, kernel);
      batch_loss += result.value;
      grads.Accumulate(estimator->Backward(cache, result.mask_grads));
    }
    batch_loss /= cfg.batch_size;
    grads.Scale(1.0 / cfg.batch_size);

    double grad_norm = std::sqrt(grads.SquaredNorm());
    if (!std::isfinite(grad_norm) || !std::isfinite(batch_loss))
      throw std::runtime_error("train: non-finite loss or gradient at step " +
                               std::to_string(step));
    if (grad_norm > cfg.clip_norm) {
      grads.Scale(cfg.clip_norm / grad_norm);
      grad_norm = cfg.clip_norm;
    }
    estimator->ApplyStep(grads, cfg.learning_rate);
    stats.push_back({step, batch_loss, grad_norm});

    if (step == 0) divergence_threshold = 10.0 * std::max(std::abs(batch_loss), 1.0);
    if (batch_loss > divergence_threshold) {
      if (++divergence_streak >= 50)
        throw std::runtime_error("train: diverged (loss above 10x initial for 50 steps)");
    } else {
      divergence_streak = 0;
    }
  }
  return stats;
}

std::string FormatLossCurve(const std::vector<StepStat>& stats) {
  std::ostringstream out;
  out << "# step loss grad_norm\n";
  for (const auto& s : stats)
    out << s.step << " " << FormatDouble(s.loss) << " " << FormatDouble(s.grad_norm)
        << "\n";
  return out.str();
}

}  // namespace sepkit
