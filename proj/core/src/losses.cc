// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sepkit/masks.h"

namespace sepkit {

const char* LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kUpitSiSnr:
      return "upit_sisnr";
    case LossKind::kUpitMse:
      return "upit_mse";
    case LossKind::kTgtSiSnr:
      return "tgt_sisnr";
  }
  throw std::invalid_argument("bad loss kind");
}

LossKind LossKindFromName(const std::string& name) {
  if (name == "upit_sisnr") return LossKind::kUpitSiSnr;
  if (name == "upit_mse") return LossKind::kUpitMse;
  if (name == "tgt_sisnr") return LossKind::kTgtSiSnr;
  throw std::invalid_argument("unknown loss kind: " + name);
}

double SiSnrSmooth(const Eigen::VectorXd& est, const Eigen::VectorXd& ref,
                   Eigen::VectorXd* grad) {
  if (est.size() != ref.size())
    throw std::invalid_argument("si_snr loss: length mismatch");
  constexpr double kEps = 1e-10;    // smooths the +80 dB end
  constexpr double kFloor = 1e-30;  // log guard; a zero estimate stays finite
  const double ln10_over_10 = std::log(10.0) / 10.0;

  const Eigen::VectorXd ec = est.array() - est.mean();
  const Eigen::VectorXd rc = ref.array() - ref.mean();
  const double ref_energy = rc.squaredNorm();
  if (ref_energy <= 0.0)
    throw std::invalid_argument("si_snr loss: zero-energy reference");

  const double alpha = ec.dot(rc) / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  const Eigen::VectorXd noise = ec - alpha * rc;
  const double noise_energy = noise.squaredNorm();
  const double value =
      (std::log(target_energy + kFloor) - std::log(noise_energy + kEps)) / ln10_over_10;

  if (grad != nullptr) {
    // <noise, rc> = 0, so d(noise_energy)/d(ec) is just 2 * noise.
    Eigen::VectorXd g = (2.0 * alpha / (target_energy + kFloor)) * rc -
                        (2.0 / (noise_energy + kEps)) * noise;
    g /= ln10_over_10;
    *grad = g.array() - g.mean();  // through the mean normalization of est
  }
  return value;
}

namespace {

void CheckMaskDims(const std::vector<Eigen::MatrixXd>& masks,
                   const Eigen::MatrixXd& mix_mag) {
  if (masks.empty()) throw std::invalid_argument("loss: no masks");
  for (const auto& m : masks)
    if (m.rows() != mix_mag.rows() || m.cols() != mix_mag.cols())
      throw std::invalid_argument("loss: mask/mix dimension mismatch");
}

// Best assignment of mask slots to references: perm[j] is the slot scored
// against reference j. Exhaustive over S! with S <= 4.
std::vector<int> BestPermutation(const Eigen::MatrixXd& pair_value, bool maximize) {
  const int s_count = static_cast<int>(pair_value.rows());
  if (s_count > 4) throw std::invalid_argument("loss: source count too large");
  std::vector<int> perm(static_cast<size_t>(s_count));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_total = maximize ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int j = 0; j < s_count; ++j)
      total += pair_value(perm[static_cast<size_t>(j)], j);
    if (maximize ? total > best_total : total < best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// d(value)/d(est magnitude) pulled back through recombine + istft.
Eigen::MatrixXd MagnitudeGradFromSignalGrad(const Eigen::VectorXd& signal_grad,
                                            const Eigen::MatrixXd& mix_phase,
                                            const StftKernel& kernel) {
  const Eigen::Index frames = mix_phase.rows();
  const Eigen::Index bins = mix_phase.cols();
  const Eigen::MatrixXd dcoeffs = IstftAdjoint(signal_grad, kernel, frames);
  Eigen::MatrixXd dmag(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index k = 0; k < bins; ++k)
      dmag(t, k) = dcoeffs(t, k) * std::cos(mix_phase(t, k)) +
                   dcoeffs(t, bins + k) * std::sin(mix_phase(t, k));
  return dmag;
}

}  // namespace

LossResult LossUpitSiSnr(const std::vector<Eigen::MatrixXd>& masks,
                         const Eigen::MatrixXd& mix_mag,
                         const Eigen::MatrixXd& mix_phase,
                         const std::vector<Eigen::VectorXd>& refs,
                         const StftKernel& kernel) {
  CheckMaskDims(masks, mix_mag);
  const int s_count = static_cast<int>(masks.size());
  if (static_cast<int>(refs.size()) != s_count)
    throw std::invalid_argument("loss: reference count mismatch");

  std::vector<Eigen::VectorXd> est_signals(static_cast<size_t>(s_count));
  for (int i = 0; i < s_count; ++i)
    est_signals[static_cast<size_t>(i)] =
        Reconstruct(ApplyMask(masks[static_cast<size_t>(i)], mix_mag), mix_phase, kernel);
  for (const auto& r : refs)
    if (r.size() != est_signals[0].size())
      throw std::invalid_argument("loss: reference length mismatch");

  Eigen::MatrixXd pair_value(s_count, s_count);
  for (int i = 0; i < s_count; ++i)
    for (int j = 0; j < s_count; ++j)
      pair_value(i, j) = SiSnrSmooth(est_signals[static_cast<size_t>(i)],
                                     refs[static_cast<size_t>(j)]);

  LossResult result;
  result.permutation = BestPermutation(pair_value, /*maximize=*/true);

  double mean_v = 0.0;
  result.mask_grads.assign(static_cast<size_t>(s_count),
                           Eigen::MatrixXd::Zero(mix_mag.rows(), mix_mag.cols()));
  for (int j = 0; j < s_count; ++j) {
    const int slot = result.permutation[static_cast<size_t>(j)];
    Eigen::VectorXd signal_grad;
    mean_v += SiSnrSmooth(est_signals[static_cast<size_t>(slot)],
                          refs[static_cast<size_t>(j)], &signal_grad);
    signal_grad *= -1.0 / s_count;  // loss = -mean Si-SNR
    result.mask_grads[static_cast<size_t>(slot)] =
        MagnitudeGradFromSignalGrad(signal_grad, mix_phase, kernel)
            .cwiseProduct(mix_mag);
  }
  result.value = -mean_v / s_count;
  return result;
}

LossResult LossUpitMse(const std::vector<Eigen::MatrixXd>& masks,
                       const Eigen::MatrixXd& mix_mag,
                       const std::vector<Eigen::MatrixXd>& ref_mags) {
  CheckMaskDims(masks, mix_mag);
  const int s_count = static_cast<int>(masks.size());
  if (static_cast<int>(ref_mags.size()) != s_count)
    throw std::invalid_argument("loss: reference count mismatch");
  for (const auto& r : ref_mags)
    if (r.rows() != mix_mag.rows() || r.cols() != mix_mag.cols())
      throw std::invalid_argument("loss: reference magnitude dimension mismatch");

  std::vector<Eigen::MatrixXd> est_mags(static_cast<size_t>(s_count));
  for (int i = 0; i < s_count; ++i)
    est_mags[static_cast<size_t>(i)] = ApplyMask(masks[static_cast<size_t>(i)], mix_mag);

  const double cell_count =
      static_cast<double>(mix_mag.rows()) * static_cast<double>(mix_mag.cols());
  Eigen::MatrixXd pair_value(s_count, s_count);
  for (int i = 0; i < s_count; ++i)
    for (int j = 0; j < s_count; ++j)
      pair_value(i, j) = (est_mags[static_cast<size_t>(i)] -
                          ref_mags[static_cast<size_t>(j)])
                             .squaredNorm() /
                         cell_count;

  LossResult result;
  result.permutation = BestPermutation(pair_value, /*maximize=*/false);
  result.value = 0.0;
  result.mask_grads.assign(static_cast<size_t>(s_count),
                           Eigen::MatrixXd::Zero(mix_mag.rows(), mix_mag.cols()));
  for (int j = 0; j < s_count; ++j) {
    const int slot = result.permutation[static_cast<size_t>(j)];
    result.value += pair_value(slot, j) / s_count;
    result.mask_grads[static_cast<size_t>(slot)] =
        (2.0 / (s_count * cell_count)) *
        (est_mags[static_cast<size_t>(slot)] - ref_mags[static_cast<size_t>(j)])
            .cwiseProduct(mix_mag);
  }
  return result;
}

LossResult LossTgtSiSnr(const Eigen::MatrixXd& target_mask,
                        const Eigen::MatrixXd& mix_mag,
                        const Eigen::MatrixXd& mix_phase,
                        const Eigen::VectorXd& ref_target, const StftKernel& kernel) {
  CheckMaskDims({target_mask}, mix_mag);
  const Eigen::VectorXd est =
      Reconstruct(ApplyMask(target_mask, mix_mag), mix_phase, kernel);
  if (ref_target.size() != est.size())
    throw std::invalid_argument("loss: reference length mismatch");

  LossResult result;
  result.permutation = {0};
  Eigen::VectorXd signal_grad;
  result.value = -SiSnrSmooth(est, ref_target, &signal_grad);
  signal_grad *= -1.0;
  result.mask_grads.push_back(
      MagnitudeGradFromSignalGrad(signal_grad, mix_phase, kernel).cwiseProduct(mix_mag));
  return result;
}

}  // namespace sepkit
