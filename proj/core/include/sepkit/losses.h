// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_LOSSES_H_
#define SEPKIT_LOSSES_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sepkit/stft.h"

namespace sepkit {

enum class LossKind { kUpitSiSnr = 0, kUpitMse = 1, kTgtSiSnr = 2 };

const char* LossKindName(LossKind kind);
LossKind LossKindFromName(const std::string& name);

// Si-SNR with 1e-10 smoothing on both energies so the loss and its
// gradient stay finite at degenerate estimates. grad, when given, receives
// d(value)/d(est).
double SiSnrSmooth(const Eigen::VectorXd& est, const Eigen::VectorXd& ref,
                   Eigen::VectorXd* grad = nullptr);

struct LossResult {
  double value = 0.0;
  std::vector<int> permutation;              // mask slot used for each reference
  std::vector<Eigen::MatrixXd> mask_grads;   // per mask slot, T x F
};

// -mean Si-SNR of the reconstructions (mask * |Y| with the mix phase,
// through the transposed-convolution ISTFT) under the best permutation.
// The permutation is treated as fixed by the gradients.
LossResult LossUpitSiSnr(const std::vector<Eigen::MatrixXd>& masks,
                         const Eigen::MatrixXd& mix_mag,
                         const Eigen::MatrixXd& mix_phase,
                         const std::vector<Eigen::VectorXd>& refs,
                         const StftKernel& kernel);

// Mean squared error between masked and reference magnitudes under the
// best permutation.
LossResult LossUpitMse(const std::vector<Eigen::MatrixXd>& masks,
                       const Eigen::MatrixXd& mix_mag,
                       const std::vector<Eigen::MatrixXd>& ref_mags);

// -Si-SNR of the first (target) source only; no permutation search.
LossResult LossTgtSiSnr(const Eigen::MatrixXd& target_mask,
                        const Eigen::MatrixXd& mix_mag,
                        const Eigen::MatrixXd& mix_phase,
                        const Eigen::VectorXd& ref_target, const StftKernel& kernel);

}  // namespace sepkit

#endif  // SEPKIT_LOSSES_H_
