// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_MASKS_H_
#define SEPKIT_MASKS_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sepkit/stft.h"

namespace sepkit {

enum class MaskKind { kIbm = 0, kIam = 1, kIrm = 2, kIpsm = 3, kEstimated = 4 };

const char* MaskKindName(MaskKind kind);
MaskKind MaskKindFromName(const std::string& name);

struct MaskOptions {
  double ceiling = 2.0;      // IAM / IPSM upper clip
  double psm_floor = -1.0;   // IPSM lower clip
  bool irm_power = false;    // sqrt of the power ratio instead of |X|/sum|X|
  double silent_mag = 1e-12; // below this the mix cell gets all-zero masks
};

struct MaskSet {
  MaskKind kind = MaskKind::kEstimated;
  std::vector<Eigen::MatrixXd> masks;  // per source, T x F
};

// Cell-wise oracle masks from ground-truth source spectrograms:
//   IBM  : 1 for the largest |X_s| (ties to the lowest index), else 0
//   IAM  : |X_s| / |Y|, clipped to [0, ceiling]
//   IRM  : |X_s| / sum_j |X_j|  (or sqrt of the power ratio)
//   IPSM : |X_s| cos(angle(X_s) - angle(Y)) / |Y|, clipped
MaskSet ComputeOracleMask(MaskKind kind,
                          const std::vector<ComplexSpectrogram>& source_specs,
                          const ComplexSpectrogram& mix_spec,
                          const MaskOptions& opts = MaskOptions());

// |X_hat| = M (element-wise *) |Y|
Eigen::MatrixXd ApplyMask(const Eigen::MatrixXd& mask, const Eigen::MatrixXd& mix_mag);

// ISTFT of the masked magnitude recombined with the mix phase.
Eigen::VectorXd Reconstruct(const Eigen::MatrixXd& est_magnitude,
                            const Eigen::MatrixXd& mix_phase, const StftKernel& kernel);

}  // namespace sepkit

#endif  // SEPKIT_MASKS_H_
