// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/masks.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sepkit {

const char* MaskKindName(MaskKind kind) {
  switch (kind) {
    case MaskKind::kIbm:
      return "ibm";
    case MaskKind::kIam:
      return "iam";
    case MaskKind::kIrm:
      return "irm";
    case MaskKind::kIpsm:
      return "ipsm";
    case MaskKind::kEstimated:
      return "estimated";
  }
  throw std::invalid_argument("bad mask kind");
}

MaskKind MaskKindFromName(const std::string& name) {
  if (name == "ibm") return MaskKind::kIbm;
  if (name == "iam") return MaskKind::kIam;
  if (name == "irm") return MaskKind::kIrm;
  if (name == "ipsm") return MaskKind::kIpsm;
  if (name == "estimated") return MaskKind::kEstimated;
  throw std::invalid_argument("unknown mask kind: " + name);
}

MaskSet ComputeOracleMask(MaskKind kind,
                          const std::vector<ComplexSpectrogram>& source_specs,
                          const ComplexSpectrogram& mix_spec, const MaskOptions& opts) {
  if (source_specs.empty())
    throw std::invalid_argument("oracle mask: no source spectrograms");
  if (kind == MaskKind::kEstimated)
    throw std::invalid_argument("oracle mask: 'estimated' is not an oracle kind");
  const Eigen::Index frames = mix_spec.frames();
  const Eigen::Index bins = mix_spec.bins();
  for (const auto& s : source_specs)
    if (s.frames() != frames || s.bins() != bins)
      throw std::invalid_argument("oracle mask: dimension mismatch");
  const int num_sources = static_cast<int>(source_specs.size());

  MaskSet out;
  out.kind = kind;
  out.masks.assign(static_cast<size_t>(num_sources),
                   Eigen::MatrixXd::Zero(frames, bins));

  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index k = 0; k < bins; ++k) {
      const std::complex<double> y = mix_spec.values(t, k);
      const double ymag = std::abs(y);
      if (ymag < opts.silent_mag) continue;  // silent mix cell: all masks 0

      switch (kind) {
        case MaskKind::kIbm: {
          int winner = 0;
          double best = -1.0;
          for (int s = 0; s < num_sources; ++s) {
            const double m = std::abs(source_specs[static_cast<size_t>(s)].values(t, k));
            if (m > best) {  // ties resolve to the lowest index
              best = m;
              winner = s;
            }
          }
          out.masks[static_cast<size_t>(winner)](t, k) = 1.0;
          break;
        }
        case MaskKind::kIam: {
          for (int s = 0; s < num_sources; ++s) {
            const double m = std::abs(source_specs[static_cast<size_t>(s)].values(t, k));
            out.masks[static_cast<size_t>(s)](t, k) =
                std::min(m / ymag, opts.ceiling);
          }
          break;
        }
        case MaskKind::kIrm: {
          double denom = 0.0;
          for (int s = 0; s < num_sources; ++s) {
            const double m = std::abs(source_specs[static_cast<size_t>(s)].values(t, k));
            denom += opts.irm_power ? m * m : m;
          }
          if (denom < opts.silent_mag) break;  // all sources silent here
          for (int s = 0; s < num_sources; ++s) {
            const double m = std::abs(source_specs[static_cast<size_t>(s)].values(t, k));
            out.masks[static_cast<size_t>(s)](t, k) =
                opts.irm_power ? std::sqrt(m * m / denom) : m / denom;
          }
          break;
        }
        case MaskKind::kIpsm: {
          const double yphase = std::arg(y);
          for (int s = 0; s < num_sources; ++s) {
            const std::complex<double> x = source_specs[static_cast<size_t>(s)].values(t, k);
            const double v = std::abs(x) * std::cos(std::arg(x) - yphase) / ymag;
            out.masks[static_cast<size_t>(s)](t, k) =
                std::clamp(v, opts.psm_floor, opts.ceiling);
          }
          break;
        }
        case MaskKind::kEstimated:
          break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd ApplyMask(const Eigen::MatrixXd& mask, const Eigen::MatrixXd& mix_mag) {
  if (mask.rows() != mix_mag.rows() || mask.cols() != mix_mag.cols())
    throw std::invalid_argument("apply_mask: dimension mismatch");
  return mask.cwiseProduct(mix_mag);
}

Eigen::VectorXd Reconstruct(const Eigen::MatrixXd& est_magnitude,
                            const Eigen::MatrixXd& mix_phase, const StftKernel& kernel) {
  return Istft(Recombine(est_magnitude, mix_phase), kernel);
}

}  // namespace sepkit
