// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/features.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sepkit/util.h"

namespace sepkit {

namespace {

constexpr double kSilentMag = 1e-12;

double WrapPhase(double p) {
  p = std::remainder(p, 2.0 * M_PI);
  if (p <= -M_PI) p += 2.0 * M_PI;
  return p;
}

void CheckSpecDims(const std::vector<ComplexSpectrogram>& specs) {
  if (specs.empty()) throw std::invalid_argument("features: no spectrograms");
  for (const auto& s : specs)
    if (s.frames() != specs[0].frames() || s.bins() != specs[0].bins())
      throw std::invalid_argument("features: spectrogram dimension mismatch");
}

void CheckPairs(const std::vector<MicPair>& pairs, int channel_count) {
  if (pairs.empty()) throw std::invalid_argument("features: empty pair list");
  for (const auto& [a, b] : pairs) {
    if (a == b) throw std::invalid_argument("features: pair with identical mics");
    if (a < 0 || b < 0 || a >= channel_count || b >= channel_count)
      throw std::invalid_argument("features: pair index out of range");
  }
}

}  // namespace

std::vector<MicPair> DefaultPairList() {
  return {{0, 3}, {1, 4}, {2, 5}, {0, 1}, {2, 3}, {4, 5}};
}

IpdFeatures ComputeIpd(const std::vector<ComplexSpectrogram>& specs,
                       const std::vector<MicPair>& pairs) {
  CheckSpecDims(specs);
  CheckPairs(pairs, static_cast<int>(specs.size()));
  const Eigen::Index frames = specs[0].frames();
  const Eigen::Index bins = specs[0].bins();

  IpdFeatures out;
  out.raw.reserve(pairs.size());
  for (const auto& [i1, i2] : pairs) {
    Eigen::MatrixXd ipd(frames, bins);
    const auto& a = specs[static_cast<size_t>(i1)].values;
    const auto& b = specs[static_cast<size_t>(i2)].values;
    for (Eigen::Index t = 0; t < frames; ++t)
      for (Eigen::Index k = 0; k < bins; ++k) {
        const std::complex<double> va = a(t, k), vb = b(t, k);
        if (std::abs(va) < kSilentMag || std::abs(vb) < kSilentMag) {
          ipd(t, k) = 0.0;
        } else {
          ipd(t, k) = WrapPhase(std::arg(va) - std::arg(vb));
        }
      }
    out.cos_planes.push_back(ipd.array().cos());
    out.sin_planes.push_back(ipd.array().sin());
    out.raw.push_back(std::move(ipd));
  }
  return out;
}

double PairPlaneWaveDelay(const ArrayGeometry& array, const MicPair& pair,
                          double azimuth) {
  // Propagation direction of a wave arriving from the azimuth.
  const Eigen::Vector3d travel(-std::cos(azimuth), -std::sin(azimuth), 0.0);
  const Eigen::Vector3d baseline =
      array.MicPosition(pair.first) - array.MicPosition(pair.second);
  return baseline.dot(travel) / kSpeedOfSound;
}

SteeringSet SteeringVectors(const ArrayGeometry& array, double azimuth,
                            const std::vector<MicPair>& pairs,
                            const AnalysisConfig& config) {
  if (!std::isfinite(azimuth))
    throw std::invalid_argument("steering: azimuth must be finite");
  CheckPairs(pairs, array.mic_count);
  SteeringSet out;
  const int bins = config.bins();
  for (const auto& pair : pairs) {
    const double delay = PairPlaneWaveDelay(array, pair, azimuth);
    Eigen::VectorXcd e(bins);
    for (int k = 0; k < bins; ++k) {
      const double phi = 2.0 * M_PI * config.bin_hz(k) * delay;
      e[k] = std::complex<double>(std::cos(phi), std::sin(phi));
    }
    out.coeffs.push_back(std::move(e));
  }
  return out;
}

std::vector<Eigen::MatrixXd> ComputeAngleFeatures(
    const std::vector<ComplexSpectrogram>& specs,
    const std::vector<SteeringSet>& steering_per_speaker,
    const std::vector<MicPair>& pairs) {
  CheckSpecDims(specs);
  CheckPairs(pairs, static_cast<int>(specs.size()));
  const Eigen::Index frames = specs[0].frames();
  const Eigen::Index bins = specs[0].bins();
  for (const auto& st : steering_per_speaker) {
    if (st.coeffs.size() != pairs.size())
      throw std::invalid_argument("angle features: steering pair count mismatch");
    for (const auto& e : st.coeffs)
      if (e.size() != bins)
        throw std::invalid_argument("angle features: steering bin count mismatch");
  }

  std::vector<Eigen::MatrixXd> out;
  for (const auto& steering : steering_per_speaker) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(frames, bins);
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto& y1 = specs[static_cast<size_t>(pairs[p].first)].values;
      const auto& y2 = specs[static_cast<size_t>(pairs[p].second)].values;
      const auto& e = steering.coeffs[p];
      for (Eigen::Index t = 0; t < frames; ++t)
        for (Eigen::Index k = 0; k < bins; ++k) {
          const std::complex<double> v1 = y1(t, k), v2 = y2(t, k);
          if (std::abs(v1) < kSilentMag || std::abs(v2) < kSilentMag) continue;
          // unit(e * Y1/Y2) = e * unit(Y1 * conj(Y2)) since |e| = 1
          const std::complex<double> z = v1 * std::conj(v2);
          a(t, k) += (e[k] * (z / std::abs(z))).real();
        }
    }
    out.push_back(std::move(a));
  }
  return out;
}

const char* FeatureModeName(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kMagnitude:
      return "mag";
    case FeatureMode::kMagIpd:
      return "mag_ipd";
    case FeatureMode::kMagIpdAngle:
      return "mag_ipd_angle";
  }
  throw std::invalid_argument("bad feature mode");
}

FeatureMode FeatureModeFromName(const std::string& name) {
  if (name == "mag") return FeatureMode::kMagnitude;
  if (name == "mag_ipd") return FeatureMode::kMagIpd;
  if (name == "mag_ipd_angle") return FeatureMode::kMagIpdAngle;
  throw std::invalid_argument("unknown feature mode: " + name);
}

int FeaturePlaneCount(FeatureMode mode, int pair_count, int speaker_count) {
  switch (mode) {
    case FeatureMode::kMagnitude:
      return 1;
    case FeatureMode::kMagIpd:
      return 1 + 2 * pair_count;
    case FeatureMode::kMagIpdAngle:
      return 1 + 2 * pair_count + speaker_count;
  }
  throw std::invalid_argument("bad feature mode");
}

Eigen::MatrixXd AssembleFeatures(const Eigen::MatrixXd& magnitude,
                                 const IpdFeatures* ipd,
                                 const std::vector<Eigen::MatrixXd>* angle,
                                 FeatureMode mode) {
  const Eigen::Index frames = magnitude.rows();
  const Eigen::Index bins = magnitude.cols();
  if (mode == FeatureMode::kMagnitude) return magnitude;

  if (ipd == nullptr) throw std::invalid_argument("assemble: IPD features missing");
  const int pair_count = ipd->pair_count();
  for (const auto& m : ipd->cos_planes)
    if (m.rows() != frames || m.cols() != bins)
      throw std::invalid_argument("assemble: IPD plane shape mismatch");

  int planes = 1 + 2 * pair_count;
  if (mode == FeatureMode::kMagIpdAngle) {
    if (angle == nullptr || angle->empty())
      throw std::invalid_argument("assemble: angle features missing in angle mode");
    for (const auto& m : *angle)
      if (m.rows() != frames || m.cols() != bins)
        throw std::invalid_argument("assemble: angle plane shape mismatch");
    planes += static_cast<int>(angle->size());
  }

  Eigen::MatrixXd out(frames, bins * planes);
  Eigen::Index col = 0;
  out.middleCols(col, bins) = magnitude;
  col += bins;
  for (int p = 0; p < pair_count; ++p, col += bins)
    out.middleCols(col, bins) = ipd->cos_planes[static_cast<size_t>(p)];
  for (int p = 0; p < pair_count; ++p, col += bins)
    out.middleCols(col, bins) = ipd->sin_planes[static_cast<size_t>(p)];
  if (mode == FeatureMode::kMagIpdAngle)
    for (const auto& m : *angle) {
      out.middleCols(col, bins) = m;
      col += bins;
    }
  return out;
}

void WriteFeatureMatrix(const std::string& path, const Eigen::MatrixXd& features,
                        int bins) {
  if (bins <= 0 || features.cols() % bins != 0)
    throw std::invalid_argument("feature io: width is not a multiple of bins");
  std::string out;
  out.reserve(12 + static_cast<size_t>(features.size()) * 8);
  AppendU32Le(&out, static_cast<uint32_t>(features.rows()));
  AppendU32Le(&out, static_cast<uint32_t>(bins));
  AppendU32Le(&out, static_cast<uint32_t>(features.cols() / bins));
  for (Eigen::Index t = 0; t < features.rows(); ++t)
    for (Eigen::Index c = 0; c < features.cols(); ++c) AppendF64Le(&out, features(t, c));
  AtomicWriteFile(path, out);
}

Eigen::MatrixXd ReadFeatureMatrix(const std::string& path, int* bins_out,
                                  int* planes_out) {
  const std::string raw = ReadTextFile(path);
  if (raw.size() < 12) throw std::runtime_error("feature io: truncated header");
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  const uint32_t frames = ReadU32Le(p);
  const uint32_t bins = ReadU32Le(p + 4);
  const uint32_t planes = ReadU32Le(p + 8);
  const size_t expect = 12 + static_cast<size_t>(frames) * bins * planes * 8;
  if (raw.size() != expect) throw std::runtime_error("feature io: size mismatch");
  Eigen::MatrixXd m(frames, static_cast<Eigen::Index>(bins) * planes);
  const unsigned char* d = p + 12;
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(t, c) = ReadF64Le(d);
      d += 8;
    }
  if (bins_out != nullptr) *bins_out = static_cast<int>(bins);
  if (planes_out != nullptr) *planes_out = static_cast<int>(planes);
  return m;
}

}  // namespace sepkit
