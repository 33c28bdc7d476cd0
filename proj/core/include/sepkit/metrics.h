// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_METRICS_H_
#define SEPKIT_METRICS_H_

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sepkit {

inline constexpr int kNumAngleBuckets = 4;
extern const char* const kAngleBucketNames[kNumAngleBuckets];

// 0-15 / 15-45 / 45-90 / 90-180 degrees.
int AngleBucketFromDelta(double delta_deg);

// Scale-invariant SNR in dB. Both signals are mean-normalized; the target
// is the projection of the estimate onto the reference. Capped to lie in
// [-80, 80] so degenerate residuals stay finite.
double SiSnr(const Eigen::VectorXd& est, const Eigen::VectorXd& ref);

// Source-to-distortion ratio in dB. The target component is the least
// squares projection of est onto filter_len delayed copies of the target
// reference; the residual splits into interference (projection onto the
// other references' delayed span) and artifacts. Normal equations carry a
// 1e-10 ridge; rank_deficient, when given, reports whether it mattered.
double Sdr(const Eigen::VectorXd& est, const std::vector<Eigen::VectorXd>& refs,
           int target_index, int filter_len, bool* rank_deficient = nullptr);

struct UtteranceScore {
  std::string id;
  int bucket = 0;
  std::vector<int> permutation;  // estimate index used for each reference
  std::vector<double> si_snr_db;
  std::vector<double> sdr_db;

  double MeanSiSnr() const;
  double MeanSdr() const;
};

// Exhaustive search over source-to-estimate assignments (S <= 4),
// maximizing mean Si-SNR; SDR is reported under the chosen assignment.
UtteranceScore PermuteAndScore(const std::vector<Eigen::VectorXd>& ests,
                               const std::vector<Eigen::VectorXd>& refs,
                               int sdr_filter_len = 512);

struct BucketStats {
  int count = 0;
  double mean_si_snr = 0.0;
  double mean_sdr = 0.0;
};

struct Report {
  std::array<std::optional<BucketStats>, kNumAngleBuckets> buckets;
  int utterance_count = 0;
  double avg_si_snr = 0.0;  // utterance-weighted
  double avg_sdr = 0.0;
};

Report AggregateReport(const std::vector<UtteranceScore>& scores);

// Aligned table with one column per angle bucket plus AVG.
std::string FormatReportTable(const Report& report, const std::string& label);
// Machine readable form, tab separated.
std::string FormatReportTsv(const Report& report, const std::string& label);

// Line-oriented per-utterance records; reports are recomputable from these.
std::string WriteScoreLines(const std::vector<UtteranceScore>& scores);
std::vector<UtteranceScore> ParseScoreLines(const std::string& text);

}  // namespace sepkit

#endif  // SEPKIT_METRICS_H_
