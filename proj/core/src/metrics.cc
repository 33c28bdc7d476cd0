// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/metrics.h"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sepkit/util.h"

namespace sepkit {

const char* const kAngleBucketNames[kNumAngleBuckets] = {"0-15", "15-45", "45-90",
                                                         "90-180"};

int AngleBucketFromDelta(double delta_deg) {
  if (!(delta_deg >= 0.0 && delta_deg <= 180.0))
    throw std::invalid_argument("angle delta out of [0, 180]");
  if (delta_deg < 15.0) return 0;
  if (delta_deg < 45.0) return 1;
  if (delta_deg < 90.0) return 2;
  return 3;
}

namespace {

constexpr double kDbCap = 80.0;

double RatioDb(double num, double den) {
  if (den == 0.0) return kDbCap;
  if (num == 0.0) return -kDbCap;
  return std::clamp(10.0 * std::log10(num / den), -kDbCap, kDbCap);
}

// Gram matrix of delayed copies over the original signal domain: column d
// of signal a holds a[n-d] with leading zeros and a truncated tail. Entries
// are exact (the Toeplitz correlation minus its edge terms), so an estimate
// equal to one delayed column projects with zero residual.
Eigen::MatrixXd DelayedGram(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            int taps) {
  const Eigen::Index n = a.size();
  Eigen::MatrixXd g(taps, taps);
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd& s = pass == 0 ? a : b;
    const Eigen::VectorXd& t = pass == 0 ? b : a;
    // pass 0 fills diagonals j >= i with sum_m s[m + d] * t[m], d = j - i.
    for (int d = pass; d < taps; ++d) {
      double full = 0.0;
      const Eigen::Index len0 = n - d;  // overlap length at i = 0
      for (Eigen::Index m = 0; m < len0; ++m) full += s[m + d] * t[m];
      double val = full;
      for (int i = 0; i + d < taps; ++i) {
        if (pass == 0)
          g(i, i + d) = val;
        else
          g(i + d, i) = val;
        const Eigen::Index last = len0 - 1 - i;
        if (last >= 0) val -= s[last + d] * t[last];
      }
    }
  }
  return g;
}

Eigen::VectorXd DelayedRhs(const Eigen::VectorXd& a, const Eigen::VectorXd& y,
                           int taps) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd rhs(taps);
  for (int d = 0; d < taps; ++d) {
    double acc = 0.0;
    for (Eigen::Index m = 0; m + d < n; ++m) acc += a[m] * y[m + d];
    rhs[d] = acc;
  }
  return rhs;
}

Eigen::VectorXd ApplyFilter(const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                            Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int d = 0; d < c.size(); ++d) {
    if (c[d] == 0.0) continue;
    out.tail(n - d) += c[d] * a.head(n - d);
  }
  return out;
}

}  // namespace

double SiSnr(const Eigen::VectorXd& est, const Eigen::VectorXd& ref) {
  if (est.size() != ref.size())
    throw std::invalid_argument("si_snr: length mismatch");
  if (est.size() == 0) throw std::invalid_argument("si_snr: empty signals");
  const Eigen::VectorXd ec = est.array() - est.mean();
  const Eigen::VectorXd rc = ref.array() - ref.mean();
  const double ref_energy = rc.squaredNorm();
  if (ref_energy <= 0.0)
    throw std::invalid_argument("si_snr: zero-energy reference");
  const double alpha = ec.dot(rc) / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  const double noise_energy = (ec - alpha * rc).squaredNorm();
  return RatioDb(target_energy, noise_energy);
}

double Sdr(const Eigen::VectorXd& est, const std::vector<Eigen::VectorXd>& refs,
           int target_index, int filter_len, bool* rank_deficient) {
  if (filter_len < 1) throw std::invalid_argument("sdr: filter_len must be >= 1");
  if (target_index < 0 || target_index >= static_cast<int>(refs.size()))
    throw std::invalid_argument("sdr: target index out of range");
  const Eigen::Index n = est.size();
  for (const auto& r : refs)
    if (r.size() != n) throw std::invalid_argument("sdr: length mismatch");
  const int num_refs = static_cast<int>(refs.size());
  const int taps = filter_len;
  const double ridge = 1e-10;
  bool flagged = false;

  auto solve = [&](const Eigen::MatrixXd& gram,
                   const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    Eigen::MatrixXd g = gram;
    g.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (d.size() > 0 && d.minCoeff() <= d.maxCoeff() * 1e-12) flagged = true;
    return ldlt.solve(rhs);
  };

  const Eigen::VectorXd& target_ref = refs[static_cast<size_t>(target_index)];
  if (target_ref.squaredNorm() <= 0.0)
    throw std::invalid_argument("sdr: zero-energy target reference");

  const Eigen::VectorXd c =
      solve(DelayedGram(target_ref, target_ref, taps), DelayedRhs(target_ref, est, taps));
  const Eigen::VectorXd x_target = ApplyFilter(target_ref, c, n);
  const Eigen::VectorXd residual = est - x_target;

  Eigen::VectorXd e_inter = Eigen::VectorXd::Zero(n);
  if (num_refs > 1) {
    const int span = (num_refs - 1) * taps;
    Eigen::MatrixXd gram(span, span);
    Eigen::VectorXd rhs(span);
    std::vector<const Eigen::VectorXd*> others;
    for (int s = 0; s < num_refs; ++s)
      if (s != target_index) others.push_back(&refs[static_cast<size_t>(s)]);
    for (size_t ia = 0; ia < others.size(); ++ia) {
      rhs.segment(static_cast<Eigen::Index>(ia) * taps, taps) =
          DelayedRhs(*others[ia], residual, taps);
      for (size_t ib = 0; ib < others.size(); ++ib)
        gram.block(static_cast<Eigen::Index>(ia) * taps,
                   static_cast<Eigen::Index>(ib) * taps, taps, taps) =
            DelayedGram(*others[ia], *others[ib], taps);
    }
    const Eigen::VectorXd ci = solve(gram, rhs);
    for (size_t ia = 0; ia < others.size(); ++ia)
      e_inter += ApplyFilter(*others[ia],
                             ci.segment(static_cast<Eigen::Index>(ia) * taps, taps), n);
  }
  const Eigen::VectorXd e_artif = residual - e_inter;

  if (rank_deficient != nullptr) *rank_deficient = flagged;
  return RatioDb(x_target.squaredNorm(), (e_inter + e_artif).squaredNorm());
}

double UtteranceScore::MeanSiSnr() const {
  return std::accumulate(si_snr_db.begin(), si_snr_db.end(), 0.0) /
         static_cast<double>(si_snr_db.size());
}

double UtteranceScore::MeanSdr() const {
  return std::accumulate(sdr_db.begin(), sdr_db.end(), 0.0) /
         static_cast<double>(sdr_db.size());
}

UtteranceScore PermuteAndScore(const std::vector<Eigen::VectorXd>& ests,
                               const std::vector<Eigen::VectorXd>& refs,
                               int sdr_filter_len) {
  const int s_count = static_cast<int>(refs.size());
  if (static_cast<int>(ests.size()) != s_count)
    throw std::invalid_argument("permute_and_score: estimate/reference count mismatch");
  if (s_count < 1 || s_count > 4)
    throw std::invalid_argument("permute_and_score: source count must be in [1, 4]");

  std::vector<int> perm(static_cast<size_t>(s_count));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best_mean = -std::numeric_limits<double>::infinity();
  std::vector<double> best_scores(static_cast<size_t>(s_count));

  do {
    std::vector<double> scores(static_cast<size_t>(s_count));
    double mean = 0.0;
    for (int s = 0; s < s_count; ++s) {
      scores[static_cast<size_t>(s)] =
          SiSnr(ests[static_cast<size_t>(perm[static_cast<size_t>(s)])],
                refs[static_cast<size_t>(s)]);
      mean += scores[static_cast<size_t>(s)];
    }
    mean /= s_count;
    if (mean > best_mean) {
      best_mean = mean;
      best_perm = perm;
      best_scores = scores;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  UtteranceScore out;
  out.permutation = best_perm;
  out.si_snr_db = best_scores;
  out.sdr_db.resize(static_cast<size_t>(s_count));
  for (int s = 0; s < s_count; ++s)
    out.sdr_db[static_cast<size_t>(s)] =
        Sdr(ests[static_cast<size_t>(best_perm[static_cast<size_t>(s)])], refs, s,
            sdr_filter_len);
  return out;
}

Report AggregateReport(const std::vector<UtteranceScore>& scores) {
  if (scores.empty())
    throw std::invalid_argument("aggregate_report: empty score list");
  Report report;
  std::array<double, kNumAngleBuckets> snr_sum{}, sdr_sum{};
  std::array<int, kNumAngleBuckets> counts{};
  double snr_total = 0.0, sdr_total = 0.0;
  for (const auto& sc : scores) {
    if (sc.bucket < 0 || sc.bucket >= kNumAngleBuckets)
      throw std::invalid_argument("aggregate_report: bad bucket index");
    const double snr = sc.MeanSiSnr();
    const double sdr = sc.MeanSdr();
    counts[static_cast<size_t>(sc.bucket)] += 1;
    snr_sum[static_cast<size_t>(sc.bucket)] += snr;
    sdr_sum[static_cast<size_t>(sc.bucket)] += sdr;
    snr_total += snr;
    sdr_total += sdr;
  }
  for (int b = 0; b < kNumAngleBuckets; ++b) {
    if (counts[static_cast<size_t>(b)] == 0) continue;  // absent, not zero
    BucketStats stats;
    stats.count = counts[static_cast<size_t>(b)];
    stats.mean_si_snr = snr_sum[static_cast<size_t>(b)] / stats.count;
    stats.mean_sdr = sdr_sum[static_cast<size_t>(b)] / stats.count;
    report.buckets[static_cast<size_t>(b)] = stats;
  }
  report.utterance_count = static_cast<int>(scores.size());
  report.avg_si_snr = snr_total / report.utterance_count;
  report.avg_sdr = sdr_total / report.utterance_count;
  return report;
}

namespace {

std::string Cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8.2f", v);
  return buf;
}

std::string CellInt(int v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8d", v);
  return buf;
}

}  // namespace

std::string FormatReportTable(const Report& report, const std::string& label) {
  std::ostringstream out;
  char head[128];
  std::snprintf(head, sizeof(head), "%-14s%8s%8s%8s%8s%8s\n", label.c_str(), "0-15",
                "15-45", "45-90", "90-180", "AVG");
  out << head;
  auto row = [&](const char* name, auto get, bool integer) {
    char lead[32];
    std::snprintf(lead, sizeof(lead), "%-14s", name);
    out << lead;
    for (int b = 0; b < kNumAngleBuckets; ++b) {
      const auto& stats = report.buckets[static_cast<size_t>(b)];
      if (!stats.has_value()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%8s", "-");
        out << buf;
      } else if (integer) {
        out << CellInt(static_cast<int>(get(*stats)));
      } else {
        out << Cell(get(*stats));
      }
    }
    return;
  };
  row("Si-SNR (dB)", [](const BucketStats& s) { return s.mean_si_snr; }, false);
  out << Cell(report.avg_si_snr) << "\n";
  row("SDR (dB)", [](const BucketStats& s) { return s.mean_sdr; }, false);
  out << Cell(report.avg_sdr) << "\n";
  row("utterances", [](const BucketStats& s) { return static_cast<double>(s.count); },
      true);
  out << CellInt(report.utterance_count) << "\n";
  return out.str();
}

std::string FormatReportTsv(const Report& report, const std::string& label) {
  std::ostringstream out;
  out << "label\tmetric\t0-15\t15-45\t45-90\t90-180\tAVG\n";
  auto row = [&](const char* metric, auto get, double avg) {
    out << label << "\t" << metric;
    for (int b = 0; b < kNumAngleBuckets; ++b) {
      const auto& stats = report.buckets[static_cast<size_t>(b)];
      out << "\t" << (stats.has_value() ? FormatDouble(get(*stats)) : "-");
    }
    out << "\t" << FormatDouble(avg) << "\n";
  };
  row("si_snr", [](const BucketStats& s) { return s.mean_si_snr; }, report.avg_si_snr);
  row("sdr", [](const BucketStats& s) { return s.mean_sdr; }, report.avg_sdr);
  out << label << "\tcount";
  for (int b = 0; b < kNumAngleBuckets; ++b) {
    const auto& stats = report.buckets[static_cast<size_t>(b)];
    out << "\t" << (stats.has_value() ? std::to_string(stats->count) : "0");
  }
  out << "\t" << report.utterance_count << "\n";
  return out.str();
}

std::string WriteScoreLines(const std::vector<UtteranceScore>& scores) {
  std::ostringstream out;
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += FormatDouble(v[i]);
    }
    return s;
  };
  for (const auto& sc : scores) {
    out << sc.id << " " << kAngleBucketNames[sc.bucket] << " ";
    for (size_t i = 0; i < sc.permutation.size(); ++i) {
      if (i) out << ",";
      out << sc.permutation[i];
    }
    out << " " << join(sc.si_snr_db) << " " << join(sc.sdr_db) << "\n";
  }
  return out.str();
}

std::vector<UtteranceScore> ParseScoreLines(const std::string& text) {
  std::vector<UtteranceScore> scores;
  std::istringstream in(text);
  std::string line;
  auto split_csv = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    UtteranceScore sc;
    std::string bucket, perm, snrs, sdrs;
    if (!(ls >> sc.id >> bucket >> perm >> snrs >> sdrs))
      throw std::runtime_error("scores: malformed line: " + line);
    sc.bucket = -1;
    for (int b = 0; b < kNumAngleBuckets; ++b)
      if (bucket == kAngleBucketNames[b]) sc.bucket = b;
    if (sc.bucket < 0) throw std::runtime_error("scores: unknown bucket: " + bucket);
    for (const auto& p : split_csv(perm)) sc.permutation.push_back(std::stoi(p));
    for (const auto& p : split_csv(snrs)) sc.si_snr_db.push_back(std::stod(p));
    for (const auto& p : split_csv(sdrs)) sc.sdr_db.push_back(std::stod(p));
    scores.push_back(std::move(sc));
  }
  return scores;
}

}  // namespace sepkit
