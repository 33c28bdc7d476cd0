// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sepkit/metrics.h"
#include "sepkit/util.h"

using namespace sepkit;

namespace {

Eigen::VectorXd RandomSignal(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = scale * rng.Normal();
  return x;
}

// Zero-mean reference plus an orthogonal zero-mean noise at a given energy
// ratio; by construction Si-SNR is exactly 10 log10(ratio).
std::pair<Eigen::VectorXd, Eigen::VectorXd> OrthogonalCase(Rng& rng, Eigen::Index n,
                                                           double energy_ratio) {
  Eigen::VectorXd ref = RandomSignal(rng, n);
  ref.array() -= ref.mean();
  Eigen::VectorXd noise = RandomSignal(rng, n);
  noise.array() -= noise.mean();
  noise -= (noise.dot(ref) / ref.squaredNorm()) * ref;  // Gram-Schmidt
  noise *= std::sqrt(ref.squaredNorm() / (energy_ratio * noise.squaredNorm()));
  return {ref + noise, ref};
}

}  // namespace

TEST_CASE("si_snr: perfect estimate hits the +80 dB cap") {
  Rng rng(1);
  const Eigen::VectorXd ref = RandomSignal(rng, 4000);
  CHECK(SiSnr(ref, ref) == 80.0);
}

TEST_CASE("si_snr: orthogonal 10:1 construction gives exactly 10 dB") {
  Rng rng(2);
  const auto [est, ref] = OrthogonalCase(rng, 8000, 10.0);
  CHECK(std::abs(SiSnr(est, ref) - 10.0) < 1e-9);
}

TEST_CASE("si_snr: scale and mean-offset invariance") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [est, ref] = OrthogonalCase(rng, 2000, rng.Uniform(0.5, 20.0));
    const double base = SiSnr(est, ref);
    const double alpha = rng.Uniform(0.01, 100.0);
    CHECK(std::abs(SiSnr(alpha * est, ref) - base) < 1e-9);
    const double offset = rng.Uniform(-5.0, 5.0);
    CHECK(std::abs(SiSnr(est.array() + offset, ref) - base) < 1e-9);
  }
}

TEST_CASE("si_snr: zero-energy reference throws") {
  Rng rng(4);
  const Eigen::VectorXd est = RandomSignal(rng, 100);
  CHECK_THROWS(SiSnr(est, Eigen::VectorXd::Zero(100)));
  CHECK_THROWS(SiSnr(est, Eigen::VectorXd::Constant(100, 3.0)));  // constant = zero after centering
}

TEST_CASE("sdr: perfect estimate caps; delay absorbed by the projection") {
  Rng rng(5);
  const Eigen::VectorXd ref = RandomSignal(rng, 6000);
  const Eigen::VectorXd other = RandomSignal(rng, 6000);
  const std::vector<Eigen::VectorXd> refs = {ref, other};

  CHECK(Sdr(ref, refs, 0, 512) == 80.0);

  for (int delay : {1, 7, 100}) {
    Eigen::VectorXd delayed = Eigen::VectorXd::Zero(6000);
    delayed.tail(6000 - delay) = ref.head(6000 - delay);
    CHECK(Sdr(delayed, refs, 0, 512) >= 60.0);
  }
}

TEST_CASE("sdr: coincides with si_snr at filter_len 1 on zero-mean cases") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [est, ref] = OrthogonalCase(rng, 4000, rng.Uniform(0.5, 30.0));
    const double sdr = Sdr(est, {ref}, 0, 1);
    const double sisnr = SiSnr(est, ref);
    CHECK(std::abs(sdr - sisnr) < 1e-6);
  }
}

TEST_CASE("sdr: white noise strictly decreases the score") {
  Rng rng(7);
  const Eigen::VectorXd ref = RandomSignal(rng, 4000);
  const Eigen::VectorXd noise = RandomSignal(rng, 4000, 0.1);
  const std::vector<Eigen::VectorXd> refs = {ref};
  CHECK(Sdr(ref + noise, refs, 0, 64) < Sdr(ref, refs, 0, 64));
}

TEST_CASE("sdr: rank-deficient reference span is flagged, value stays finite") {
  Rng rng(8);
  const Eigen::VectorXd ref = RandomSignal(rng, 4000);
  const Eigen::VectorXd dup = RandomSignal(rng, 4000);
  const Eigen::VectorXd est = ref + RandomSignal(rng, 4000, 0.01);
  // Two identical interferer references make the interference span singular.
  bool flagged = false;
  const double v = Sdr(est, {ref, dup, dup}, 0, 64, &flagged);
  CHECK(std::isfinite(v));
  CHECK(flagged);
}

TEST_CASE("permute_and_score: swapped estimates select the swap") {
  Rng rng(9);
  const Eigen::VectorXd r0 = RandomSignal(rng, 3000);
  const Eigen::VectorXd r1 = RandomSignal(rng, 3000);
  const UtteranceScore swapped = PermuteAndScore({r1, r0}, {r0, r1}, 16);
  CHECK(swapped.permutation == std::vector<int>{1, 0});
  const UtteranceScore identity = PermuteAndScore({r0, r1}, {r0, r1}, 16);
  CHECK(identity.permutation == std::vector<int>{0, 1});
  CHECK(swapped.MeanSiSnr() == doctest::Approx(identity.MeanSiSnr()));
}

TEST_CASE("permute_and_score: never worse than the identity assignment") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> ests, refs;
    for (int s = 0; s < 3; ++s) {
      refs.push_back(RandomSignal(rng, 1000));
      ests.push_back(RandomSignal(rng, 1000));
    }
    const UtteranceScore sc = PermuteAndScore(ests, refs, 4);
    double identity_mean = 0.0;
    for (int s = 0; s < 3; ++s)
      identity_mean += SiSnr(ests[static_cast<size_t>(s)], refs[static_cast<size_t>(s)]);
    CHECK(sc.MeanSiSnr() >= identity_mean / 3.0 - 1e-12);
  }
}

TEST_CASE("permute_and_score: matches an independent brute force for S=3") {
  Rng rng(11);
  std::vector<Eigen::VectorXd> refs, ests;
  for (int s = 0; s < 3; ++s) refs.push_back(RandomSignal(rng, 1200));
  // Estimates correlated with shuffled references so the search is nontrivial.
  ests.push_back(0.9 * refs[2] + RandomSignal(rng, 1200, 0.2));
  ests.push_back(0.9 * refs[0] + RandomSignal(rng, 1200, 0.2));
  ests.push_back(0.9 * refs[1] + RandomSignal(rng, 1200, 0.2));

  const UtteranceScore sc = PermuteAndScore(ests, refs, 8);

  std::vector<int> perm = {0, 1, 2};
  double best = -1e30;
  std::vector<int> best_perm;
  do {
    double mean = 0.0;
    for (int s = 0; s < 3; ++s)
      mean += SiSnr(ests[static_cast<size_t>(perm[static_cast<size_t>(s)])],
                    refs[static_cast<size_t>(s)]);
    mean /= 3.0;
    if (mean > best) {
      best = mean;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  CHECK(sc.permutation == best_perm);
  CHECK(sc.MeanSiSnr() == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("permute_and_score: relabeling both sides leaves scores unchanged") {
  Rng rng(12);
  std::vector<Eigen::VectorXd> refs, ests;
  for (int s = 0; s < 3; ++s) {
    refs.push_back(RandomSignal(rng, 800));
    ests.push_back(refs.back() + RandomSignal(rng, 800, 0.3));
  }
  const UtteranceScore base = PermuteAndScore(ests, refs, 4);
  const std::vector<int> relabel = {2, 0, 1};
  std::vector<Eigen::VectorXd> ests2(3), refs2(3);
  for (int s = 0; s < 3; ++s) {
    ests2[static_cast<size_t>(s)] = ests[static_cast<size_t>(relabel[static_cast<size_t>(s)])];
    refs2[static_cast<size_t>(s)] = refs[static_cast<size_t>(relabel[static_cast<size_t>(s)])];
  }
  const UtteranceScore moved = PermuteAndScore(ests2, refs2, 4);
  std::vector<double> sorted_base = base.si_snr_db, sorted_moved = moved.si_snr_db;
  std::sort(sorted_base.begin(), sorted_base.end());
  std::sort(sorted_moved.begin(), sorted_moved.end());
  for (size_t i = 0; i < sorted_base.size(); ++i)
    CHECK(sorted_base[i] == doctest::Approx(sorted_moved[i]).epsilon(1e-12));
}

namespace {

UtteranceScore MakeScore(const std::string& id, int bucket, double snr, double sdr) {
  UtteranceScore sc;
  sc.id = id;
  sc.bucket = bucket;
  sc.permutation = {0, 1};
  sc.si_snr_db = {snr, snr};
  sc.sdr_db = {sdr, sdr};
  return sc;
}

}  // namespace

TEST_CASE("aggregate_report: constant scores and weighted average") {
  std::vector<UtteranceScore> scores;
  for (int b = 0; b < 4; ++b) scores.push_back(MakeScore("u" + std::to_string(b), b, 7.5, 8.0));
  const Report all_equal = AggregateReport(scores);
  for (int b = 0; b < 4; ++b) {
    REQUIRE(all_equal.buckets[static_cast<size_t>(b)].has_value());
    CHECK(all_equal.buckets[static_cast<size_t>(b)]->mean_si_snr == doctest::Approx(7.5));
  }
  CHECK(all_equal.avg_si_snr == doctest::Approx(7.5));

  // Counts (1, 3) with means (0, 8): utterance-weighted AVG is 6.
  std::vector<UtteranceScore> two;
  two.push_back(MakeScore("a", 0, 0.0, 0.0));
  for (int i = 0; i < 3; ++i) two.push_back(MakeScore("b" + std::to_string(i), 3, 8.0, 8.0));
  const Report weighted = AggregateReport(two);
  CHECK(weighted.avg_si_snr == doctest::Approx(6.0));
  CHECK_FALSE(weighted.buckets[1].has_value());  // empty bucket absent, not zero
  CHECK_FALSE(weighted.buckets[2].has_value());
}

TEST_CASE("aggregate_report: order independence and score-line roundtrip") {
  Rng rng(13);
  std::vector<UtteranceScore> scores;
  for (int i = 0; i < 25; ++i)
    scores.push_back(MakeScore("u" + std::to_string(i), static_cast<int>(rng.UniformInt(4)),
                               rng.Uniform(-5.0, 15.0), rng.Uniform(-5.0, 15.0)));
  const Report base = AggregateReport(scores);

  std::vector<UtteranceScore> shuffled = scores;
  for (size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.UniformInt(i)]);
  const Report reordered = AggregateReport(shuffled);
  CHECK(base.avg_si_snr == doctest::Approx(reordered.avg_si_snr).epsilon(1e-12));

  const Report reparsed = AggregateReport(ParseScoreLines(WriteScoreLines(scores)));
  CHECK(base.avg_si_snr == reparsed.avg_si_snr);  // FormatDouble round-trips exactly
  CHECK(base.avg_sdr == reparsed.avg_sdr);
  for (int b = 0; b < 4; ++b) {
    CHECK(base.buckets[static_cast<size_t>(b)].has_value() ==
          reparsed.buckets[static_cast<size_t>(b)].has_value());
  }
}

TEST_CASE("aggregate_report: empty list rejected; table renders buckets") {
  CHECK_THROWS(AggregateReport({}));
  const Report report = AggregateReport({MakeScore("x", 1, 7.54, 8.14)});
  const std::string table = FormatReportTable(report, "demo");
  CHECK(table.find("15-45") != std::string::npos);
  CHECK(table.find("7.54") != std::string::npos);
  CHECK(table.find("-") != std::string::npos);  // empty buckets
  CHECK(AngleBucketFromDelta(0.0) == 0);
  CHECK(AngleBucketFromDelta(15.0) == 1);
  CHECK(AngleBucketFromDelta(44.9) == 1);
  CHECK(AngleBucketFromDelta(45.0) == 2);
  CHECK(AngleBucketFromDelta(90.0) == 3);
  CHECK(AngleBucketFromDelta(180.0) == 3);
}
