// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>

#include "doctest.h"
#include "sepkit/pipeline.h"
#include "sepkit/util.h"
#include "sepkit/wav.h"

using namespace sepkit;

namespace {

std::string FreshDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sepkit_pipe" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

ExperimentConfig SmallConfig(const std::string& workdir, uint64_t seed) {
  ExperimentConfig cfg;
  cfg.workdir = workdir;
  cfg.seed = seed;
  cfg.count = 4;
  cfg.source_count = 2;
  cfg.duration_s = 0.5;
  cfg.hop_ms = 16.0;
  cfg.ranges.t60_min = 0.1;
  cfg.ranges.t60_max = 0.25;
  cfg.sdr_filter_len = 32;  // keep scoring quick
  cfg.hidden = {16};
  cfg.steps = 5;
  cfg.batch_size = 2;
  cfg.learning_rate = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("datagen: deterministic manifest, readable audio, jobs-invariant") {
  const std::string dir_a = FreshDir("datagen_a");
  ExperimentConfig cfg = SmallConfig(dir_a, 1001);
  const DatagenResult first = RunDatagen(cfg);
  REQUIRE(first.records.size() == 4);

  const std::string manifest_a = ReadTextFile(JoinPath(dir_a, first.manifest_path));
  const auto parsed = ParseManifest(manifest_a);
  REQUIRE(parsed.size() == 4);
  CHECK(WriteManifest(parsed) == manifest_a);  // serialization round-trips

  for (const auto& rec : parsed) {
    const MultichannelWaveform mix = ReadWav(JoinPath(dir_a, rec.mix_path));
    CHECK(mix.sample_rate == cfg.sample_rate);
    CHECK(mix.channel_count() == 6);
    for (const auto& ref_path : rec.ref_paths) {
      const MultichannelWaveform ref = ReadWav(JoinPath(dir_a, ref_path));
      CHECK(ref.length() == mix.length());
      CHECK(ref.channel_count() == 6);
    }
    CHECK(rec.scene.bucket >= 0);
    CHECK(rec.id == UtteranceId(cfg.seed, rec.index));
  }

  // Re-run in place: byte-identical manifest.
  const DatagenResult second = RunDatagen(cfg);
  CHECK(ReadTextFile(JoinPath(dir_a, second.manifest_path)) == manifest_a);

  // Same seed with 2 worker threads: identical output.
  const std::string dir_b = FreshDir("datagen_b");
  ExperimentConfig cfg_jobs = SmallConfig(dir_b, 1001);
  cfg_jobs.jobs = 2;
  RunDatagen(cfg_jobs);
  CHECK(ReadTextFile(JoinPath(dir_b, "manifest.txt")) == manifest_a);
}

TEST_CASE("oracle-eval: reports for every kind; scores recomputable; empty manifest fails") {
  const std::string dir = FreshDir("oracle");
  ExperimentConfig cfg = SmallConfig(dir, 1002);
  RunDatagen(cfg);

  const OracleEvalResult result = RunOracleEval(cfg, "manifest.txt");
  REQUIRE(result.reports.size() == 4);  // ibm, iam, irm, ipsm
  for (const auto& [kind, report] : result.reports) {
    CHECK(report.utterance_count == 4);
    CHECK(std::isfinite(report.avg_si_snr));
    CHECK(report.avg_si_snr > 0.0);  // oracle masks must separate
  }
  CHECK(FileExists(JoinPath(dir, result.report_path)));

  // A report recomputed from the score lines matches the aggregate.
  for (size_t ki = 0; ki < result.score_paths.size(); ++ki) {
    const Report again = RunReport(JoinPath(dir, result.score_paths[ki]));
    CHECK(again.avg_si_snr == result.reports[ki].second.avg_si_snr);
    CHECK(again.avg_sdr == result.reports[ki].second.avg_sdr);
  }

  AtomicWriteFile(JoinPath(dir, "empty.txt"), std::string());
  CHECK_THROWS(RunOracleEval(cfg, "empty.txt"));
  CHECK_THROWS(RunOracleEval(cfg, "missing.txt"));
}

TEST_CASE("train/eval: end to end with checkpoint, width mismatch rejected") {
  const std::string dir = FreshDir("traineval");
  ExperimentConfig cfg = SmallConfig(dir, 1003);
  cfg.feature_mode = "mag";
  RunDatagen(cfg);

  const TrainRunResult trained = RunTrain(cfg, "manifest.txt");
  CHECK(FileExists(JoinPath(dir, trained.checkpoint_path)));
  CHECK(FileExists(JoinPath(dir, trained.curve_path)));
  CHECK(std::isfinite(trained.final_loss));

  const EvalRunResult eval = RunEval(cfg, "manifest.txt", trained.checkpoint_path);
  CHECK(eval.report.utterance_count == 4);
  CHECK(eval.mixture_report.utterance_count == 4);
  CHECK(FileExists(JoinPath(dir, eval.scores_path)));
  const Report again = RunReport(JoinPath(dir, eval.scores_path));
  CHECK(again.avg_si_snr == eval.report.avg_si_snr);

  // Evaluating the magnitude-only checkpoint in the angle mode names both widths.
  ExperimentConfig wrong = cfg;
  wrong.feature_mode = "mag_ipd_angle";
  try {
    RunEval(wrong, "manifest.txt", trained.checkpoint_path);
    FAIL("expected width mismatch");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("257") != std::string::npos);   // checkpoint width (F)
    CHECK(msg.find("3855") != std::string::npos);  // requested width (15 F)
  }
}

TEST_CASE("pipeline: datagen -> train -> eval reproduces bit-identically") {
  const std::string dir_a = FreshDir("repro_a");
  const std::string dir_b = FreshDir("repro_b");
  for (const auto& dir : {dir_a, dir_b}) {
    ExperimentConfig cfg = SmallConfig(dir, 1004);
    RunDatagen(cfg);
    RunTrain(cfg, "manifest.txt");
    RunEval(cfg, "manifest.txt", "model_" + cfg.feature_mode + ".ckpt");
  }
  for (const char* name :
       {"manifest.txt", "curve_mag_ipd_angle.txt", "eval_scores.txt",
        "eval_mixture_scores.txt", "eval_report.txt"}) {
    CHECK(ReadTextFile(JoinPath(dir_a, name)) == ReadTextFile(JoinPath(dir_b, name)));
  }
}
