// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command line front end: datagen | oracle-eval | train | eval | report.
// Every option can also come from a key=value config file (--config);
// command-line flags win over file values.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sepkit/pipeline.h"
#include "sepkit/util.h"

namespace {

void RegisterConfigOptions(CLI::App& app, sepkit::ExperimentConfig& cfg) {
  app.add_option("--workdir", cfg.workdir, "Run directory; outputs and relative paths live here");
  app.add_option("--jobs", cfg.jobs, "Utterance-level worker threads");
  app.add_option("--seed", cfg.seed, "Master seed");

  app.add_option("--sample-rate", cfg.sample_rate, "Sample rate in Hz");
  app.add_option("--win-ms", cfg.win_ms, "Analysis window in ms");
  app.add_option("--hop-ms", cfg.hop_ms, "Analysis hop in ms");

  app.add_option("--count", cfg.count, "Number of scenes to generate");
  app.add_option("--sources", cfg.source_count, "Sources per scene");
  app.add_option("--duration", cfg.duration_s, "Dry source duration in seconds");
  app.add_option("--band-lo", cfg.band_lo_hz, "Dry source band low edge, Hz");
  app.add_option("--band-hi", cfg.band_hi_hz, "Dry source band high edge, Hz");
  app.add_option("--source-kind", cfg.source_kind,
                 "random | shared | noise | chirp | tones");
  app.add_option("--t60-min", cfg.ranges.t60_min, "Reverberation time lower bound, s");
  app.add_option("--t60-max", cfg.ranges.t60_max, "Reverberation time upper bound, s");
  app.add_option("--room-length-min", cfg.ranges.room_length_min, "Room length min, m");
  app.add_option("--room-length-max", cfg.ranges.room_length_max, "Room length max, m");
  app.add_option("--room-width-min", cfg.ranges.room_width_min, "Room width min, m");
  app.add_option("--room-width-max", cfg.ranges.room_width_max, "Room width max, m");
  app.add_option("--room-height-min", cfg.ranges.room_height_min, "Room height min, m");
  app.add_option("--room-height-max", cfg.ranges.room_height_max, "Room height max, m");
  app.add_option("--absorption", cfg.absorption, "T60 inversion: eyring or sabine");
  app.add_flag("--sinc-interp", cfg.sinc_interp, "Windowed-sinc fractional delays");

  app.add_option("--mask-kinds", cfg.mask_kinds, "Comma list: ibm,iam,irm,ipsm");
  app.add_option("--mask-ceiling", cfg.mask_ceiling, "IAM/IPSM clip ceiling");
  app.add_flag("--irm-power", cfg.irm_power, "IRM as sqrt of the power ratio");
  app.add_flag("--write-audio", cfg.write_audio, "Write separated WAVs");

  app.add_option("--filter-len", cfg.sdr_filter_len, "SDR projection filter taps");

  app.add_option("--feature-mode", cfg.feature_mode, "mag | mag_ipd | mag_ipd_angle");
  app.add_option("--loss", cfg.loss, "upit_sisnr | upit_mse | tgt_sisnr");
  app.add_option("--hidden", cfg.hidden, "Hidden layer widths");
  app.add_option("--lr", cfg.learning_rate, "Learning rate");
  app.add_option("--steps", cfg.steps, "Training steps");
  app.add_option("--batch", cfg.batch_size, "Batch size in utterances");
  app.add_option("--clip", cfg.clip_norm, "Global gradient-norm clip");
}

}  // namespace

int main(int argc, char** argv) {
  sepkit::ExperimentConfig cfg;
  std::string manifest = "manifest.txt";
  std::string checkpoint;
  std::string scores;

  CLI::App app{"sepkit: multi-channel speech separation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value config file; flags override it");
  RegisterConfigOptions(app, cfg);

  CLI::App* cmd_datagen =
      app.add_subcommand("datagen", "Sample scenes and write mixtures, references, manifest");
  CLI::App* cmd_oracle =
      app.add_subcommand("oracle-eval", "Separate with oracle masks and report per bucket");
  cmd_oracle->add_option("--manifest", manifest, "Manifest to evaluate");
  CLI::App* cmd_train = app.add_subcommand("train", "Train the mask estimator");
  cmd_train->add_option("--manifest", manifest, "Manifest to train on");
  CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  cmd_eval->add_option("--manifest", manifest, "Manifest to evaluate");
  cmd_eval->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  CLI::App* cmd_report = app.add_subcommand("report", "Recompute a report from score lines");
  cmd_report->add_option("--scores", scores, "Per-utterance score file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_datagen->parsed()) {
      const auto result = sepkit::RunDatagen(cfg);
      std::cout << "wrote " << result.records.size() << " utterances, manifest at "
                << sepkit::JoinPath(cfg.workdir, result.manifest_path) << "\n";
    } else if (cmd_oracle->parsed()) {
      const auto result = sepkit::RunOracleEval(cfg, manifest);
      for (const auto& [kind, report] : result.reports)
        std::cout << sepkit::FormatReportTable(
                         report, std::string("oracle ") + sepkit::MaskKindName(kind))
                  << "\n";
      std::cout << "report at " << sepkit::JoinPath(cfg.workdir, result.report_path)
                << "\n";
    } else if (cmd_train->parsed()) {
      const auto result = sepkit::RunTrain(cfg, manifest);
      std::cout << "final loss " << result.final_loss << ", checkpoint at "
                << sepkit::JoinPath(cfg.workdir, result.checkpoint_path) << "\n";
    } else if (cmd_eval->parsed()) {
      const auto result = sepkit::RunEval(cfg, manifest, checkpoint);
      std::cout << sepkit::FormatReportTable(result.report, "separated") << "\n"
                << sepkit::FormatReportTable(result.mixture_report, "mixture") << "\n";
      std::cout << "scores at " << sepkit::JoinPath(cfg.workdir, result.scores_path)
                << "\n";
    } else if (cmd_report->parsed()) {
      const auto report = sepkit::RunReport(scores);
      std::cout << sepkit::FormatReportTable(report, "recomputed");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
