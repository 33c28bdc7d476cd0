// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/pipeline.h"

#include <cmath>
#include <stdexcept>

#include "sepkit/sources.h"
#include "sepkit/trainer.h"
#include "sepkit/util.h"
#include "sepkit/wav.h"

namespace sepkit {

namespace {

std::string Resolve(const ExperimentConfig& cfg, const std::string& path) {
  if (!path.empty() && path.front() == '/') return path;
  return JoinPath(cfg.workdir, path);
}

MultichannelWaveform ReadWavChecked(const ExperimentConfig& cfg,
                                    const std::string& rel_path) {
  MultichannelWaveform wave = ReadWav(Resolve(cfg, rel_path));
  if (wave.sample_rate != cfg.sample_rate)
    throw std::runtime_error("wav " + rel_path + ": sample rate " +
                             FormatDouble(wave.sample_rate) + " does not match config " +
                             FormatDouble(cfg.sample_rate));
  return wave;
}

// Everything an utterance contributes to masks, features and scoring.
struct UtteranceBundle {
  ComplexSpectrogram mix_spec0;
  Eigen::MatrixXd mix_mag;
  Eigen::MatrixXd mix_phase;
  Eigen::VectorXd mix0_trunc;                 // channel 0, ISTFT length
  std::vector<Eigen::VectorXd> refs0;         // per source, channel 0, ISTFT length
  std::vector<ComplexSpectrogram> mix_specs;  // all channels; only in IPD modes
  std::vector<ComplexSpectrogram> ref_specs0; // per source, channel 0
};

UtteranceBundle LoadBundle(const ExperimentConfig& cfg, const UtteranceRecord& rec,
                           const StftKernel& kernel, bool want_all_channels,
                           bool want_ref_specs) {
  UtteranceBundle bundle;
  const MultichannelWaveform mix = ReadWavChecked(cfg, rec.mix_path);
  bundle.mix_spec0 = Stft(mix.channels[0], kernel);
  auto [mag, phase] = Decompose(bundle.mix_spec0);
  bundle.mix_mag = std::move(mag);
  bundle.mix_phase = std::move(phase);
  const Eigen::Index out_len =
      (bundle.mix_spec0.frames() - 1) * kernel.config.hop + kernel.config.win_len;
  bundle.mix0_trunc = mix.channels[0].head(out_len);

  if (want_all_channels) {
    bundle.mix_specs.reserve(static_cast<size_t>(mix.channel_count()));
    for (const auto& chan : mix.channels) bundle.mix_specs.push_back(Stft(chan, kernel));
  }
  for (const auto& ref_path : rec.ref_paths) {
    const MultichannelWaveform ref = ReadWavChecked(cfg, ref_path);
    if (ref.length() != mix.length())
      throw std::runtime_error("reference length mismatch for " + rec.id);
    bundle.refs0.push_back(ref.channels[0].head(out_len));
    if (want_ref_specs) bundle.ref_specs0.push_back(Stft(ref.channels[0], kernel));
  }
  return bundle;
}

Eigen::MatrixXd BuildConditionedFeatures(const UtteranceBundle& bundle,
                                         const UtteranceRecord& rec, FeatureMode mode,
                                         const std::vector<MicPair>& pairs,
                                         const AnalysisConfig& acfg) {
  if (mode == FeatureMode::kMagnitude)
    return ConditionFeatures(bundle.mix_mag, mode, acfg.bins(),
                             static_cast<int>(pairs.size()));

  const IpdFeatures ipd = ComputeIpd(bundle.mix_specs, pairs);
  if (mode == FeatureMode::kMagIpd) {
    const Eigen::MatrixXd raw = AssembleFeatures(bundle.mix_mag, &ipd, nullptr, mode);
    return ConditionFeatures(raw, mode, acfg.bins(), static_cast<int>(pairs.size()));
  }

  std::vector<SteeringSet> steering;  // target (source 0) first
  steering.reserve(rec.scene.azimuths.size());
  for (double az : rec.scene.azimuths)
    steering.push_back(SteeringVectors(rec.scene.array, az, pairs, acfg));
  const std::vector<Eigen::MatrixXd> angle =
      ComputeAngleFeatures(bundle.mix_specs, steering, pairs);
  const Eigen::MatrixXd raw = AssembleFeatures(bundle.mix_mag, &ipd, &angle, mode);
  return ConditionFeatures(raw, mode, acfg.bins(), static_cast<int>(pairs.size()));
}

std::vector<UtteranceRecord> LoadManifest(const ExperimentConfig& cfg,
                                          const std::string& manifest_path,
                                          const char* who) {
  const std::string path = Resolve(cfg, manifest_path);
  if (!FileExists(path))
    throw std::runtime_error(std::string(who) + ": manifest not found: " + path);
  auto records = ParseManifest(ReadTextFile(path));
  if (records.empty())
    throw std::runtime_error(std::string(who) + ": empty manifest: " + path);
  return records;
}

int SourceCountOf(const std::vector<UtteranceRecord>& records) {
  const auto s_count = records[0].ref_paths.size();
  for (const auto& r : records)
    if (r.ref_paths.size() != s_count)
      throw std::runtime_error("manifest: inconsistent source counts");
  return static_cast<int>(s_count);
}

}  // namespace

DatagenResult RunDatagen(const ExperimentConfig& cfg) {
  cfg.Validate();
  EnsureDirectory(cfg.workdir);
  EnsureDirectory(JoinPath(cfg.workdir, "wav"));

  const auto dry_len =
      static_cast<Eigen::Index>(std::lround(cfg.duration_s * cfg.sample_rate));
  SpatializeOptions sopts;
  sopts.sample_rate = cfg.sample_rate;
  sopts.absorption_model = cfg.GetAbsorptionModel();
  sopts.sinc_interp = cfg.sinc_interp;

  std::vector<UtteranceRecord> records(static_cast<size_t>(cfg.count));
  ParallelFor(cfg.jobs, records.size(), [&](size_t i) {
    const uint64_t scene_seed =
        Fnv1a64(std::to_string(cfg.seed) + ":" + std::to_string(i));
    UtteranceRecord rec;
    rec.id = ToHex(scene_seed);
    rec.index = static_cast<int>(i);
    rec.scene = SampleScene(scene_seed, cfg.source_count, cfg.ranges);

    Rng dry_rng(Fnv1a64(rec.id + ":dry"));
    std::vector<MultichannelWaveform> dries;
    const int shared_kind = static_cast<int>(dry_rng.UniformInt(3));
    for (int s = 0; s < cfg.source_count; ++s) {
      Eigen::VectorXd dry;
      if (cfg.source_kind == "random") {
        dry = RandomDrySource(dry_rng, dry_len, cfg.sample_rate, cfg.band_lo_hz,
                              cfg.band_hi_hz);
      } else {
        SourceKind kind;
        if (cfg.source_kind == "shared") {
          kind = static_cast<SourceKind>(shared_kind);
        } else if (cfg.source_kind == "noise") {
          kind = SourceKind::kNoiseBurst;
        } else if (cfg.source_kind == "chirp") {
          kind = SourceKind::kChirp;
        } else if (cfg.source_kind == "tones") {
          kind = SourceKind::kToneComplex;
        } else {
          throw std::invalid_argument("datagen: unknown source kind " + cfg.source_kind);
        }
        dry = SynthDrySource(dry_rng, kind, dry_len, cfg.sample_rate, cfg.band_lo_hz,
                             cfg.band_hi_hz);
      }
      dries.push_back(MonoWaveform(cfg.sample_rate, std::move(dry)));
    }

    const SpatializeResult spat = Spatialize(dries, rec.scene, sopts);
    rec.mix_path = "wav/" + rec.id + "_mix.wav";
    WriteWav(Resolve(cfg, rec.mix_path), spat.mixture);
    for (int s = 0; s < cfg.source_count; ++s) {
      rec.ref_paths.push_back("wav/" + rec.id + "_ref" + std::to_string(s) + ".wav");
      WriteWav(Resolve(cfg, rec.ref_paths.back()),
               spat.references[static_cast<size_t>(s)]);
    }
    records[i] = std::move(rec);
  });

  DatagenResult result;
  result.manifest_path = "manifest.txt";
  result.records = std::move(records);
  AtomicWriteFile(Resolve(cfg, result.manifest_path), WriteManifest(result.records));
  return result;
}

OracleEvalResult RunOracleEval(const ExperimentConfig& cfg,
                               const std::string& manifest_path) {
  cfg.Validate();
  const auto records = LoadManifest(cfg, manifest_path, "oracle-eval");
  const auto kinds = cfg.GetMaskKinds();
  const StftKernel kernel = MakeStftKernel(cfg.MakeAnalysisConfig());
  MaskOptions mopts;
  mopts.ceiling = cfg.mask_ceiling;
  mopts.irm_power = cfg.irm_power;

  std::vector<std::vector<UtteranceScore>> scores(
      kinds.size(), std::vector<UtteranceScore>(records.size()));
  ParallelFor(cfg.jobs, records.size(), [&](size_t i) {
    const auto& rec = records[i];
    const UtteranceBundle bundle =
        LoadBundle(cfg, rec, kernel, /*want_all_channels=*/false,
                   /*want_ref_specs=*/true);
    for (size_t ki = 0; ki < kinds.size(); ++ki) {
      const MaskSet mask_set =
          ComputeOracleMask(kinds[ki], bundle.ref_specs0, bundle.mix_spec0, mopts);
      std::vector<Eigen::VectorXd> ests;
      for (const auto& mask : mask_set.masks)
        ests.push_back(
            Reconstruct(ApplyMask(mask, bundle.mix_mag), bundle.mix_phase, kernel));
      UtteranceScore sc = PermuteAndScore(ests, bundle.refs0, cfg.sdr_filter_len);
      sc.id = rec.id;
      sc.bucket = rec.scene.bucket >= 0 ? rec.scene.bucket : 0;
      if (cfg.write_audio) {
        for (size_t s = 0; s < ests.size(); ++s)
          WriteWav(Resolve(cfg, "wav/" + rec.id + "_" +
                                    MaskKindName(kinds[ki]) + "_est" +
                                    std::to_string(s) + ".wav"),
                   MonoWaveform(cfg.sample_rate, ests[s]));
      }
      scores[ki][i] = std::move(sc);
    }
  });

  OracleEvalResult result;
  std::string tables, tsv;
  for (size_t ki = 0; ki < kinds.size(); ++ki) {
    const std::string name = MaskKindName(kinds[ki]);
    result.reports.emplace_back(kinds[ki], AggregateReport(scores[ki]));
    const std::string score_path = "oracle_" + name + "_scores.txt";
    AtomicWriteFile(Resolve(cfg, score_path), WriteScoreLines(scores[ki]));
    result.score_paths.push_back(score_path);
    tables += FormatReportTable(result.reports.back().second, "oracle " + name) + "\n";
    tsv += FormatReportTsv(result.reports.back().second, "oracle_" + name);
  }
  result.report_path = "oracle_report.txt";
  AtomicWriteFile(Resolve(cfg, result.report_path), tables);
  AtomicWriteFile(Resolve(cfg, "oracle_report.tsv"), tsv);
  return result;
}

TrainRunResult RunTrain(const ExperimentConfig& cfg, const std::string& manifest_path) {
  cfg.Validate();
  const auto records = LoadManifest(cfg, manifest_path, "train");
  const int s_count = SourceCountOf(records);
  const AnalysisConfig acfg = cfg.MakeAnalysisConfig();
  const StftKernel kernel = MakeStftKernel(acfg);
  const FeatureMode mode = cfg.GetFeatureMode();
  const LossKind loss = cfg.GetLossKind();
  const auto pairs = DefaultPairList();

  std::vector<TrainItem> items(records.size());
  ParallelFor(cfg.jobs, records.size(), [&](size_t i) {
    const UtteranceBundle bundle =
        LoadBundle(cfg, records[i], kernel, mode != FeatureMode::kMagnitude,
                   /*want_ref_specs=*/loss == LossKind::kUpitMse);
    TrainItem item;
    item.features = BuildConditionedFeatures(bundle, records[i], mode, pairs, acfg);
    item.mix_mag = bundle.mix_mag;
    item.mix_phase = bundle.mix_phase;
    item.refs = bundle.refs0;
    if (loss == LossKind::kUpitMse)
      for (const auto& spec : bundle.ref_specs0)
        item.ref_mags.push_back(Decompose(spec).first);
    items[i] = std::move(item);
  });

  MaskEstimator estimator =
      MaskEstimator::Create(mode, s_count, acfg.bins(),
                            static_cast<int>(pairs.size()), cfg.hidden, cfg.seed);
  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.steps = cfg.steps;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.seed;
  tc.clip_norm = cfg.clip_norm;
  const auto stats = Train(items, &estimator, loss, tc, kernel);

  TrainRunResult result;
  result.checkpoint_path = "model_" + cfg.feature_mode + ".ckpt";
  result.curve_path = "curve_" + cfg.feature_mode + ".txt";
  estimator.Save(Resolve(cfg, result.checkpoint_path));
  AtomicWriteFile(Resolve(cfg, result.curve_path), FormatLossCurve(stats));
  result.final_loss = stats.back().loss;
  return result;
}

EvalRunResult RunEval(const ExperimentConfig& cfg, const std::string& manifest_path,
                      const std::string& checkpoint_path) {
  cfg.Validate();
  const auto records = LoadManifest(cfg, manifest_path, "eval");
  const int s_count = SourceCountOf(records);
  const AnalysisConfig acfg = cfg.MakeAnalysisConfig();
  const StftKernel kernel = MakeStftKernel(acfg);
  const FeatureMode mode = cfg.GetFeatureMode();
  const auto pairs = DefaultPairList();

  const MaskEstimator estimator = MaskEstimator::Load(Resolve(cfg, checkpoint_path));
  const int expected_width =
      acfg.bins() * FeaturePlaneCount(mode, static_cast<int>(pairs.size()), s_count);
  if (estimator.input_width() != expected_width)
    throw std::runtime_error(
        "eval: checkpoint input width " + std::to_string(estimator.input_width()) +
        " (mode " + FeatureModeName(estimator.mode()) + ") does not match feature width " +
        std::to_string(expected_width) + " (mode " + cfg.feature_mode + ")");
  if (estimator.source_count() != s_count)
    throw std::runtime_error("eval: checkpoint source count mismatch");

  std::vector<UtteranceScore> est_scores(records.size());
  std::vector<UtteranceScore> mix_scores(records.size());
  ParallelFor(cfg.jobs, records.size(), [&](size_t i) {
    const auto& rec = records[i];
    const UtteranceBundle bundle =
        LoadBundle(cfg, rec, kernel, mode != FeatureMode::kMagnitude,
                   /*want_ref_specs=*/false);
    const Eigen::MatrixXd features =
        BuildConditionedFeatures(bundle, rec, mode, pairs, acfg);
    const auto masks = estimator.Forward(features);
    std::vector<Eigen::VectorXd> ests;
    for (const auto& mask : masks)
      ests.push_back(
          Reconstruct(ApplyMask(mask, bundle.mix_mag), bundle.mix_phase, kernel));
    UtteranceScore sc = PermuteAndScore(ests, bundle.refs0, cfg.sdr_filter_len);
    sc.id = rec.id;
    sc.bucket = rec.scene.bucket >= 0 ? rec.scene.bucket : 0;
    est_scores[i] = std::move(sc);

    const std::vector<Eigen::VectorXd> mixture_ests(static_cast<size_t>(s_count),
                                                    bundle.mix0_trunc);
    UtteranceScore mc = PermuteAndScore(mixture_ests, bundle.refs0, cfg.sdr_filter_len);
    mc.id = rec.id;
    mc.bucket = sc.bucket;
    mix_scores[i] = std::move(mc);
  });

  EvalRunResult result;
  result.report = AggregateReport(est_scores);
  result.mixture_report = AggregateReport(mix_scores);
  result.scores_path = "eval_scores.txt";
  result.mixture_scores_path = "eval_mixture_scores.txt";
  result.report_path = "eval_report.txt";
  AtomicWriteFile(Resolve(cfg, result.scores_path), WriteScoreLines(est_scores));
  AtomicWriteFile(Resolve(cfg, result.mixture_scores_path), WriteScoreLines(mix_scores));
  AtomicWriteFile(Resolve(cfg, result.report_path),
                  FormatReportTable(result.report, "separated") + "\n" +
                      FormatReportTable(result.mixture_report, "mixture"));
  AtomicWriteFile(Resolve(cfg, "eval_report.tsv"),
                  FormatReportTsv(result.report, "separated") +
                      FormatReportTsv(result.mixture_report, "mixture"));
  return result;
}

Report RunReport(const std::string& scores_path) {
  return AggregateReport(ParseScoreLines(ReadTextFile(scores_path)));
}

}  // namespace sepkit
