// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_PIPELINE_H_
#define SEPKIT_PIPELINE_H_

#include <string>
#include <utility>
#include <vector>

#include "sepkit/config.h"
#include "sepkit/manifest.h"
#include "sepkit/metrics.h"

namespace sepkit {

// Command implementations shared by the CLI and the test suites. All paths
// in results are workdir-relative unless absolute.

struct DatagenResult {
  std::string manifest_path;
  std::vector<UtteranceRecord> records;
};

// Samples cfg.count scenes, spatializes synthetic dry sources, writes the
// mixture and per-source reference WAVs plus the manifest.
DatagenResult RunDatagen(const ExperimentConfig& cfg);

struct OracleEvalResult {
  std::vector<std::pair<MaskKind, Report>> reports;
  std::vector<std::string> score_paths;  // one per mask kind
  std::string report_path;
};

// Separates every manifest utterance with each requested oracle mask,
// scores against the channel-0 reference images and aggregates per bucket.
OracleEvalResult RunOracleEval(const ExperimentConfig& cfg,
                               const std::string& manifest_path);

struct TrainRunResult {
  std::string checkpoint_path;
  std::string curve_path;
  double final_loss = 0.0;
};

TrainRunResult RunTrain(const ExperimentConfig& cfg, const std::string& manifest_path);

struct EvalRunResult {
  Report report;          // separated estimates
  Report mixture_report;  // unprocessed mixture baseline
  std::string scores_path;
  std::string mixture_scores_path;
  std::string report_path;
};

EvalRunResult RunEval(const ExperimentConfig& cfg, const std::string& manifest_path,
                      const std::string& checkpoint_path);

// Recomputes a report from a per-utterance score file.
Report RunReport(const std::string& scores_path);

}  // namespace sepkit

#endif  // SEPKIT_PIPELINE_H_
