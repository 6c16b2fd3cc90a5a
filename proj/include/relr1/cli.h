// Copyright 2026 The relr1 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELR1_CLI_H_
#define RELR1_CLI_H_

// Batch entry points: corpus evaluation, reward scoring, simulator
// training, format linting and prompt rendering, plus the record and
// configuration formats they share.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relr1/geom.h"
#include "relr1/grpo.h"
#include "relr1/metrics.h"
#include "relr1/relgram.h"
#include "relr1/reward.h"
#include "relr1/sim.h"

namespace relr1::cli {

inline constexpr std::string_view kToolVersion = "relr1 0.1.0";

// Exit codes, stable across subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

// ---------------------------------------------------------------------------
// Configuration

// One document with sections {reward, grpo, sim}. The sim section's own
// grpo/reward settings are taken from the sibling sections.
struct Config {
  reward::RewardConfig reward;
  grpo::GrpoConfig grpo;
  sim::TrainConfig sim;
};

// RELR1_* variables only, name -> value.
using Environment = std::map<std::string, std::string>;

Environment ProcessEnvironment();

// Layers, lowest first: defaults, the JSON file at path (if non-empty),
// then RELR1_<SECTION>_<KEY> variables. Unknown sections or keys and
// ill-typed values throw Error(kInvalidArgument).
Config LoadConfig(const std::string& path, const Environment& env);

// Applies one JSON document (same schema as the file) on top of cfg.
void ApplyConfigText(std::string_view json_text, Config& cfg);

std::string ConfigToJson(const Config& cfg);

// Accepts "0.5", "1/2" or any decimal; throws Error(kInvalidArgument).
geom::Ratio ParseThreshold(std::string_view text);

// ---------------------------------------------------------------------------
// Records (JSON Lines)

struct PredictionRecord {
  std::string image_id;
  std::string output_text;
};

// Binary: {"image_id", "task": "binary", "triplets": <list text or array>}
//     or  {"image_id", "task": "binary", "caption": <tagged caption>}.
// N-ary:  {"image_id", "task": "nary", "verb", "frame": <frame text>,
//          "verb_forms": [optional surface forms]}
//     or  {"image_id", "task": "nary", "frame": {"verb", "roles":
//          [{"role", "entity", "box"}]}}; a missing or null box is the
//          sentinel.
struct GroundTruthRecord {
  std::string image_id;
  reward::GroundTruth truth;
  std::vector<std::string> verb_forms;

  relgram::TaskKind task() const { return reward::TaskOf(truth); }
};

// Throw Error(kBadRecord) with the line number on malformed records,
// duplicate image ids or ground truth that does not parse cleanly.
std::vector<PredictionRecord> ReadPredictions(std::istream& in,
                                              std::string_view source);
std::vector<GroundTruthRecord> ReadGroundTruth(std::istream& in,
                                               std::string_view source);

GroundTruthRecord ParseGroundTruthRecord(std::string_view json_line);

// {"prompt_id", "responses": [{"text", "reward", "logp_new": [...],
//   "logp_old": [...], "logp_ref": [...]}]}, one group per line.
grpo::RolloutGroup ParseRolloutGroup(std::string_view json_line);
std::vector<grpo::RolloutGroup> ReadRolloutGroups(std::istream& in,
                                                  std::string_view source);

// Objective, surrogate, kl, advantages and ratios as one JSON line.
std::string GrpoStatsJson(std::string_view prompt_id, const grpo::GrpoStats& stats);

// Every ground-truth verb with its derived inflections and listed forms.
relgram::VerbLexicon CorpusLexicon(std::span<const GroundTruthRecord> gt);

// ---------------------------------------------------------------------------
// Corpus evaluation

struct EvalCounts {
  int records = 0;              // ground-truth records of the evaluated task
  int malformed_envelopes = 0;
  int parse_failures = 0;       // predictions with any answer diagnostic
  int task_mismatches = 0;      // answers routed to the other task
  int missing_predictions = 0;  // scored as empty predictions
  int skipped_empty_gt = 0;     // binary records without triplets
};

struct SggOptions {
  geom::Ratio iou_threshold = metrics::kDefaultIouThreshold;
  reward::BinaryFormat format = reward::BinaryFormat::kCaption;
  bool pooled_mrecall = false;
};

struct GsrOptions {
  geom::Ratio iou_threshold = metrics::kDefaultIouThreshold;
  bool verb_constraint = true;
};

struct SggEvaluation {
  metrics::SggReport report;
  EvalCounts counts;
  std::vector<metrics::BinarySampleScore> samples;
};

struct GsrEvaluation {
  metrics::GsrReport report;
  EvalCounts counts;
  std::vector<metrics::GsrSampleScore> samples;
};

// Samples follow ground-truth order; records of the other task are
// ignored. Throws Error(kMissingGroundTruth) for a prediction without
// ground truth and Error(kNoSamples) when nothing is scored.
SggEvaluation EvaluateSgg(std::span<const PredictionRecord> pred,
                          std::span<const GroundTruthRecord> gt,
                          const SggOptions& options);
GsrEvaluation EvaluateGsr(std::span<const PredictionRecord> pred,
                          std::span<const GroundTruthRecord> gt,
                          const GsrOptions& options);

std::string SggTable(const SggEvaluation& eval);
std::string GsrTable(const GsrEvaluation& eval);
std::string SggReportJson(const SggEvaluation& eval, const SggOptions& options);
std::string GsrReportJson(const GsrEvaluation& eval, const GsrOptions& options);

// ---------------------------------------------------------------------------
// Reward scoring

struct ScoredRecord {
  std::string image_id;
  relgram::TaskKind gt_task = relgram::TaskKind::kBinary;
  reward::RewardBreakdown breakdown;
};

struct RewardSummary {
  int count = 0;
  double mean_total = 0;
  double mean_format = 0;
  double mean_task = 0;
};

struct RewardRun {
  std::vector<ScoredRecord> records;  // prediction order
  std::map<relgram::TaskKind, RewardSummary> by_gt_task;
  std::map<relgram::TaskKind, RewardSummary> by_routed_task;
};

RewardRun ScoreRewards(std::span<const PredictionRecord> pred,
                       std::span<const GroundTruthRecord> gt,
                       const reward::RewardConfig& cfg);

std::string RewardRecordJson(const ScoredRecord& record);
std::string RewardSummaryJson(const RewardRun& run);

// ---------------------------------------------------------------------------
// Entry point

// Runs one invocation (args excludes the program name). Never throws.
int Run(std::span<const std::string> args, const Environment& env,
        std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace relr1::cli

#endif  // RELR1_CLI_H_
