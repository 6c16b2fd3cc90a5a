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

#ifndef RELR1_REWARD_H_
#define RELR1_REWARD_H_

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relr1/geom.h"
#include "relr1/metrics.h"
#include "relr1/relgram.h"

namespace relr1::reward {

using relgram::TaskKind;

// How binary answers are written: tagged caption or bracketed list.
enum class BinaryFormat { kCaption, kList };

std::string_view BinaryFormatName(BinaryFormat format);
std::optional<BinaryFormat> ParseBinaryFormat(std::string_view name);

struct RewardConfig {
  double alpha = 0.5;        // R vs mR weight for binary relations
  double nary_weight = 0.5;  // V_e vs V_grnd weight for N-ary relations
  geom::Ratio iou_threshold = metrics::kDefaultIouThreshold;
  // When set, a malformed envelope zeroes the total instead of only losing
  // the format point.
  bool gate_on_format = false;
  BinaryFormat binary_format = BinaryFormat::kCaption;

  // Throws Error(kInvalidArgument) when a weight is outside [0, 1] or the
  // threshold is outside (0, 1].
  void Validate() const;
};

struct BinaryTruth {
  std::vector<relgram::Triplet> triplets;
};

struct NaryTruth {
  relgram::SituationFrame frame;
};

using GroundTruth = std::variant<BinaryTruth, NaryTruth>;

TaskKind TaskOf(const GroundTruth& gt);

struct RewardBreakdown {
  int format = 0;     // r_form in {0, 1}
  double task = 0;    // r_binary or r_n-ary in [0, 1]
  double total = 0;
  TaskKind task_kind = TaskKind::kNary;  // as routed by the gate
  bool task_mismatch = false;
  std::vector<std::string> diagnostics;
};

int FormatReward(const relgram::Envelope& env);

// alpha * R + (1 - alpha) * mR. Throws Error(kEmptyGroundTruth).
double BinaryReward(std::span<const relgram::Triplet> pred,
                    std::span<const relgram::Triplet> gt,
                    const RewardConfig& cfg);
double BinaryReward(const metrics::BinarySampleScore& score, double alpha);

// nary_weight * V_e + (1 - nary_weight) * V_grnd under the verb constraint.
double NaryReward(const relgram::SituationFrame& pred,
                  const relgram::SituationFrame& gt, const RewardConfig& cfg);
double NaryReward(const metrics::GsrSampleScore& score, double nary_weight);

// The routing gate: Binary iff <ref> is present. In list mode a bracketed
// answer also routes Binary, since list answers carry no <ref> tags.
TaskKind RouteTask(std::string_view answer, BinaryFormat format);

// The structure a prediction answer yields under the gate. When the answer
// routes to a task other than expected, both payloads stay empty.
struct Extraction {
  TaskKind routed = TaskKind::kNary;
  bool task_mismatch = false;
  std::vector<relgram::Triplet> triplets;  // binary
  relgram::SituationFrame frame;           // N-ary
  std::vector<relgram::Diagnostic> diagnostics;
};

Extraction ExtractPrediction(std::string_view answer, TaskKind expected,
                             BinaryFormat format,
                             const relgram::VerbLexicon& lexicon);

// Scores one raw completion. The lexicon resolves verbs in N-ary answers;
// when null, a lexicon holding only the ground-truth verb is used. Never
// throws on model text.
RewardBreakdown TotalReward(std::string_view raw, const GroundTruth& gt,
                            const RewardConfig& cfg,
                            const relgram::VerbLexicon* lexicon = nullptr);

}  // namespace relr1::reward

#endif  // RELR1_REWARD_H_
