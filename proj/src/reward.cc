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

#include "relr1/reward.h"

#include "relr1/error.h"

namespace relr1::reward {

std::string_view BinaryFormatName(BinaryFormat format) {
  return format == BinaryFormat::kCaption ? "caption" : "list";
}

std::optional<BinaryFormat> ParseBinaryFormat(std::string_view name) {
  if (name == "caption") return BinaryFormat::kCaption;
  if (name == "list") return BinaryFormat::kList;
  return std::nullopt;
}

void RewardConfig::Validate() const {
  if (!(alpha >= 0 && alpha <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  if (!(nary_weight >= 0 && nary_weight <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "nary_weight must lie in [0, 1]");
  }
  if (iou_threshold <= geom::Ratio(0, 1) || iou_threshold > geom::Ratio(1, 1)) {
    throw Error(ErrorCode::kInvalidArgument, "iou_threshold must lie in (0, 1]");
  }
}

TaskKind TaskOf(const GroundTruth& gt) {
  return std::holds_alternative<BinaryTruth>(gt) ? TaskKind::kBinary
                                                 : TaskKind::kNary;
}

int FormatReward(const relgram::Envelope& env) { return env.well_formed ? 1 : 0; }

double BinaryReward(const metrics::BinarySampleScore& score, double alpha) {
  return alpha * score.recall + (1.0 - alpha) * score.mean_recall;
}

double BinaryReward(std::span<const relgram::Triplet> pred,
                    std::span<const relgram::Triplet> gt,
                    const RewardConfig& cfg) {
  return BinaryReward(metrics::ScoreSggSample(pred, gt, cfg.iou_threshold),
                      cfg.alpha);
}

double NaryReward(const metrics::GsrSampleScore& score, double nary_weight) {
  return nary_weight * score.entity_value() +
         (1.0 - nary_weight) * score.grounded_value();
}

double NaryReward(const relgram::SituationFrame& pred,
                  const relgram::SituationFrame& gt, const RewardConfig& cfg) {
  return NaryReward(
      metrics::ScoreGsrSample(pred, gt, cfg.iou_threshold, /*verb_constraint=*/true),
      cfg.nary_weight);
}

TaskKind RouteTask(std::string_view answer, BinaryFormat format) {
  const TaskKind detected = relgram::DetectTask(answer);
  if (detected == TaskKind::kBinary || format != BinaryFormat::kList) {
    return detected;
  }
  for (char c : answer) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '[' ? TaskKind::kBinary : TaskKind::kNary;
  }
  return TaskKind::kNary;
}

Extraction ExtractPrediction(std::string_view answer, TaskKind expected,
                             BinaryFormat format,
                             const relgram::VerbLexicon& lexicon) {
  Extraction out;
  out.routed = RouteTask(answer, format);
  if (out.routed != expected) {
    out.task_mismatch = true;
    return out;
  }
  auto take = [&](auto& diags) {
    for (auto& d : diags) out.diagnostics.push_back(std::move(d));
  };
  if (expected == TaskKind::kNary) {
    auto frame = relgram::ParseSituationFrame(answer, lexicon);
    take(frame.diagnostics);
    out.frame = std::move(frame.value);
  } else if (format == BinaryFormat::kList) {
    auto parsed = relgram::ParseSceneGraphList(answer);
    take(parsed.diagnostics);
    out.triplets = std::move(parsed.value);
  } else {
    auto caption = relgram::ParseSceneGraphCaption(answer);
    take(caption.diagnostics);
    auto triplets = relgram::ExtractTriplets(caption.value);
    take(triplets.diagnostics);
    out.triplets = std::move(triplets.value);
  }
  return out;
}

RewardBreakdown TotalReward(std::string_view raw, const GroundTruth& gt,
                            const RewardConfig& cfg,
                            const relgram::VerbLexicon* lexicon) {
  RewardBreakdown out;
  const relgram::Envelope env = relgram::ParseEnvelope(raw);
  out.format = FormatReward(env);
  if (!env.well_formed) out.diagnostics.push_back("MalformedEnvelope");

  relgram::VerbLexicon fallback;
  if (lexicon == nullptr) {
    if (const auto* nary = std::get_if<NaryTruth>(&gt)) {
      fallback.AddVerb(nary->frame.verb);
    }
    lexicon = &fallback;
  }
  Extraction pred =
      ExtractPrediction(env.answer, TaskOf(gt), cfg.binary_format, *lexicon);
  out.task_kind = pred.routed;
  out.task_mismatch = pred.task_mismatch;
  for (const auto& d : pred.diagnostics) out.diagnostics.push_back(d.ToString());

  if (pred.task_mismatch) {
    out.diagnostics.push_back(
        std::string("TaskMismatch: answer routed ") +
        std::string(relgram::TaskKindName(out.task_kind)) + ", ground truth is " +
        std::string(relgram::TaskKindName(TaskOf(gt))));
  } else if (const auto* binary = std::get_if<BinaryTruth>(&gt)) {
    if (binary->triplets.empty()) {
      out.diagnostics.push_back("EmptyGroundTruth");
    } else {
      out.task = BinaryReward(pred.triplets, binary->triplets, cfg);
    }
  } else {
    out.task = NaryReward(pred.frame, std::get<NaryTruth>(gt).frame, cfg);
  }

  if (cfg.gate_on_format && out.format == 0) {
    out.total = 0;
  } else {
    out.total = out.format + out.task;
  }
  return out;
}

}  // namespace relr1::reward
