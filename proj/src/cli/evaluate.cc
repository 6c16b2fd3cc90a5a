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

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "json.hpp"
#include "relr1/cli.h"
#include "relr1/error.h"

namespace relr1::cli {
namespace {

using nlohmann::ordered_json;
using relgram::TaskKind;

// Reports carry six decimals so identical runs give identical bytes.
double Fixed(double x) { return std::round(x * 1e6) / 1e6; }

std::unordered_map<std::string, const PredictionRecord*> IndexPredictions(
    std::span<const PredictionRecord> pred,
    std::span<const GroundTruthRecord> gt) {
  std::unordered_map<std::string, const GroundTruthRecord*> truth;
  for (const auto& g : gt) truth.emplace(g.image_id, &g);
  std::unordered_map<std::string, const PredictionRecord*> out;
  for (const auto& p : pred) {
    if (!truth.contains(p.image_id)) {
      throw Error(ErrorCode::kMissingGroundTruth,
                  "no ground truth for image_id " + p.image_id);
    }
    out.emplace(p.image_id, &p);
  }
  return out;
}

// Parses one prediction for the expected task and tallies its problems.
reward::Extraction Extract(const PredictionRecord* p, TaskKind task,
                           reward::BinaryFormat format,
                           const relgram::VerbLexicon& lexicon,
                           EvalCounts& counts) {
  if (p == nullptr) {
    ++counts.missing_predictions;
    reward::Extraction empty;
    empty.routed = task;
    return empty;
  }
  const relgram::Envelope env = relgram::ParseEnvelope(p->output_text);
  if (!env.well_formed) ++counts.malformed_envelopes;
  reward::Extraction x = reward::ExtractPrediction(env.answer, task, format, lexicon);
  if (x.task_mismatch) ++counts.task_mismatches;
  if (!x.diagnostics.empty()) ++counts.parse_failures;
  return x;
}

ordered_json CountsJson(const EvalCounts& c) {
  return {{"records", c.records},
          {"malformed_envelopes", c.malformed_envelopes},
          {"parse_failures", c.parse_failures},
          {"task_mismatches", c.task_mismatches},
          {"missing_predictions", c.missing_predictions},
          {"skipped_empty_gt", c.skipped_empty_gt}};
}

std::string CountsLine(const EvalCounts& c, int scored) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "samples %d  malformed envelopes %d  parse failures %d  "
                "task mismatches %d  missing predictions %d\n",
                scored, c.malformed_envelopes, c.parse_failures,
                c.task_mismatches, c.missing_predictions);
  return buf;
}

ordered_json SummaryJson(const RewardSummary& s) {
  return {{"count", s.count},
          {"mean_total", Fixed(s.mean_total)},
          {"mean_format", Fixed(s.mean_format)},
          {"mean_task", Fixed(s.mean_task)}};
}

void Accumulate(RewardSummary& s, const reward::RewardBreakdown& b) {
  ++s.count;
  s.mean_total += b.total;
  s.mean_format += b.format;
  s.mean_task += b.task;
}

void Finish(std::map<TaskKind, RewardSummary>& m) {
  for (auto& [kind, s] : m) {
    s.mean_total /= s.count;
    s.mean_format /= s.count;
    s.mean_task /= s.count;
  }
}

}  // namespace

SggEvaluation EvaluateSgg(std::span<const PredictionRecord> pred,
                          std::span<const GroundTruthRecord> gt,
                          const SggOptions& options) {
  const auto index = IndexPredictions(pred, gt);
  const relgram::VerbLexicon unused;
  SggEvaluation out;
  for (const auto& g : gt) {
    const auto* truth = std::get_if<reward::BinaryTruth>(&g.truth);
    if (truth == nullptr) continue;
    ++out.counts.records;
    auto it = index.find(g.image_id);
    const reward::Extraction x =
        Extract(it == index.end() ? nullptr : it->second, TaskKind::kBinary,
                options.format, unused, out.counts);
    if (truth->triplets.empty()) {
      ++out.counts.skipped_empty_gt;
      continue;
    }
    out.samples.push_back(
        metrics::ScoreSggSample(x.triplets, truth->triplets, options.iou_threshold));
  }
  out.report = metrics::AggregateSgg(out.samples, options.pooled_mrecall);
  return out;
}

GsrEvaluation EvaluateGsr(std::span<const PredictionRecord> pred,
                          std::span<const GroundTruthRecord> gt,
                          const GsrOptions& options) {
  const auto index = IndexPredictions(pred, gt);
  const relgram::VerbLexicon lexicon = CorpusLexicon(gt);
  GsrEvaluation out;
  for (const auto& g : gt) {
    const auto* truth = std::get_if<reward::NaryTruth>(&g.truth);
    if (truth == nullptr) continue;
    ++out.counts.records;
    auto it = index.find(g.image_id);
    const reward::Extraction x =
        Extract(it == index.end() ? nullptr : it->second, TaskKind::kNary,
                reward::BinaryFormat::kCaption, lexicon, out.counts);
    out.samples.push_back(metrics::ScoreGsrSample(
        x.frame, truth->frame, options.iou_threshold, options.verb_constraint));
  }
  out.report = metrics::AggregateGsr(out.samples);
  return out;
}

std::string SggTable(const SggEvaluation& eval) {
  const auto& r = eval.report;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%8s %8s %8s\n%8.2f %8.2f %8.2f\n", "Recall",
                "mRecall", "Mean", r.recall, r.mrecall, r.mean);
  return buf + CountsLine(eval.counts, r.sample_count);
}

std::string GsrTable(const GsrEvaluation& eval) {
  const auto& r = eval.report;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%8s %8s %10s %8s %9s\n%8.2f %8.2f %10.2f %8.2f %9.2f\n", "Verb",
                "Value", "Value-all", "Grnd", "Grnd-all", r.verb, r.value,
                r.value_all, r.grnd, r.grnd_all);
  return buf + CountsLine(eval.counts, r.sample_count);
}

std::string SggReportJson(const SggEvaluation& eval, const SggOptions& options) {
  ordered_json doc;
  doc["command"] = "eval-sgg";
  doc["settings"] = {{"iou_threshold", options.iou_threshold.ToString()},
                     {"format", reward::BinaryFormatName(options.format)},
                     {"pooled_mrecall", options.pooled_mrecall}};
  doc["sgg"] = {{"recall", Fixed(eval.report.recall)},
                {"mrecall", Fixed(eval.report.mrecall)},
                {"mean", Fixed(eval.report.mean)}};
  doc["sample_count"] = eval.report.sample_count;
  doc["counts"] = CountsJson(eval.counts);
  return doc.dump(2) + "\n";
}

std::string GsrReportJson(const GsrEvaluation& eval, const GsrOptions& options) {
  const auto& r = eval.report;
  ordered_json doc;
  doc["command"] = "eval-gsr";
  doc["settings"] = {{"iou_threshold", options.iou_threshold.ToString()},
                     {"verb_constraint", options.verb_constraint}};
  doc["gsr"] = {{"verb", Fixed(r.verb)},
                {"value", Fixed(r.value)},
                {"value_all", Fixed(r.value_all)},
                {"grnd", Fixed(r.grnd)},
                {"grnd_all", Fixed(r.grnd_all)}};
  doc["sample_count"] = r.sample_count;
  doc["grounded_sample_count"] = r.grounded_sample_count;
  doc["counts"] = CountsJson(eval.counts);
  return doc.dump(2) + "\n";
}

RewardRun ScoreRewards(std::span<const PredictionRecord> pred,
                       std::span<const GroundTruthRecord> gt,
                       const reward::RewardConfig& cfg) {
  cfg.Validate();
  std::unordered_map<std::string, const GroundTruthRecord*> truth;
  for (const auto& g : gt) truth.emplace(g.image_id, &g);
  const relgram::VerbLexicon lexicon = CorpusLexicon(gt);

  RewardRun run;
  for (const auto& p : pred) {
    auto it = truth.find(p.image_id);
    if (it == truth.end()) {
      throw Error(ErrorCode::kMissingGroundTruth,
                  "no ground truth for image_id " + p.image_id);
    }
    ScoredRecord rec;
    rec.image_id = p.image_id;
    rec.gt_task = it->second->task();
    rec.breakdown = reward::TotalReward(p.output_text, it->second->truth, cfg, &lexicon);
    Accumulate(run.by_gt_task[rec.gt_task], rec.breakdown);
    Accumulate(run.by_routed_task[rec.breakdown.task_kind], rec.breakdown);
    run.records.push_back(std::move(rec));
  }
  Finish(run.by_gt_task);
  Finish(run.by_routed_task);
  return run;
}

std::string GrpoStatsJson(std::string_view prompt_id, const grpo::GrpoStats& stats) {
  ordered_json doc;
  doc["prompt_id"] = prompt_id;
  doc["objective"] = stats.objective;
  doc["surrogate"] = stats.surrogate;
  doc["kl"] = stats.kl;
  doc["advantages"] = stats.advantages;
  doc["ratios"] = stats.ratios;
  return doc.dump();
}

std::string RewardRecordJson(const ScoredRecord& record) {
  const auto& b = record.breakdown;
  ordered_json doc;
  doc["image_id"] = record.image_id;
  doc["gt_task"] = relgram::TaskKindName(record.gt_task);
  doc["routed_task"] = relgram::TaskKindName(b.task_kind);
  doc["format"] = b.format;
  doc["task"] = Fixed(b.task);
  doc["total"] = Fixed(b.total);
  doc["task_mismatch"] = b.task_mismatch;
  doc["diagnostics"] = b.diagnostics;
  return doc.dump();
}

std::string RewardSummaryJson(const RewardRun& run) {
  ordered_json doc;
  doc["command"] = "reward";
  doc["records"] = run.records.size();
  auto section = [](const std::map<TaskKind, RewardSummary>& m) {
    ordered_json s = ordered_json::object();
    for (const auto& [kind, summary] : m) {
      s[std::string(relgram::TaskKindName(kind))] = SummaryJson(summary);
    }
    return s;
  };
  doc["by_gt_task"] = section(run.by_gt_task);
  doc["by_routed_task"] = section(run.by_routed_task);
  return doc.dump(2) + "\n";
}

}  // namespace relr1::cli
