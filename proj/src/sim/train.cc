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
#include <ostream>

#include "relr1/error.h"
#include "relr1/sim.h"

namespace relr1::sim {

void TrainConfig::Validate() const {
  if (group_size < 2) {
    throw Error(ErrorCode::kGroupTooSmall, "group_size must be at least 2");
  }
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 1");
  if (refresh_interval < 1) {
    throw Error(ErrorCode::kInvalidArgument, "refresh_interval must be >= 1");
  }
  if (!(max_grad_norm >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_grad_norm must be >= 0");
  }
  if (!(learning_rate >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be >= 0");
  }
  grpo.Validate();
  reward.Validate();
}

TrainResult Train(const TrainConfig& cfg) {
  cfg.Validate();
  const Catalog& catalog = Catalog::Default();
  const relgram::VerbLexicon lexicon = catalog.Lexicon();

  TrainResult result;
  result.reference_policy = ChoicePolicy::Initial(catalog);
  ChoicePolicy policy = result.reference_policy;
  ChoicePolicy old_policy = policy;
  const uint64_t task_tag = cfg.task == TaskKind::kBinary ? 11 : 13;

  for (int step = 0; step < cfg.steps; ++step) {
    if (step % cfg.refresh_interval == 0) old_policy = policy;
    const uint64_t step_seed = MixSeed(MixSeed(cfg.seed, task_tag), step);
    const ToyWorld world = GenWorld(step_seed, cfg.task, catalog);
    const reward::GroundTruth truth = world.Truth(catalog);

    ProvenancedGroup batch;
    batch.group.prompt_id = "world-" + std::to_string(world.world_id);
    double task_sum = 0;
    double length_sum = 0;
    for (int i = 0; i < cfg.group_size; ++i) {
      // One independent stream per rollout, split from the step seed.
      std::mt19937_64 rng(MixSeed(step_seed, static_cast<uint64_t>(i) + 1));
      SampledResponse response = SampleResponse(old_policy, world, rng, catalog);
      const auto breakdown =
          reward::TotalReward(response.text, truth, cfg.reward, &lexicon);
      grpo::ResponseSample sample;
      sample.logp_new = ChoiceLogProbs(policy, response.choices);
      sample.logp_old = response.logp;
      sample.logp_ref = ChoiceLogProbs(result.reference_policy, response.choices);
      sample.reward = breakdown.total;
      task_sum += breakdown.task;
      length_sum += static_cast<double>(response.text.size());
      sample.response_text = std::move(response.text);
      batch.group.samples.push_back(std::move(sample));
      batch.choices.push_back(std::move(response.choices));
    }

    const grpo::GrpoStats stats = grpo::Objective(batch.group, cfg.grpo);
    TraceRow row;
    row.step = step;
    double reward_sum = 0;
    for (const auto& s : batch.group.samples) reward_sum += s.reward;
    const double g = static_cast<double>(cfg.group_size);
    row.mean_reward = reward_sum / g;
    row.mean_task_reward = task_sum / g;
    row.mean_completion_length = length_sum / g;
    row.mean_kl = stats.kl;
    row.objective = stats.objective;
    result.trace.push_back(row);

    if (cfg.learning_rate > 0) {
      const ChoicePolicy grad = GradObjective(policy, batch, cfg.grpo);
      double norm_sq = 0;
      for (const auto& t : grad.tables) {
        for (double d : t.data()) norm_sq += d * d;
      }
      const double norm = std::sqrt(norm_sq);
      double scale = cfg.learning_rate;
      if (cfg.max_grad_norm > 0 && norm > cfg.max_grad_norm) {
        scale *= cfg.max_grad_norm / norm;
      }
      for (size_t t = 0; t < policy.tables.size(); ++t) {
        auto& w = policy.tables[t].data();
        const auto& d = grad.tables[t].data();
        for (size_t k = 0; k < w.size(); ++k) w[k] += scale * d[k];
      }
    }
  }
  result.final_policy = std::move(policy);
  return result;
}

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << kTraceHeader << "\n";
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.3f,%.8f,%.8f\n", r.step,
                  r.mean_reward, r.mean_completion_length, r.mean_kl, r.objective);
    out << buf;
  }
}

double WindowMeanTaskReward(const std::vector<TraceRow>& trace, size_t begin,
                            size_t end) {
  end = std::min(end, trace.size());
  if (begin >= end) return 0;
  double sum = 0;
  for (size_t i = begin; i < end; ++i) sum += trace[i].mean_task_reward;
  return sum / static_cast<double>(end - begin);
}

}  // namespace relr1::sim
