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

#ifndef RELR1_SIM_H_
#define RELR1_SIM_H_

// Desk-scale stand-in for policy optimization on relation outputs. A toy
// world plays the role of an annotated image; a table-based categorical
// policy plays the role of the language model. Each categorical decision
// is one "token", which makes the objective's gradient exact.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "relr1/geom.h"
#include "relr1/grpo.h"
#include "relr1/relgram.h"
#include "relr1/reward.h"

namespace relr1::sim {

using relgram::TaskKind;

// Fixed vocabularies of the toy world.
struct Catalog {
  std::vector<std::string> object_labels;
  std::vector<std::string> predicates;
  std::vector<std::string> verbs;
  std::vector<std::vector<std::string>> verb_roles;  // parallel to verbs
  std::vector<std::string> nouns;

  static const Catalog& Default();
  relgram::VerbLexicon Lexicon() const;
};

// Offsets a coordinate may be jittered by.
inline constexpr int kJitterOffsets[] = {-8, -4, 0, 4, 8};
inline constexpr int kNumJitters = 5;
inline constexpr int kGridSize = 64;

struct WorldEntity {
  int label = 0;  // index into Catalog::object_labels
  geom::BoundingBox box;
};

struct WorldRelation {
  int subject = 0;  // entity indices
  int object = 0;
  int predicate = 0;
};

struct WorldRole {
  int role = 0;  // index into the verb's role list
  int noun = 0;
  geom::BoundingBox box;  // sentinel when ungrounded
};

struct ToyWorld {
  uint64_t world_id = 0;
  TaskKind task = TaskKind::kBinary;
  // Binary
  std::vector<WorldEntity> entities;
  std::vector<WorldRelation> relations;
  // N-ary
  int verb = 0;
  std::vector<WorldRole> roles;

  reward::GroundTruth Truth(const Catalog& catalog) const;
};

// Deterministic per seed. Binary worlds hold 2-4 entities and 1-3
// relations; N-ary worlds one verb with 2-4 roles, at most one ungrounded.
ToyWorld GenWorld(uint64_t seed, TaskKind task,
                  const Catalog& catalog = Catalog::Default());

// Decision slots. Rows condition on what the world shows (the true label,
// predicate or verb); columns are the options.
enum class Slot : int {
  kObjectLabel,    // labels x labels
  kPredicate,      // predicates x predicates
  kEmitRelation,   // 1 x {skip, emit}
  kBinaryJitter,   // 4 coordinates x offsets
  kVerb,           // verbs x verbs
  kRoleNoun,       // nouns x nouns
  kEmitRole,       // 1 x {skip, emit}
  kNaryJitter,     // 4 coordinates x offsets
  kCount,
};

inline constexpr int kNumSlots = static_cast<int>(Slot::kCount);

class LogitTable {
 public:
  LogitTable() = default;
  LogitTable(int rows, int cols) : rows_(rows), cols_(cols), logits_(rows * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int r, int c) { return logits_[r * cols_ + c]; }
  double at(int r, int c) const { return logits_[r * cols_ + c]; }
  std::vector<double>& data() { return logits_; }
  const std::vector<double>& data() const { return logits_; }

  std::vector<double> Probabilities(int row) const;
  double LogProb(int row, int col) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> logits_;
};

// Softmax policy (temperature 1) over every slot.
struct ChoicePolicy {
  std::vector<LogitTable> tables;  // indexed by Slot

  LogitTable& table(Slot s) { return tables[static_cast<int>(s)]; }
  const LogitTable& table(Slot s) const { return tables[static_cast<int>(s)]; }

  // Zero logits everywhere: the uniform policy.
  static ChoicePolicy Uniform(const Catalog& catalog = Catalog::Default());
  // Biased towards the truth, standing in for a supervised warm start.
  static ChoicePolicy Initial(const Catalog& catalog = Catalog::Default());

  size_t NumParameters() const;
};

struct Choice {
  Slot slot = Slot::kObjectLabel;
  int row = 0;
  int col = 0;

  friend bool operator==(const Choice&, const Choice&) = default;
};

struct SampledResponse {
  std::string text;
  std::vector<Choice> choices;
  std::vector<double> logp;  // per choice, under the sampling policy
};

// Emits a well-formed envelope: template reasoning in <think>, a caption
// (binary) or frame (N-ary) in <answer>.
SampledResponse SampleResponse(const ChoicePolicy& policy, const ToyWorld& world,
                               std::mt19937_64& rng,
                               const Catalog& catalog = Catalog::Default());

// Per-choice log-probabilities of a recorded decision sequence. Throws
// Error(kProvenanceMismatch) when a choice lies outside the tables.
std::vector<double> ChoiceLogProbs(const ChoicePolicy& policy,
                                   const std::vector<Choice>& choices);

// A rollout group together with the decisions behind each response.
struct ProvenancedGroup {
  grpo::RolloutGroup group;
  std::vector<std::vector<Choice>> choices;  // parallel to group.samples
};

// Objective with logp_new recomputed from policy; logp_old, logp_ref and
// rewards are taken from the group.
grpo::GrpoStats ObjectiveAt(const ChoicePolicy& policy, const ProvenancedGroup& g,
                            const grpo::GrpoConfig& cfg);

// Exact gradient of ObjectiveAt with respect to every logit, holding
// logp_old, logp_ref and the advantages constant. Shaped like the policy.
ChoicePolicy GradObjective(const ChoicePolicy& policy, const ProvenancedGroup& g,
                           const grpo::GrpoConfig& cfg);

struct TrainConfig {
  TaskKind task = TaskKind::kBinary;
  int group_size = 8;
  int steps = 2000;
  double learning_rate = 0.2;
  uint64_t seed = 1;
  int refresh_interval = 1;  // steps between old-policy refreshes
  // Global L2 bound on each update's gradient; 0 disables clipping. The
  // sequence-level KL estimator has an unbounded gradient weight, so a
  // single rare response can otherwise throw the policy out of its support.
  double max_grad_norm = 1.0;
  grpo::GrpoConfig grpo;
  reward::RewardConfig reward;

  void Validate() const;
};

struct TraceRow {
  int step = 0;
  double mean_reward = 0;
  double mean_task_reward = 0;
  double mean_completion_length = 0;  // characters
  double mean_kl = 0;
  double objective = 0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  ChoicePolicy final_policy;
  ChoicePolicy reference_policy;
};

TrainResult Train(const TrainConfig& cfg);

inline constexpr std::string_view kTraceHeader =
    "step,mean_reward,mean_completion_length,mean_kl,objective";

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRow>& trace);

// Mean of mean_task_reward over rows [begin, end).
double WindowMeanTaskReward(const std::vector<TraceRow>& trace, size_t begin,
                            size_t end);

// SplitMix64 finalizer used to derive independent seeds.
uint64_t MixSeed(uint64_t a, uint64_t b);

}  // namespace relr1::sim

#endif  // RELR1_SIM_H_
