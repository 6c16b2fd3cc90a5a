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

#include <algorithm>
#include <cmath>

#include "relr1/error.h"
#include "relr1/sim.h"

namespace relr1::sim {
namespace {

// Warm-start biases on the logit of the truthful option.
constexpr double kLabelBias = 2.5;
constexpr double kPredicateBias = 2.0;
constexpr double kEmitBias = 1.0;
constexpr double kJitterBias = 1.5;
constexpr double kVerbBias = 2.0;
constexpr double kNounBias = 2.5;

constexpr int kZeroJitter = 2;  // index of offset 0 in kJitterOffsets

int Sample(const LogitTable& table, int row, std::mt19937_64& rng) {
  const auto probs = table.Probabilities(row);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (int c = 0; c < table.cols(); ++c) {
    u -= probs[c];
    if (u < 0) return c;
  }
  return table.cols() - 1;
}

int Coordinate(const geom::BoundingBox& b, int k) {
  switch (k) {
    case 0: return static_cast<int>(b.x1());
    case 1: return static_cast<int>(b.y1());
    case 2: return static_cast<int>(b.x2());
    default: return static_cast<int>(b.y2());
  }
}

void CheckProvenance(const ProvenancedGroup& g) {
  if (g.choices.size() != g.group.samples.size()) {
    throw Error(ErrorCode::kProvenanceMismatch,
                "decision records do not cover every response");
  }
  for (size_t i = 0; i < g.choices.size(); ++i) {
    if (g.choices[i].size() != g.group.samples[i].logp_old.size()) {
      throw Error(ErrorCode::kProvenanceMismatch,
                  "response " + std::to_string(i) +
                      " has a different number of decisions and log-probs");
    }
  }
}

}  // namespace

std::vector<double> LogitTable::Probabilities(int row) const {
  std::vector<double> p(cols_);
  double max_logit = -INFINITY;
  for (int c = 0; c < cols_; ++c) max_logit = std::max(max_logit, at(row, c));
  double z = 0;
  for (int c = 0; c < cols_; ++c) {
    p[c] = std::exp(at(row, c) - max_logit);
    z += p[c];
  }
  for (double& x : p) x /= z;
  return p;
}

double LogitTable::LogProb(int row, int col) const {
  double max_logit = -INFINITY;
  for (int c = 0; c < cols_; ++c) max_logit = std::max(max_logit, at(row, c));
  double z = 0;
  for (int c = 0; c < cols_; ++c) z += std::exp(at(row, c) - max_logit);
  return at(row, col) - max_logit - std::log(z);
}

ChoicePolicy ChoicePolicy::Uniform(const Catalog& catalog) {
  const int labels = static_cast<int>(catalog.object_labels.size());
  const int preds = static_cast<int>(catalog.predicates.size());
  const int verbs = static_cast<int>(catalog.verbs.size());
  const int nouns = static_cast<int>(catalog.nouns.size());
  ChoicePolicy p;
  p.tables.resize(kNumSlots);
  p.table(Slot::kObjectLabel) = LogitTable(labels, labels);
  p.table(Slot::kPredicate) = LogitTable(preds, preds);
  p.table(Slot::kEmitRelation) = LogitTable(1, 2);
  p.table(Slot::kBinaryJitter) = LogitTable(4, kNumJitters);
  p.table(Slot::kVerb) = LogitTable(verbs, verbs);
  p.table(Slot::kRoleNoun) = LogitTable(nouns, nouns);
  p.table(Slot::kEmitRole) = LogitTable(1, 2);
  p.table(Slot::kNaryJitter) = LogitTable(4, kNumJitters);
  return p;
}

ChoicePolicy ChoicePolicy::Initial(const Catalog& catalog) {
  ChoicePolicy p = Uniform(catalog);
  auto diagonal = [&](Slot s, double bias) {
    auto& t = p.table(s);
    for (int r = 0; r < t.rows(); ++r) t.at(r, r) = bias;
  };
  diagonal(Slot::kObjectLabel, kLabelBias);
  diagonal(Slot::kPredicate, kPredicateBias);
  diagonal(Slot::kVerb, kVerbBias);
  diagonal(Slot::kRoleNoun, kNounBias);
  p.table(Slot::kEmitRelation).at(0, 1) = kEmitBias;
  p.table(Slot::kEmitRole).at(0, 1) = kEmitBias;
  for (Slot s : {Slot::kBinaryJitter, Slot::kNaryJitter}) {
    for (int k = 0; k < 4; ++k) p.table(s).at(k, kZeroJitter) = kJitterBias;
  }
  return p;
}

size_t ChoicePolicy::NumParameters() const {
  size_t n = 0;
  for (const auto& t : tables) n += t.data().size();
  return n;
}

SampledResponse SampleResponse(const ChoicePolicy& policy, const ToyWorld& world,
                               std::mt19937_64& rng, const Catalog& catalog) {
  SampledResponse out;
  auto choose = [&](Slot slot, int row) {
    const int col = Sample(policy.table(slot), row, rng);
    out.choices.push_back({slot, row, col});
    out.logp.push_back(policy.table(slot).LogProb(row, col));
    return col;
  };
  auto jitter = [&](Slot slot, const geom::BoundingBox& box) {
    int c[4];
    for (int k = 0; k < 4; ++k) {
      c[k] = std::clamp(Coordinate(box, k) + kJitterOffsets[choose(slot, k)], 0,
                        kGridSize);
    }
    return geom::BoundingBox(c[0], c[1], std::max(c[0], c[2]), std::max(c[1], c[3]));
  };

  if (world.task == TaskKind::kBinary) {
    relgram::SceneGraphCaption caption;
    std::vector<geom::BoundingBox> boxes;
    for (const auto& e : world.entities) {
      const int label = choose(Slot::kObjectLabel, e.label);
      boxes.push_back(jitter(Slot::kBinaryJitter, e.box));
      caption.entities.push_back({catalog.object_labels[label], {boxes.back()}});
    }
    for (const auto& r : world.relations) {
      if (choose(Slot::kEmitRelation, 0) == 0) continue;
      const int pred = choose(Slot::kPredicate, r.predicate);
      caption.predicates.push_back(
          {catalog.predicates[pred], {boxes[r.subject]}, {boxes[r.object]}});
    }
    out.text = relgram::MakeEnvelope(relgram::RenderTemplateCot(caption),
                                     relgram::SerializeCaption(caption));
  } else {
    relgram::SituationFrame frame;
    frame.verb = catalog.verbs[choose(Slot::kVerb, world.verb)];
    for (const auto& r : world.roles) {
      if (choose(Slot::kEmitRole, 0) == 0) continue;
      const int noun = choose(Slot::kRoleNoun, r.noun);
      geom::BoundingBox box;
      if (!r.box.is_sentinel()) box = jitter(Slot::kNaryJitter, r.box);
      frame.roles.push_back(
          {catalog.verb_roles[world.verb][r.role], catalog.nouns[noun], box});
    }
    out.text = relgram::MakeEnvelope(relgram::RenderTemplateCot(frame),
                                     relgram::SerializeFrame(frame));
  }
  return out;
}

std::vector<double> ChoiceLogProbs(const ChoicePolicy& policy,
                                   const std::vector<Choice>& choices) {
  std::vector<double> out;
  out.reserve(choices.size());
  for (const auto& c : choices) {
    const int slot = static_cast<int>(c.slot);
    if (slot < 0 || slot >= static_cast<int>(policy.tables.size())) {
      throw Error(ErrorCode::kProvenanceMismatch, "unknown decision slot");
    }
    const auto& t = policy.tables[slot];
    if (c.row < 0 || c.row >= t.rows() || c.col < 0 || c.col >= t.cols()) {
      throw Error(ErrorCode::kProvenanceMismatch,
                  "decision outside the policy's support");
    }
    out.push_back(t.LogProb(c.row, c.col));
  }
  return out;
}

grpo::GrpoStats ObjectiveAt(const ChoicePolicy& policy, const ProvenancedGroup& g,
                            const grpo::GrpoConfig& cfg) {
  CheckProvenance(g);
  grpo::RolloutGroup group = g.group;
  for (size_t i = 0; i < group.samples.size(); ++i) {
    group.samples[i].logp_new = ChoiceLogProbs(policy, g.choices[i]);
  }
  return grpo::Objective(group, cfg);
}

ChoicePolicy GradObjective(const ChoicePolicy& policy, const ProvenancedGroup& g,
                           const grpo::GrpoConfig& cfg) {
  CheckProvenance(g);
  cfg.Validate();
  std::vector<double> rewards;
  for (const auto& s : g.group.samples) rewards.push_back(s.reward);
  const auto advantages = grpo::Advantages(rewards, cfg.std_floor);
  const double inv_g = 1.0 / static_cast<double>(g.group.samples.size());

  ChoicePolicy grad = policy;
  for (auto& t : grad.tables) std::fill(t.data().begin(), t.data().end(), 0.0);

  // The surrogate term contributes rho*A*grad(log pi) where the unclipped
  // branch is active; the KL estimator contributes (1 - r)*grad(log pi).
  auto surrogate_weight = [&](double rho, double a) {
    const double lo = 1.0 - cfg.epsilon;
    const double hi = 1.0 + cfg.epsilon;
    const double clipped = std::clamp(rho, lo, hi);
    const bool active = (rho >= lo && rho <= hi) || rho * a < clipped * a;
    return active ? rho * a : 0.0;
  };

  for (size_t i = 0; i < g.choices.size(); ++i) {
    const auto& sample = g.group.samples[i];
    const auto& choices = g.choices[i];
    const auto logp_new = ChoiceLogProbs(policy, choices);
    if (sample.logp_ref.size() != choices.size()) {
      throw Error(ErrorCode::kLengthMismatch, "reference log-probs length");
    }
    const double a = advantages[i];
    std::vector<double> coeff(choices.size());
    if (cfg.aggregation == grpo::Aggregation::kResponse) {
      double sum_new = 0, sum_old = 0, sum_ref = 0;
      for (size_t t = 0; t < choices.size(); ++t) {
        sum_new += logp_new[t];
        sum_old += sample.logp_old[t];
        sum_ref += sample.logp_ref[t];
      }
      const double rho = std::exp(sum_new - sum_old);
      const double r = std::exp(sum_ref - sum_new);
      const double c = inv_g * (surrogate_weight(rho, a) - cfg.kl_coeff * (1.0 - r));
      std::fill(coeff.begin(), coeff.end(), c);
    } else {
      const double inv_t = 1.0 / static_cast<double>(choices.size());
      for (size_t t = 0; t < choices.size(); ++t) {
        const double rho = std::exp(logp_new[t] - sample.logp_old[t]);
        const double r = std::exp(sample.logp_ref[t] - logp_new[t]);
        coeff[t] = inv_g * inv_t *
                   (surrogate_weight(rho, a) - cfg.kl_coeff * (1.0 - r));
      }
    }
    for (size_t t = 0; t < choices.size(); ++t) {
      const auto& ch = choices[t];
      const auto probs = policy.table(ch.slot).Probabilities(ch.row);
      auto& gt = grad.table(ch.slot);
      for (int k = 0; k < gt.cols(); ++k) {
        gt.at(ch.row, k) += coeff[t] * ((k == ch.col ? 1.0 : 0.0) - probs[k]);
      }
    }
  }
  return grad;
}

}  // namespace relr1::sim
