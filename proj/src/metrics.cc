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

#include "relr1/metrics.h"

#include <unordered_map>

#include "relr1/error.h"

namespace relr1::metrics {
namespace {

// Kuhn-style augmenting paths over a bipartite graph whose vertices can be
// frozen. Frozen gt vertices are never entered by a path.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::vector<std::vector<size_t>> adj, size_t num_gt)
      : adj_(std::move(adj)),
        pred_to_gt_(adj_.size(), kNone),
        gt_to_pred_(num_gt, kNone),
        frozen_gt_(num_gt, false),
        visited_(num_gt, false) {}

  static constexpr size_t kNone = static_cast<size_t>(-1);

  size_t MaximumMatching() {
    size_t size = 0;
    for (size_t p = 0; p < adj_.size(); ++p) {
      std::fill(visited_.begin(), visited_.end(), false);
      if (Augment(p)) ++size;
    }
    return size;
  }

  // Greedily fixes pairs in (pred, gt) order while keeping the matching
  // maximum.
  std::vector<std::pair<size_t, size_t>> LexicographicMaximum() {
    const size_t target = MaximumMatching();
    for (size_t i = 0; i < adj_.size(); ++i) {
      for (size_t j : adj_[i]) {
        if (frozen_gt_[j]) continue;
        if (TryFix(i, j, target)) break;
      }
    }
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t p = 0; p < adj_.size(); ++p) {
      if (pred_to_gt_[p] != kNone) pairs.emplace_back(p, pred_to_gt_[p]);
    }
    return pairs;
  }

 private:
  bool Augment(size_t p) {
    for (size_t g : adj_[p]) {
      if (frozen_gt_[g] || visited_[g]) continue;
      visited_[g] = true;
      if (gt_to_pred_[g] == kNone || Augment(gt_to_pred_[g])) {
        pred_to_gt_[p] = g;
        gt_to_pred_[g] = p;
        return true;
      }
    }
    return false;
  }

  size_t Size() const {
    size_t n = 0;
    for (size_t g : pred_to_gt_) n += g != kNone;
    return n;
  }

  bool TryFix(size_t i, size_t j, size_t target) {
    if (pred_to_gt_[i] == j) {
      frozen_gt_[j] = true;
      return true;
    }
    const auto saved_p = pred_to_gt_;
    const auto saved_g = gt_to_pred_;
    if (pred_to_gt_[i] != kNone) gt_to_pred_[pred_to_gt_[i]] = kNone;
    if (gt_to_pred_[j] != kNone) pred_to_gt_[gt_to_pred_[j]] = kNone;
    pred_to_gt_[i] = j;
    gt_to_pred_[j] = i;
    frozen_gt_[j] = true;
    // Pred i and every earlier pred are settled; only later free preds may
    // start a repairing path.
    for (size_t p = i + 1; p < adj_.size() && Size() < target; ++p) {
      if (pred_to_gt_[p] != kNone) continue;
      std::fill(visited_.begin(), visited_.end(), false);
      Augment(p);
    }
    if (Size() == target) return true;
    pred_to_gt_ = saved_p;
    gt_to_pred_ = saved_g;
    frozen_gt_[j] = false;
    return false;
  }

  std::vector<std::vector<size_t>> adj_;
  std::vector<size_t> pred_to_gt_;
  std::vector<size_t> gt_to_pred_;
  std::vector<bool> frozen_gt_;
  std::vector<bool> visited_;
};

}  // namespace

bool Compatible(const Triplet& pred, const Triplet& gt, const Ratio& threshold) {
  return pred.predicate == gt.predicate &&
         pred.subject_label == gt.subject_label &&
         pred.object_label == gt.object_label &&
         geom::IouAtLeast(pred.subject_box, gt.subject_box, threshold) &&
         geom::IouAtLeast(pred.object_box, gt.object_box, threshold);
}

std::vector<std::pair<size_t, size_t>> MatchTriplets(
    std::span<const Triplet> pred, std::span<const Triplet> gt,
    const Ratio& threshold) {
  std::vector<std::vector<size_t>> adj(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    for (size_t j = 0; j < gt.size(); ++j) {
      if (Compatible(pred[i], gt[j], threshold)) adj[i].push_back(j);
    }
  }
  return BipartiteMatcher(std::move(adj), gt.size()).LexicographicMaximum();
}

BinarySampleScore ScoreSggSample(std::span<const Triplet> pred,
                                 std::span<const Triplet> gt,
                                 const Ratio& threshold) {
  if (gt.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth, "sample has no ground-truth triplets");
  }
  BinarySampleScore score;
  for (const auto& t : gt) ++score.per_predicate[t.predicate].total;
  const auto pairs = MatchTriplets(pred, gt, threshold);
  for (const auto& [p, g] : pairs) ++score.per_predicate[gt[g].predicate].matched;

  score.recall = static_cast<double>(pairs.size()) / static_cast<double>(gt.size());
  double sum = 0;
  for (const auto& [name, tally] : score.per_predicate) {
    sum += static_cast<double>(tally.matched) / tally.total;
  }
  score.mean_recall = sum / static_cast<double>(score.per_predicate.size());
  return score;
}

double GsrSampleScore::entity_value() const {
  if (role_results.empty()) return 0;
  int ok = 0;
  for (const auto& r : role_results) ok += r.value_ok;
  return static_cast<double>(ok) / static_cast<double>(role_results.size());
}

int GsrSampleScore::grounded_roles() const {
  int n = 0;
  for (const auto& r : role_results) n += r.gt_grounded;
  return n;
}

double GsrSampleScore::grounded_value() const {
  const int grounded = grounded_roles();
  if (grounded == 0) return 0;
  int ok = 0;
  for (const auto& r : role_results) ok += r.grnd_ok;
  return static_cast<double>(ok) / grounded;
}

bool GsrSampleScore::all_values_ok() const {
  for (const auto& r : role_results) {
    if (!r.value_ok) return false;
  }
  return true;
}

bool GsrSampleScore::all_grounded_ok() const {
  for (const auto& r : role_results) {
    if (r.gt_grounded && !r.grnd_ok) return false;
  }
  return true;
}

GsrSampleScore ScoreGsrSample(const SituationFrame& pred,
                              const SituationFrame& gt, const Ratio& threshold,
                              bool verb_constraint) {
  GsrSampleScore score;
  score.verb_correct = !gt.verb.empty() && pred.verb == gt.verb;
  const bool gate = score.verb_correct || !verb_constraint;

  std::unordered_map<std::string_view, const relgram::RoleBinding*> by_role;
  for (const auto& r : pred.roles) by_role.emplace(r.role, &r);

  for (const auto& g : gt.roles) {
    RoleResult result;
    result.role = g.role;
    result.gt_grounded = !g.box.is_sentinel();
    auto it = by_role.find(g.role);
    if (gate && it != by_role.end()) {
      const auto& p = *it->second;
      result.value_ok = p.entity_label == g.entity_label;
      result.grnd_ok = result.value_ok && result.gt_grounded &&
                       geom::IouAtLeast(p.box, g.box, threshold);
    }
    score.role_results.push_back(std::move(result));
  }
  return score;
}

SggReport AggregateSgg(std::span<const BinarySampleScore> samples,
                       bool pooled_mrecall) {
  if (samples.empty()) throw Error(ErrorCode::kNoSamples, "no SGG samples");
  SggReport report;
  report.sample_count = static_cast<int>(samples.size());
  double recall = 0;
  double mrecall = 0;
  std::map<std::string, PredicateTally> pooled;
  for (const auto& s : samples) {
    recall += s.recall;
    mrecall += s.mean_recall;
    for (const auto& [name, tally] : s.per_predicate) {
      pooled[name].matched += tally.matched;
      pooled[name].total += tally.total;
    }
  }
  const double n = static_cast<double>(samples.size());
  report.recall = 100.0 * recall / n;
  if (pooled_mrecall) {
    double sum = 0;
    for (const auto& [name, tally] : pooled) {
      sum += static_cast<double>(tally.matched) / tally.total;
    }
    report.mrecall = 100.0 * sum / static_cast<double>(pooled.size());
  } else {
    report.mrecall = 100.0 * mrecall / n;
  }
  report.mean = (report.recall + report.mrecall) / 2.0;
  return report;
}

GsrReport AggregateGsr(std::span<const GsrSampleScore> samples) {
  if (samples.empty()) throw Error(ErrorCode::kNoSamples, "no GSR samples");
  GsrReport report;
  report.sample_count = static_cast<int>(samples.size());
  double verb = 0, value = 0, value_all = 0, grnd = 0, grnd_all = 0;
  for (const auto& s : samples) {
    verb += s.verb_correct;
    value += s.entity_value();
    value_all += s.all_values_ok();
    if (s.grounded_roles() > 0) {
      ++report.grounded_sample_count;
      grnd += s.grounded_value();
      grnd_all += s.all_grounded_ok();
    }
  }
  const double n = static_cast<double>(samples.size());
  report.verb = 100.0 * verb / n;
  report.value = 100.0 * value / n;
  report.value_all = 100.0 * value_all / n;
  if (report.grounded_sample_count > 0) {
    report.grnd = 100.0 * grnd / report.grounded_sample_count;
    report.grnd_all = 100.0 * grnd_all / report.grounded_sample_count;
  }
  return report;
}

}  // namespace relr1::metrics
