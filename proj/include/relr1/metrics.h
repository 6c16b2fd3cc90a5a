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

#ifndef RELR1_METRICS_H_
#define RELR1_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relr1/geom.h"
#include "relr1/relgram.h"

namespace relr1::metrics {

using geom::Ratio;
using relgram::SituationFrame;
using relgram::Triplet;

inline const Ratio kDefaultIouThreshold{1, 2};

// Labels equal and both subject and object IoU >= threshold.
bool Compatible(const Triplet& pred, const Triplet& gt, const Ratio& threshold);

// Maximum-cardinality one-to-one matching over the compatibility relation.
// Among maximum matchings, the one whose sorted (pred, gt) pair list is
// lexicographically smallest. Returned pairs are sorted by pred index.
std::vector<std::pair<size_t, size_t>> MatchTriplets(
    std::span<const Triplet> pred, std::span<const Triplet> gt,
    const Ratio& threshold);

struct PredicateTally {
  int matched = 0;
  int total = 0;
};

struct BinarySampleScore {
  double recall = 0;       // R
  double mean_recall = 0;  // mR, over predicates present in the ground truth
  std::map<std::string, PredicateTally> per_predicate;
};

// Throws Error(kEmptyGroundTruth) when gt is empty.
BinarySampleScore ScoreSggSample(std::span<const Triplet> pred,
                                 std::span<const Triplet> gt,
                                 const Ratio& threshold);

struct RoleResult {
  std::string role;
  bool value_ok = false;
  bool grnd_ok = false;
  bool gt_grounded = false;
};

struct GsrSampleScore {
  bool verb_correct = false;
  std::vector<RoleResult> role_results;

  // V_e: fraction of gt roles with value_ok.
  double entity_value() const;
  // V_grnd: fraction of grounded gt roles with grnd_ok; 0 when none are
  // grounded.
  double grounded_value() const;
  int grounded_roles() const;
  bool all_values_ok() const;
  bool all_grounded_ok() const;
};

// Pred roles are looked up by role name; the first occurrence wins.
GsrSampleScore ScoreGsrSample(const SituationFrame& pred,
                              const SituationFrame& gt, const Ratio& threshold,
                              bool verb_constraint);

// Percentages in [0, 100].
struct SggReport {
  double recall = 0;
  double mrecall = 0;
  double mean = 0;
  int sample_count = 0;
};

struct GsrReport {
  double verb = 0;
  double value = 0;
  double value_all = 0;
  double grnd = 0;
  double grnd_all = 0;
  int sample_count = 0;
  // Samples with at least one grounded gt role; the grnd and grnd-all
  // denominators.
  int grounded_sample_count = 0;
};

// sgg.mrecall averages per-sample mR unless pooled, in which case
// per-predicate matched/total are summed over the corpus first.
// Throws Error(kNoSamples) on an empty span.
SggReport AggregateSgg(std::span<const BinarySampleScore> samples,
                       bool pooled_mrecall = false);
GsrReport AggregateGsr(std::span<const GsrSampleScore> samples);

}  // namespace relr1::metrics

#endif  // RELR1_METRICS_H_
