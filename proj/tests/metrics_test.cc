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
#include <numeric>
#include <random>

#include "doctest.h"
#include "relr1/error.h"
#include "relr1/metrics.h"

using namespace relr1::metrics;
using relr1::geom::BoundingBox;
using relr1::relgram::RoleBinding;

namespace {

using Pairs = std::vector<std::pair<size_t, size_t>>;

const BoundingBox kA(0, 0, 10, 10);
const BoundingBox kB(20, 20, 40, 40);
const BoundingBox kC(0, 30, 30, 60);

// Every maximum matching by exhaustive search over injective assignments.
void Enumerate(const std::vector<Triplet>& pred, const std::vector<Triplet>& gt,
               size_t i, std::vector<bool>& used, Pairs& current,
               std::vector<Pairs>& best, size_t& best_size) {
  if (i == pred.size()) {
    if (current.size() > best_size) {
      best_size = current.size();
      best.clear();
    }
    if (current.size() == best_size) best.push_back(current);
    return;
  }
  Enumerate(pred, gt, i + 1, used, current, best, best_size);
  for (size_t j = 0; j < gt.size(); ++j) {
    if (used[j] || !Compatible(pred[i], gt[j], kDefaultIouThreshold)) continue;
    used[j] = true;
    current.push_back({i, j});
    Enumerate(pred, gt, i + 1, used, current, best, best_size);
    current.pop_back();
    used[j] = false;
  }
}

Pairs BruteForce(const std::vector<Triplet>& pred, const std::vector<Triplet>& gt) {
  std::vector<bool> used(gt.size(), false);
  Pairs current;
  std::vector<Pairs> best;
  size_t best_size = 0;
  Enumerate(pred, gt, 0, used, current, best, best_size);
  return *std::min_element(best.begin(), best.end());
}

// Dense compatibility: few labels, few boxes, small jitter.
Triplet RandomTriplet(std::mt19937_64& rng) {
  static const std::vector<std::string> labels = {"person", "cup"};
  static const std::vector<std::string> preds = {"on", "holding"};
  static const std::vector<BoundingBox> boxes = {kA, kB, BoundingBox(0, 0, 10, 6)};
  auto pick = [&](const auto& v) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
  };
  return {pick(labels), pick(boxes), pick(preds), pick(labels), pick(boxes)};
}

GsrSampleScore ScoreFrames(const SituationFrame& pred, const SituationFrame& gt,
                           bool constraint = true) {
  return ScoreGsrSample(pred, gt, kDefaultIouThreshold, constraint);
}

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("identity matches") {
    const std::vector<Triplet> t = {{"person", kA, "on", "bench", kB}};
    CHECK(MatchTriplets(t, t, kDefaultIouThreshold) == Pairs{{0, 0}});
  }

  TEST_CASE("subject IoU below one half does not match") {
    const std::vector<Triplet> gt = {{"person", kA, "on", "bench", kB}};
    // [0,0,10,4] against [0,0,10,10]: IoU 0.4.
    const std::vector<Triplet> pred = {{"person", BoundingBox(0, 0, 10, 4), "on", "bench", kB}};
    CHECK(MatchTriplets(pred, gt, kDefaultIouThreshold).empty());
    // [0,0,10,5]: IoU exactly 0.5 matches.
    const std::vector<Triplet> half = {{"person", BoundingBox(0, 0, 10, 5), "on", "bench", kB}};
    CHECK(MatchTriplets(half, gt, kDefaultIouThreshold).size() == 1);
  }

  TEST_CASE("labels must agree") {
    const std::vector<Triplet> gt = {{"person", kA, "on", "bench", kB}};
    CHECK(MatchTriplets(std::vector<Triplet>{{"person", kA, "beside", "bench", kB}}, gt,
                        kDefaultIouThreshold)
              .empty());
    CHECK(MatchTriplets(std::vector<Triplet>{{"man", kA, "on", "bench", kB}}, gt,
                        kDefaultIouThreshold)
              .empty());
  }

  TEST_CASE("greedy would fail; maximum matching does not") {
    // pred 0 fits both gts, pred 1 only gt 0.
    const Triplet loose{"person", kA, "on", "cup", kB};
    const std::vector<Triplet> gt = {loose, {"person", BoundingBox(0, 0, 10, 6), "on", "cup", kB}};
    const std::vector<Triplet> pred = {{"person", BoundingBox(0, 0, 10, 8), "on", "cup", kB},
                                       loose};
    // pred0 [0,0,10,8]: IoU 0.8 with gt0, 0.75 with gt1; pred1: 1.0 with gt0, 0.6 with gt1.
    const auto m = MatchTriplets(pred, gt, kDefaultIouThreshold);
    CHECK(m.size() == 2);
    CHECK(m == Pairs{{0, 0}, {1, 1}});
  }

  TEST_CASE("random samples match the exhaustive oracle") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 400; ++n) {
      std::vector<Triplet> pred, gt;
      const int np = std::uniform_int_distribution<int>(0, 6)(rng);
      const int ng = std::uniform_int_distribution<int>(0, 6)(rng);
      for (int i = 0; i < np; ++i) pred.push_back(RandomTriplet(rng));
      for (int i = 0; i < ng; ++i) gt.push_back(RandomTriplet(rng));
      const Pairs m = MatchTriplets(pred, gt, kDefaultIouThreshold);
      const Pairs oracle = BruteForce(pred, gt);
      REQUIRE(m.size() == oracle.size());
      CHECK(m == oracle);  // lexicographically smallest among maximum matchings
      std::vector<bool> seen_p(np), seen_g(ng);
      for (auto [p, g] : m) {
        CHECK_FALSE(seen_p[p]);
        CHECK_FALSE(seen_g[g]);
        seen_p[p] = seen_g[g] = true;
        CHECK(Compatible(pred[p], gt[g], kDefaultIouThreshold));
      }
    }
  }
}

TEST_SUITE("sgg scores") {
  const std::vector<Triplet> gt = {{"cup", kA, "on", "table", kB},
                                   {"dog", kB, "beside", "tree", kC}};

  TEST_CASE("half of the predicates recalled") {
    const std::vector<Triplet> pred = {gt[0]};
    const auto s = ScoreSggSample(pred, gt, kDefaultIouThreshold);
    CHECK(s.recall == 0.5);
    CHECK(s.mean_recall == 0.5);
    CHECK(s.per_predicate.at("on").matched == 1);
    CHECK(s.per_predicate.at("beside").total == 1);
  }

  TEST_CASE("perfect and empty predictions") {
    const auto perfect = ScoreSggSample(gt, gt, kDefaultIouThreshold);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.mean_recall == 1.0);
    const auto none = ScoreSggSample({}, gt, kDefaultIouThreshold);
    CHECK(none.recall == 0.0);
    CHECK(none.mean_recall == 0.0);
  }

  TEST_CASE("mean recall differs from recall on skewed predicates") {
    const std::vector<Triplet> skew = {gt[0], {"cup", kC, "on", "table", kB},
                                       {"cup", kB, "on", "table", kA}, gt[1]};
    // on: 3/3, beside: 0/1 -> R 3/4, mR 1/2.
    const std::vector<Triplet> pred = {skew[0], skew[1], skew[2]};
    const auto s = ScoreSggSample(pred, skew, kDefaultIouThreshold);
    CHECK(s.recall == 0.75);
    CHECK(s.mean_recall == 0.5);
  }

  TEST_CASE("empty ground truth is an error") {
    CHECK_THROWS_AS(ScoreSggSample(gt, {}, kDefaultIouThreshold), relr1::Error);
  }

  TEST_CASE("scores ignore input order") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 100; ++n) {
      std::vector<Triplet> p, g;
      for (int i = 0; i < 5; ++i) p.push_back(RandomTriplet(rng));
      for (int i = 0; i < 5; ++i) g.push_back(RandomTriplet(rng));
      const auto a = ScoreSggSample(p, g, kDefaultIouThreshold);
      std::shuffle(p.begin(), p.end(), rng);
      std::shuffle(g.begin(), g.end(), rng);
      const auto b = ScoreSggSample(p, g, kDefaultIouThreshold);
      CHECK(a.recall == b.recall);
      CHECK(a.mean_recall == b.mean_recall);
    }
  }

  TEST_CASE("adding a prediction never lowers recall") {
    std::mt19937_64 rng(10);
    for (int n = 0; n < 100; ++n) {
      std::vector<Triplet> p, g;
      for (int i = 0; i < 3; ++i) p.push_back(RandomTriplet(rng));
      for (int i = 0; i < 4; ++i) g.push_back(RandomTriplet(rng));
      const auto before = ScoreSggSample(p, g, kDefaultIouThreshold);
      p.push_back(g[n % 4]);
      const auto after = ScoreSggSample(p, g, kDefaultIouThreshold);
      CHECK(after.recall >= before.recall);
      CHECK(after.mean_recall >= before.mean_recall);
    }
  }
}

TEST_SUITE("gsr scores") {
  SituationFrame Gt() {
    SituationFrame f;
    f.verb = "drinking";
    f.roles = {{"agent", "man", kA},
               {"liquid", "milk", BoundingBox(20, 20, 30, 30)},
               {"container", "cup", BoundingBox(40, 40, 50, 50)}};
    return f;
  }

  TEST_CASE("identity scores one everywhere") {
    const auto s = ScoreFrames(Gt(), Gt());
    CHECK(s.verb_correct);
    CHECK(s.entity_value() == 1.0);
    CHECK(s.grounded_value() == 1.0);
    CHECK(s.all_values_ok());
    CHECK(s.all_grounded_ok());
  }

  TEST_CASE("partial frame: two values, one grounding") {
    SituationFrame pred = Gt();
    pred.roles[0].box = BoundingBox(0, 0, 10, 6);      // IoU 0.6
    pred.roles[1].entity_label = "water";              // wrong noun
    pred.roles[2].box = BoundingBox(40, 40, 50, 43);   // IoU 0.3
    const auto s = ScoreFrames(pred, Gt());
    CHECK(s.entity_value() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(s.grounded_value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  TEST_CASE("wrong verb zeroes roles under the constraint only") {
    SituationFrame pred = Gt();
    pred.verb = "pouring";
    const auto constrained = ScoreFrames(pred, Gt(), true);
    CHECK_FALSE(constrained.verb_correct);
    CHECK(constrained.entity_value() == 0.0);
    CHECK(constrained.grounded_value() == 0.0);
    const auto free = ScoreFrames(pred, Gt(), false);
    CHECK(free.entity_value() == 1.0);
    CHECK(free.grounded_value() == 1.0);
  }

  TEST_CASE("role names must match") {
    SituationFrame pred = Gt();
    pred.roles[0].role = "drinker";
    CHECK(ScoreFrames(pred, Gt()).entity_value() == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("first duplicate role wins") {
    SituationFrame pred = Gt();
    pred.roles.insert(pred.roles.begin(), RoleBinding{"agent", "woman", kA});
    CHECK_FALSE(ScoreFrames(pred, Gt()).role_results[0].value_ok);
  }

  TEST_CASE("sentinel roles are excluded from grounding") {
    SituationFrame gt = Gt();
    gt.roles[2].box = BoundingBox::Sentinel();
    SituationFrame pred = Gt();
    pred.roles[2].box = BoundingBox::Sentinel();
    const auto s = ScoreFrames(pred, gt);
    CHECK(s.grounded_roles() == 2);
    CHECK(s.grounded_value() == 1.0);
    CHECK(s.all_grounded_ok());
    CHECK_FALSE(s.role_results[2].grnd_ok);
  }
}

TEST_SUITE("aggregate") {
  TEST_CASE("recall is the sample mean") {
    BinarySampleScore one, zero;
    one.recall = one.mean_recall = 1.0;
    const std::vector<BinarySampleScore> s = {one, zero};
    const auto r = AggregateSgg(s);
    CHECK(r.recall == 50.0);
    CHECK(r.mean == 50.0);
    CHECK(r.sample_count == 2);
  }

  TEST_CASE("pooled mean recall sums tallies first") {
    BinarySampleScore a, b;
    a.per_predicate["on"] = {1, 1};
    a.mean_recall = 1.0;
    b.per_predicate["on"] = {0, 3};
    b.per_predicate["beside"] = {1, 1};
    b.mean_recall = 0.5;
    const std::vector<BinarySampleScore> s = {a, b};
    CHECK(AggregateSgg(s, false).mrecall == 75.0);
    // on 1/4, beside 1/1.
    CHECK(AggregateSgg(s, true).mrecall == doctest::Approx(62.5));
  }

  TEST_CASE("grnd-all skips sentinel-only samples") {
    GsrSampleScore grounded;
    grounded.verb_correct = true;
    grounded.role_results = {{"agent", true, true, true},
                             {"place", true, false, false},
                             {"tool", true, true, true}};
    GsrSampleScore ungrounded;
    ungrounded.verb_correct = true;
    ungrounded.role_results = {{"agent", true, false, false}};
    const std::vector<GsrSampleScore> s = {grounded, ungrounded};
    const auto r = AggregateGsr(s);
    CHECK(r.grnd == 100.0);
    CHECK(r.grnd_all == 100.0);
    CHECK(r.grounded_sample_count == 1);
    CHECK(r.value_all == 100.0);
  }

  TEST_CASE("empty input") {
    CHECK_THROWS_AS(AggregateSgg({}), relr1::Error);
    CHECK_THROWS_AS(AggregateGsr({}), relr1::Error);
  }
}
