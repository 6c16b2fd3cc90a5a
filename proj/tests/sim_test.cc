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
#include <random>
#include <sstream>

#include "doctest.h"
#include "relr1/error.h"
#include "relr1/sim.h"
#include "sim_fixtures.h"

using namespace relr1::sim;
using relr1::grpo::Aggregation;
using relr1::grpo::GrpoConfig;
using namespace relr1::testing;

namespace {

bool SamePolicy(const ChoicePolicy& a, const ChoicePolicy& b) {
  if (a.tables.size() != b.tables.size()) return false;
  for (size_t t = 0; t < a.tables.size(); ++t) {
    if (a.tables[t].data() != b.tables[t].data()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("world") {
  TEST_CASE("deterministic per seed") {
    for (auto task : {TaskKind::kBinary, TaskKind::kNary}) {
      const auto a = GenWorld(7, task), b = GenWorld(7, task);
      CHECK(a.entities.size() == b.entities.size());
      CHECK(a.roles.size() == b.roles.size());
      CHECK(a.verb == b.verb);
      std::mt19937_64 r1(1), r2(1);
      CHECK(SampleResponse(ChoicePolicy::Initial(), a, r1).text ==
            SampleResponse(ChoicePolicy::Initial(), b, r2).text);
    }
  }

  TEST_CASE("ranges and validity") {
    const auto& catalog = Catalog::Default();
    for (uint64_t seed = 0; seed < 500; ++seed) {
      const auto b = GenWorld(seed, TaskKind::kBinary);
      CHECK(b.entities.size() >= 2);
      CHECK(b.entities.size() <= 4);
      CHECK(b.relations.size() >= 1);
      CHECK(b.relations.size() <= 3);
      for (const auto& e : b.entities) {
        CHECK(e.box.x1() >= 0);
        CHECK(e.box.y1() >= 0);
        CHECK(e.box.x2() <= kGridSize);
        CHECK(e.box.y2() <= kGridSize);
        CHECK(relr1::geom::Area(e.box) > 0);
      }
      const auto triplets = std::get<relr1::reward::BinaryTruth>(b.Truth(catalog)).triplets;
      CHECK(triplets.size() == b.relations.size());
      // The ground truth survives a caption round trip.
      const auto caption = relr1::relgram::CaptionFromTriplets(triplets);
      const auto parsed = relr1::relgram::ParseSceneGraphCaption(
          relr1::relgram::SerializeCaption(caption));
      REQUIRE(parsed.clean());
      CHECK(relr1::relgram::ExtractTriplets(parsed.value).value == triplets);

      const auto n = GenWorld(seed, TaskKind::kNary);
      CHECK(n.roles.size() >= 2);
      CHECK(n.roles.size() <= 4);
      int sentinels = 0;
      for (const auto& r : n.roles) sentinels += r.box.is_sentinel();
      CHECK(sentinels <= 1);
      const auto frame = std::get<relr1::reward::NaryTruth>(n.Truth(catalog)).frame;
      const auto back = relr1::relgram::ParseSituationFrame(
          relr1::relgram::SerializeFrame(frame), catalog.Lexicon());
      REQUIRE(back.clean());
      CHECK(back.value.verb == frame.verb);
      CHECK(back.value.roles == frame.roles);
    }
  }
}

TEST_SUITE("sampling") {
  TEST_CASE("uniform policy gives -ln k per choice") {
    const auto uniform = ChoicePolicy::Uniform();
    for (auto task : {TaskKind::kBinary, TaskKind::kNary}) {
      std::mt19937_64 rng(3);
      for (uint64_t seed = 0; seed < 50; ++seed) {
        const auto r = SampleResponse(uniform, GenWorld(seed, task), rng);
        REQUIRE(r.logp.size() == r.choices.size());
        for (size_t i = 0; i < r.choices.size(); ++i) {
          const int k = uniform.table(r.choices[i].slot).cols();
          CHECK(r.logp[i] == doctest::Approx(-std::log(double(k))).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("one-hot policy is deterministic") {
    ChoicePolicy p = ChoicePolicy::Uniform();
    for (auto& t : p.tables) {
      for (int r = 0; r < t.rows(); ++r) t.at(r, r % t.cols()) = 60;
    }
    const auto world = GenWorld(4, TaskKind::kBinary);
    std::mt19937_64 rng(9);
    const auto first = SampleResponse(p, world, rng);
    for (int i = 0; i < 20; ++i) {
      const auto r = SampleResponse(p, world, rng);
      CHECK(r.text == first.text);
      for (double lp : r.logp) CHECK(lp > -1e-20);
    }
  }

  TEST_CASE("samples are well formed and parse") {
    const auto& catalog = Catalog::Default();
    const auto lexicon = catalog.Lexicon();
    ChoicePolicy p = ChoicePolicy::Uniform();
    std::mt19937_64 rng(5);
    for (auto task : {TaskKind::kBinary, TaskKind::kNary}) {
      for (uint64_t seed = 0; seed < 300; ++seed) {
        const auto world = GenWorld(seed, task);
        const auto r = SampleResponse(p, world, rng);
        const auto b = relr1::reward::TotalReward(r.text, world.Truth(catalog), {}, &lexicon);
        CHECK(b.format == 1);
        CHECK_FALSE(b.task_mismatch);
        CHECK(ChoiceLogProbs(p, r.choices) == r.logp);
      }
    }
  }

  TEST_CASE("choices outside the tables are rejected") {
    const auto p = ChoicePolicy::Uniform();
    CHECK_THROWS_AS(ChoiceLogProbs(p, {{Slot::kPredicate, 0, 999}}), relr1::Error);
    CHECK_THROWS_AS(ChoiceLogProbs(p, {{Slot::kPredicate, -1, 0}}), relr1::Error);
  }
}

TEST_SUITE("gradient") {
  TEST_CASE("matches central differences") {
    for (auto task : {TaskKind::kBinary, TaskKind::kNary}) {
      for (auto agg : {Aggregation::kResponse, Aggregation::kTokenMean}) {
        for (uint64_t seed = 1; seed <= 6; ++seed) {
          const Fixture f = RandomFixture(task, seed * 101 + static_cast<int>(task));
          GrpoConfig cfg;
          cfg.aggregation = agg;
          cfg.kl_coeff = 0.1;
          CAPTURE(seed);
          CHECK(WorstRelativeError(f, cfg) < 1e-5);
        }
      }
    }
  }

  TEST_CASE("zero variance and no kl gives zero gradient") {
    Fixture f = RandomFixture(TaskKind::kBinary, 77);
    for (auto& s : f.group.group.samples) s.reward = 1.0;
    GrpoConfig cfg;
    cfg.kl_coeff = 0;
    for (const auto& t : GradObjective(f.policy, f.group, cfg).tables) {
      for (double d : t.data()) CHECK(d == 0.0);
    }
  }

  TEST_CASE("reduces to REINFORCE with a baseline on-policy") {
    for (auto task : {TaskKind::kBinary, TaskKind::kNary}) {
      Fixture f = RandomFixture(task, 55);
      // On-policy: the current policy is the sampling policy.
      for (size_t i = 0; i < f.group.choices.size(); ++i) {
        f.group.group.samples[i].logp_old = ChoiceLogProbs(f.policy, f.group.choices[i]);
      }
      GrpoConfig cfg;
      cfg.kl_coeff = 0;
      std::vector<double> rewards;
      for (const auto& s : f.group.group.samples) rewards.push_back(s.reward);
      const auto adv = relr1::grpo::Advantages(rewards);

      // (1/G) sum_i A_i grad log pi(o_i), with grad log softmax = onehot - p.
      ChoicePolicy expected = f.policy;
      for (auto& t : expected.tables) std::fill(t.data().begin(), t.data().end(), 0.0);
      const double g = static_cast<double>(adv.size());
      for (size_t i = 0; i < adv.size(); ++i) {
        for (const auto& c : f.group.choices[i]) {
          const auto probs = f.policy.table(c.slot).Probabilities(c.row);
          for (int k = 0; k < int(probs.size()); ++k) {
            expected.table(c.slot).at(c.row, k) += adv[i] / g * ((k == c.col) - probs[k]);
          }
        }
      }
      const auto grad = GradObjective(f.policy, f.group, cfg);
      for (size_t t = 0; t < grad.tables.size(); ++t) {
        for (size_t k = 0; k < grad.tables[t].data().size(); ++k) {
          CHECK(grad.tables[t].data()[k] ==
                doctest::Approx(expected.tables[t].data()[k]).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("provenance mismatch") {
    Fixture f = RandomFixture(TaskKind::kNary, 8);
    f.group.choices[0].push_back({Slot::kVerb, 0, 9999});
    CHECK_THROWS_AS(GradObjective(f.policy, f.group, {}), relr1::Error);
  }
}

TEST_SUITE("training") {
  TEST_CASE("validation") {
    TrainConfig cfg;
    cfg.group_size = 1;
    CHECK_THROWS_AS(Train(cfg), relr1::Error);
    cfg = {};
    cfg.steps = 0;
    CHECK_THROWS_AS(Train(cfg), relr1::Error);
    cfg = {};
    cfg.learning_rate = -1;
    CHECK_THROWS_AS(Train(cfg), relr1::Error);
  }

  TEST_CASE("zero learning rate leaves the policy and reward flat") {
    TrainConfig cfg;
    cfg.learning_rate = 0;
    cfg.steps = 600;
    const auto r = Train(cfg);
    CHECK(r.trace.size() == 600);
    CHECK(SamePolicy(r.final_policy, r.reference_policy));
    const double first = WindowMeanTaskReward(r.trace, 0, 300);
    const double last = WindowMeanTaskReward(r.trace, 300, 600);
    CHECK(std::abs(last - first) < 0.05);
    for (const auto& row : r.trace) CHECK(row.mean_kl == 0.0);
  }

  TEST_CASE("deterministic traces and a frozen reference") {
    TrainConfig cfg;
    cfg.task = TaskKind::kNary;
    cfg.steps = 300;
    const auto a = Train(cfg), b = Train(cfg);
    std::ostringstream x, y;
    WriteTraceCsv(x, a.trace);
    WriteTraceCsv(y, b.trace);
    CHECK(x.str() == y.str());
    CHECK(x.str().rfind(std::string(kTraceHeader) + "\n", 0) == 0);
    CHECK(SamePolicy(a.reference_policy, ChoicePolicy::Initial()));
    CHECK_FALSE(SamePolicy(a.final_policy, a.reference_policy));
  }

  TEST_CASE("reward rises under the default configuration") {
    TrainConfig cfg;
    const auto r = Train(cfg);
    const double first = WindowMeanTaskReward(r.trace, 0, 100);
    const double last = WindowMeanTaskReward(r.trace, r.trace.size() - 100, r.trace.size());
    CHECK(last - first >= 0.3);
  }
}
