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
#include <random>

#include "relr1/sim.h"

namespace relr1::sim {

const Catalog& Catalog::Default() {
  static const Catalog* catalog = new Catalog{
      {"person", "bench", "table", "cup", "dog", "car", "tree", "umbrella"},
      {"on", "beside", "holding", "in front of", "behind", "under"},
      {"drinking", "riding", "cutting", "carrying", "feeding", "grilling"},
      {{"agent", "liquid", "container", "place"},
       {"agent", "vehicle", "place"},
       {"agent", "item", "tool", "place"},
       {"agent", "item", "place"},
       {"agent", "food", "recipient", "place"},
       {"agent", "food", "tool", "place"}},
      {"man", "woman", "child", "milk", "cup", "horse", "bicycle", "knife",
       "bread", "grill"},
  };
  return *catalog;
}

relgram::VerbLexicon Catalog::Lexicon() const {
  return relgram::VerbLexicon::FromVerbs(verbs);
}

uint64_t MixSeed(uint64_t a, uint64_t b) {
  uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

int Uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

geom::BoundingBox RandomBox(std::mt19937_64& rng) {
  const int w = Uniform(rng, 20, 40);
  const int h = Uniform(rng, 20, 40);
  const int x = Uniform(rng, 0, kGridSize - w);
  const int y = Uniform(rng, 0, kGridSize - h);
  return geom::BoundingBox(x, y, x + w, y + h);
}

}  // namespace

ToyWorld GenWorld(uint64_t seed, TaskKind task, const Catalog& catalog) {
  std::mt19937_64 rng(MixSeed(seed, task == TaskKind::kBinary ? 1 : 2));
  ToyWorld world;
  world.world_id = seed;
  world.task = task;
  if (task == TaskKind::kBinary) {
    const int n = Uniform(rng, 2, 4);
    for (int i = 0; i < n; ++i) {
      world.entities.push_back(
          {Uniform(rng, 0, static_cast<int>(catalog.object_labels.size()) - 1),
           RandomBox(rng)});
    }
    std::vector<std::pair<int, int>> pairs;
    for (int s = 0; s < n; ++s) {
      for (int o = 0; o < n; ++o) {
        if (s != o) pairs.emplace_back(s, o);
      }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const int m = Uniform(rng, 1, std::min<int>(3, static_cast<int>(pairs.size())));
    for (int k = 0; k < m; ++k) {
      world.relations.push_back(
          {pairs[k].first, pairs[k].second,
           Uniform(rng, 0, static_cast<int>(catalog.predicates.size()) - 1)});
    }
  } else {
    world.verb = Uniform(rng, 0, static_cast<int>(catalog.verbs.size()) - 1);
    const int available = static_cast<int>(catalog.verb_roles[world.verb].size());
    const int k = Uniform(rng, 2, std::min(4, available));
    for (int r = 0; r < k; ++r) {
      world.roles.push_back(
          {r, Uniform(rng, 0, static_cast<int>(catalog.nouns.size()) - 1),
           RandomBox(rng)});
    }
    // The last role is sometimes not visible in the image.
    if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3) {
      world.roles.back().box = geom::BoundingBox::Sentinel();
    }
  }
  return world;
}

reward::GroundTruth ToyWorld::Truth(const Catalog& catalog) const {
  if (task == TaskKind::kBinary) {
    reward::BinaryTruth truth;
    for (const auto& r : relations) {
      const auto& s = entities[r.subject];
      const auto& o = entities[r.object];
      truth.triplets.push_back({catalog.object_labels[s.label], s.box,
                                catalog.predicates[r.predicate],
                                catalog.object_labels[o.label], o.box});
    }
    return truth;
  }
  reward::NaryTruth truth;
  truth.frame.verb = catalog.verbs[verb];
  for (const auto& r : roles) {
    truth.frame.roles.push_back(
        {catalog.verb_roles[verb][r.role], catalog.nouns[r.noun], r.box});
  }
  truth.frame.raw_text = relgram::SerializeFrame(truth.frame);
  return truth;
}

}  // namespace relr1::sim
