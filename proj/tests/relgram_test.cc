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

#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.h"
#include "relr1/error.h"
#include "relr1/relgram.h"

using namespace relr1::relgram;
using relr1::geom::BoundingBox;

namespace {

bool HasKind(const std::vector<Diagnostic>& d, DiagnosticKind kind) {
  for (const auto& x : d) {
    if (x.kind == kind) return true;
  }
  return false;
}

std::string ReadGolden(const std::string& name) {
  std::ifstream in(std::string(RELR1_SOURCE_DIR) + "/tests/golden/" + name,
                   std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("envelope") {
  TEST_CASE("well-formed envelope splits verbatim") {
    const Envelope env = ParseEnvelope("<think>t</think><answer>a</answer>");
    CHECK(env.well_formed);
    CHECK(env.think == "t");
    CHECK(env.answer == "a");
  }

  TEST_CASE("whitespace outside the blocks is allowed") {
    const Envelope env = ParseEnvelope("\n <think> </think>\n<answer> a </answer>\n");
    CHECK(env.well_formed);
    CHECK(env.think == " ");
    CHECK(env.answer == " a ");
  }

  TEST_CASE("malformed envelopes") {
    CHECK_FALSE(ParseEnvelope("a").well_formed);
    CHECK(ParseEnvelope("a").answer == "a");
    CHECK_FALSE(ParseEnvelope("<think>t</think><answer>a</answer> trailing").well_formed);
    CHECK_FALSE(ParseEnvelope("<think>t</think><answer>a").well_formed);
    CHECK(ParseEnvelope("<think>t</think><answer>a").answer == "a");
    CHECK_FALSE(ParseEnvelope("<answer>a</answer><think>t</think>").well_formed);
    CHECK_FALSE(
        ParseEnvelope("<think>t</think><answer>a</answer><answer>b</answer>").well_formed);
    CHECK_FALSE(ParseEnvelope("x<think>t</think><answer>a</answer>").well_formed);
  }

  TEST_CASE("diagnostics point at the first violation") {
    auto d = EnvelopeDiagnostics("<think>t</think>  oops<answer>a</answer>");
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == DiagnosticKind::kSyntax);
    CHECK(d[0].offset == 18);
    d = EnvelopeDiagnostics("<think>t</think><answer>a");
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == DiagnosticKind::kDanglingTag);
    CHECK(d[0].offset == 16);
    CHECK(EnvelopeDiagnostics("<think></think><answer></answer>").empty());
  }

  TEST_CASE("diagnostics are empty exactly when well formed") {
    // Random strings over the tag alphabet hit every branch.
    const std::vector<std::string> atoms = {"<think>", "</think>", "<answer>",
                                            "</answer>", " ", "x", "\n"};
    std::mt19937_64 rng(7);
    for (int n = 0; n < 5000; ++n) {
      std::string s;
      for (int k = relr1::testing::Uniform(rng, 0, 8); k > 0; --k) {
        s += relr1::testing::Pick(rng, atoms);
      }
      INFO(s);
      CHECK(EnvelopeDiagnostics(s).empty() == ParseEnvelope(s).well_formed);
    }
  }

  TEST_CASE("MakeEnvelope output parses back") {
    const Envelope env = ParseEnvelope(MakeEnvelope("why", "what"));
    CHECK(env.well_formed);
    CHECK(env.think == "why");
    CHECK(env.answer == "what");
  }
}

TEST_SUITE("caption") {
  TEST_CASE("entity with a nested box group") {
    auto p = ParseSceneGraphCaption("<ref>person</ref><box>[[1,2,3,4]]</box>");
    CHECK(p.clean());
    REQUIRE(p.value.entities.size() == 1);
    CHECK(p.value.entities[0].label == "person");
    CHECK(p.value.entities[0].boxes == std::vector<BoundingBox>{BoundingBox(1, 2, 3, 4)});
  }

  TEST_CASE("empty caption is valid") {
    auto p = ParseSceneGraphCaption("");
    CHECK(p.clean());
    CHECK(p.value.entities.empty());
    CHECK(p.value.predicates.empty());
  }

  TEST_CASE("predicate with subject and object groups") {
    auto p = ParseSceneGraphCaption("<pred>on</pred><box>[[1,1,2,2]]</box><box>[[3,3,4,4]]</box>");
    CHECK(p.clean());
    REQUIRE(p.value.predicates.size() == 1);
    const auto& m = p.value.predicates[0];
    CHECK(m.predicate == "on");
    CHECK(m.subject_boxes == std::vector<BoundingBox>{BoundingBox(1, 1, 2, 2)});
    CHECK(m.object_boxes == std::vector<BoundingBox>{BoundingBox(3, 3, 4, 4)});
  }

  TEST_CASE("labels are normalized") {
    auto p = ParseSceneGraphCaption("<ref>  Dining   TABLE </ref><box>[0,0,5,5]</box>");
    REQUIRE(p.value.entities.size() == 1);
    CHECK(p.value.entities[0].label == "dining table");
  }

  TEST_CASE("several box groups after one ref are concatenated") {
    auto p = ParseSceneGraphCaption(
        "<ref>cups</ref><box>[[1,1,2,2],[3,3,4,4]]</box><box>[5,5,6,6]</box>");
    CHECK(p.clean());
    REQUIRE(p.value.entities.size() == 1);
    CHECK(p.value.entities[0].boxes.size() == 3);
  }

  TEST_CASE("problems become diagnostics with offsets") {
    auto dangling = ParseSceneGraphCaption("a <ref>dog");
    CHECK(HasKind(dangling.diagnostics, DiagnosticKind::kDanglingTag));
    CHECK(dangling.diagnostics[0].offset == 2);

    auto bad_box = ParseSceneGraphCaption("<ref>dog</ref><box>[1,2,x,4]</box>");
    CHECK(HasKind(bad_box.diagnostics, DiagnosticKind::kMalformedBox));
    CHECK(bad_box.value.entities.empty());

    auto no_box = ParseSceneGraphCaption("<ref>dog</ref> runs");
    CHECK(HasKind(no_box.diagnostics, DiagnosticKind::kMissingBox));

    auto inverted = ParseSceneGraphCaption("<ref>dog</ref><box>[5,5,1,1]</box>");
    CHECK(HasKind(inverted.diagnostics, DiagnosticKind::kMalformedBox));

    auto stray = ParseSceneGraphCaption("<box>[1,1,2,2]</box>");
    CHECK(HasKind(stray.diagnostics, DiagnosticKind::kStrayBox));

    auto empty = ParseSceneGraphCaption("<ref> </ref><box>[1,1,2,2]</box>");
    CHECK(HasKind(empty.diagnostics, DiagnosticKind::kEmptyLabel));

    auto one_group = ParseSceneGraphCaption("<pred>on</pred><box>[1,1,2,2]</box>");
    CHECK_FALSE(one_group.clean());
    CHECK(one_group.value.predicates.empty());
  }

  TEST_CASE("arbitrary bytes never throw") {
    std::mt19937_64 rng(11);
    const std::string alphabet = "<>/[],0123456789 refpdboxa-";
    for (int n = 0; n < 2000; ++n) {
      std::string s;
      for (int k = relr1::testing::Uniform(rng, 0, 60); k > 0; --k) {
        s += alphabet[relr1::testing::Uniform(rng, 0, alphabet.size() - 1)];
      }
      CHECK_NOTHROW(ExtractTriplets(ParseSceneGraphCaption(s).value));
      CHECK_NOTHROW(ParseSceneGraphList(s));
    }
  }
}

TEST_SUITE("triplets") {
  TEST_CASE("boxes resolve to entity labels") {
    auto c = ParseSceneGraphCaption(
        "<ref>person</ref><box>[1,1,2,2]</box> <pred>on</pred><box>[1,1,2,2]</box>"
        "<box>[3,3,4,4]</box> <ref>bench</ref><box>[3,3,4,4]</box>");
    auto t = ExtractTriplets(c.value);
    CHECK(t.clean());
    REQUIRE(t.value.size() == 1);
    CHECK(t.value[0] == Triplet{"person", BoundingBox(1, 1, 2, 2), "on", "bench",
                                BoundingBox(3, 3, 4, 4)});
  }

  TEST_CASE("unresolved boxes get the unknown label") {
    auto c = ParseSceneGraphCaption(
        "<pred>on</pred><box>[9,9,10,10]</box><box>[3,3,4,4]</box>"
        "<ref>bench</ref><box>[3,3,4,4]</box>");
    auto t = ExtractTriplets(c.value);
    REQUIRE(t.value.size() == 1);
    CHECK(t.value[0].subject_label == kUnknownLabel);
    CHECK(HasKind(t.diagnostics, DiagnosticKind::kUnresolvedBox));
  }

  TEST_CASE("multiple boxes expand to the Cartesian product") {
    auto c = ParseSceneGraphCaption(
        "<ref>people</ref><box>[[1,1,2,2],[5,5,6,6]]</box>"
        "<pred>beside</pred><box>[[1,1,2,2],[5,5,6,6]]</box><box>[3,3,4,4]</box>"
        "<ref>tree</ref><box>[3,3,4,4]</box>");
    auto t = ExtractTriplets(c.value);
    CHECK(t.clean());
    CHECK(t.value.size() == 2);
  }
}

TEST_SUITE("list") {
  TEST_CASE("one entry") {
    auto p = ParseSceneGraphList(R"([["person", [1,2,3,4], "bench", [5,6,7,8], "on"]])");
    CHECK(p.clean());
    REQUIRE(p.value.size() == 1);
    CHECK(p.value[0] == Triplet{"person", BoundingBox(1, 2, 3, 4), "on", "bench",
                                BoundingBox(5, 6, 7, 8)});
  }

  TEST_CASE("empty list") {
    auto p = ParseSceneGraphList("[]");
    CHECK(p.clean());
    CHECK(p.value.empty());
  }

  TEST_CASE("wrong arity drops the entry") {
    auto p = ParseSceneGraphList(
        R"([["person", [1,2,3,4], "bench", [5,6,7,8]], ['dog', [0,0,1,1], 'cat', [1,1,2,2], 'near']])");
    CHECK(HasKind(p.diagnostics, DiagnosticKind::kArity));
    REQUIRE(p.value.size() == 1);
    CHECK(p.value[0].subject_label == "dog");
  }

  TEST_CASE("garbage is a syntax diagnostic") {
    auto p = ParseSceneGraphList("not a list");
    CHECK_FALSE(p.clean());
    CHECK(p.value.empty());
  }
}

TEST_SUITE("frame") {
  TEST_CASE("verb from a lexicon form") {
    VerbLexicon lex;
    lex.AddForm("drinks", "drinking");
    auto p = ParseSituationFrame(
        "The <agent>child</agent><box>[1,1,5,5]</box> drinks a "
        "<liquid>milk</liquid><box>[2,2,4,4]</box>",
        lex);
    CHECK(p.clean());
    CHECK(p.value.verb == "drinking");
    REQUIRE(p.value.roles.size() == 2);
    CHECK(p.value.roles[0] == RoleBinding{"agent", "child", BoundingBox(1, 1, 5, 5)});
    CHECK(p.value.roles[1] == RoleBinding{"liquid", "milk", BoundingBox(2, 2, 4, 4)});
  }

  TEST_CASE("derived inflections resolve to the class") {
    VerbLexicon lex;
    lex.AddVerb("riding");
    for (const char* w : {"ride", "rides", "riding"}) {
      REQUIRE(lex.Lookup(w).has_value());
      CHECK(*lex.Lookup(w) == "riding");
    }
    lex.AddVerb("cutting");
    CHECK(*lex.Lookup("cuts") == "cutting");
    CHECK(*lex.Lookup("cut") == "cutting");
  }

  TEST_CASE("role without a box is ungrounded") {
    VerbLexicon lex;
    lex.AddVerb("drinking");
    auto p = ParseSituationFrame("drinking: <agent>man</agent> <place>kitchen</place>", lex);
    REQUIRE(p.value.roles.size() == 2);
    CHECK(p.value.roles[1].box.is_sentinel());
  }

  TEST_CASE("empty answer has no verb") {
    VerbLexicon lex;
    lex.AddVerb("drinking");
    auto p = ParseSituationFrame("", lex);
    CHECK(p.value.verb.empty());
    CHECK(p.value.roles.empty());
    CHECK(HasKind(p.diagnostics, DiagnosticKind::kMissingVerb));
  }

  TEST_CASE("duplicate roles keep the first occurrence") {
    VerbLexicon lex;
    lex.AddVerb("drinking");
    auto p = ParseSituationFrame(
        "drinking: <agent>man</agent><box>[1,1,2,2]</box> <agent>woman</agent>", lex);
    CHECK(HasKind(p.diagnostics, DiagnosticKind::kDuplicateRole));
    REQUIRE(p.value.roles.size() == 1);
    CHECK(p.value.roles[0].entity_label == "man");
  }

  TEST_CASE("words inside role tags are not verbs") {
    VerbLexicon lex;
    lex.AddVerb("drinking");
    lex.AddVerb("riding");
    auto p = ParseSituationFrame("<agent>riding club</agent> is drinking", lex);
    CHECK(p.value.verb == "drinking");
  }
}

TEST_SUITE("serialization") {
  TEST_CASE("caption round trip") {
    std::mt19937_64 rng(1);
    for (int n = 0; n < 200; ++n) {
      const SceneGraphCaption c = relr1::testing::RandomCaption(rng);
      auto p = ParseSceneGraphCaption(SerializeCaption(c));
      CHECK(p.clean());
      CHECK(p.value.entities == c.entities);
      CHECK(p.value.predicates == c.predicates);
    }
  }

  TEST_CASE("list round trip") {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 200; ++n) {
      const auto t = relr1::testing::RandomTriplets(rng);
      auto p = ParseSceneGraphList(SerializeList(t));
      CHECK(p.clean());
      CHECK(p.value == t);
    }
  }

  TEST_CASE("frame round trip") {
    const auto verbs = relr1::testing::FrameVerbs();
    const VerbLexicon lex = VerbLexicon::FromVerbs(verbs);
    std::mt19937_64 rng(3);
    for (int n = 0; n < 200; ++n) {
      const SituationFrame f = relr1::testing::RandomFrame(rng);
      auto p = ParseSituationFrame(SerializeFrame(f), lex);
      CHECK(p.clean());
      CHECK(p.value.verb == f.verb);
      CHECK(p.value.roles == f.roles);
    }
  }

  TEST_CASE("empty frame keeps its verb") {
    SituationFrame f;
    f.verb = "standing";
    const std::string text = SerializeFrame(f);
    CHECK(text.find("standing") != std::string::npos);
    CHECK(text.find('<') == std::string::npos);
    VerbLexicon lex;
    lex.AddVerb("standing");
    CHECK(ParseSituationFrame(text, lex).value.verb == "standing");
  }

  TEST_CASE("triplets to caption and back") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 100; ++n) {
      auto t = relr1::testing::RandomTriplets(rng);
      // Resolution takes the first label per box, so keep boxes distinct.
      for (size_t i = 0; i < t.size(); ++i) {
        t[i].subject_box = BoundingBox(i, 0, i + 1, 1);
        t[i].object_box = BoundingBox(i, 2, i + 1, 3);
      }
      auto back = ExtractTriplets(ParseSceneGraphCaption(
          SerializeCaption(CaptionFromTriplets(t))).value);
      CHECK(back.clean());
      CHECK(back.value == t);
    }
  }
}

TEST_SUITE("gate and prompts") {
  TEST_CASE("task detection keys on ref tags") {
    CHECK(DetectTask("<ref>cat</ref><box>[1,1,2,2]</box>") == TaskKind::kBinary);
    CHECK(DetectTask("<agent>man</agent>") == TaskKind::kNary);
    CHECK(DetectTask("") == TaskKind::kNary);
  }

  TEST_CASE("rendered prompts match the golden files") {
    CHECK(RenderPrompt(PromptKind::kSggCaptionCot, "X") == ReadGolden("sgg_caption_cot_X.txt"));
    CHECK(RenderPrompt(PromptKind::kGsrCot, "Y") == ReadGolden("gsr_cot_Y.txt"));
    CHECK(RenderPrompt(PromptKind::kSggListTask, "") == ReadGolden("sgg_list_task.txt"));
  }

  TEST_CASE("prompts carry their key phrases") {
    CHECK(RenderPrompt("sgg-caption-cot", "X").find(
              "a reasonable scene graph caption is:\n\nX") != std::string::npos);
    CHECK(RenderPrompt("gsr-cot", "Y").find("a reasonable grounded situation frame is") !=
          std::string::npos);
    CHECK(RenderPrompt("sgg-list-task", "").find("structured list") != std::string::npos);
  }

  TEST_CASE("unknown prompt kind") {
    CHECK_THROWS_AS(RenderPrompt("sgg-free", "X"), relr1::Error);
  }
}
