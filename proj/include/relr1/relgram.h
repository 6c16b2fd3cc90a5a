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

#ifndef RELR1_RELGRAM_H_
#define RELR1_RELGRAM_H_

// Structured relation-output grammars: the think/answer envelope, the
// tagged scene graph caption, the bracketed triplet list and the grounded
// situation frame. Parsers are lenient: they never throw on model text and
// report problems as diagnostics with byte offsets into their input.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relr1/geom.h"

namespace relr1::relgram {

using geom::BoundingBox;

enum class DiagnosticKind {
  kDanglingTag,
  kUnexpectedTag,
  kMalformedBox,
  kMissingBox,
  kStrayBox,
  kEmptyLabel,
  kArity,
  kMalformedEntry,
  kSyntax,
  kUnresolvedBox,
  kMissingVerb,
  kDuplicateRole,
};

std::string_view DiagnosticKindName(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  size_t offset = 0;  // byte offset into the parsed text
  std::string message;

  std::string ToString() const;
};

template <typename T>
struct Parsed {
  T value;
  std::vector<Diagnostic> diagnostics;

  bool clean() const { return diagnostics.empty(); }
};

// Lowercase (ASCII), trim, collapse internal whitespace runs to one space.
std::string NormalizeLabel(std::string_view text);

// ---------------------------------------------------------------------------
// Envelope

struct Envelope {
  std::string think;
  std::string answer;
  bool well_formed = false;
};

// well_formed iff the text is exactly one <think>...</think> followed by
// exactly one <answer>...</answer>, with only whitespace outside them. When
// malformed, answer holds the best-effort <answer> content, or the whole
// text when there is no <answer> tag at all.
Envelope ParseEnvelope(std::string_view raw);

// Why an envelope is malformed, with byte offsets into raw. Empty exactly
// when ParseEnvelope(raw).well_formed.
std::vector<Diagnostic> EnvelopeDiagnostics(std::string_view raw);

std::string MakeEnvelope(std::string_view think, std::string_view answer);

// ---------------------------------------------------------------------------
// Binary relations

struct EntityMention {
  std::string label;
  std::vector<BoundingBox> boxes;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct PredicateMention {
  std::string predicate;
  std::vector<BoundingBox> subject_boxes;
  std::vector<BoundingBox> object_boxes;

  friend bool operator==(const PredicateMention&,
                         const PredicateMention&) = default;
};

struct SceneGraphCaption {
  std::string raw_text;
  std::vector<EntityMention> entities;
  std::vector<PredicateMention> predicates;
};

struct Triplet {
  std::string subject_label;
  BoundingBox subject_box;
  std::string predicate;
  std::string object_label;
  BoundingBox object_box;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

Parsed<SceneGraphCaption> ParseSceneGraphCaption(std::string_view answer);

// [["subject", [x1,y1,x2,y2], "object", [x1,y1,x2,y2], "predicate"], ...]
// Single-quoted strings are accepted as well.
Parsed<std::vector<Triplet>> ParseSceneGraphList(std::string_view answer);

// Expands each predicate over subject_boxes x object_boxes and resolves each
// box to the first entity mention carrying an exactly equal box. Unresolved
// boxes get the label "unknown".
Parsed<std::vector<Triplet>> ExtractTriplets(const SceneGraphCaption& caption);

inline constexpr std::string_view kUnknownLabel = "unknown";

// ---------------------------------------------------------------------------
// N-ary relations

struct RoleBinding {
  std::string role;
  std::string entity_label;
  BoundingBox box;  // sentinel when ungrounded

  friend bool operator==(const RoleBinding&, const RoleBinding&) = default;
};

struct SituationFrame {
  std::string verb;
  std::string raw_text;
  std::vector<RoleBinding> roles;
};

// Maps surface word forms ("drinks") to verb classes ("drinking"). Every
// verb class maps to itself.
class VerbLexicon {
 public:
  VerbLexicon() = default;

  // Adds the class itself plus simple inflections derived from a gerund
  // ("drinking" -> "drink", "drinks"; "riding" -> "ride", "rides").
  void AddVerb(std::string_view verb_class);
  void AddForm(std::string_view surface, std::string_view verb_class);

  std::optional<std::string_view> Lookup(std::string_view word) const;
  bool empty() const { return forms_.empty(); }
  size_t size() const { return forms_.size(); }

  static VerbLexicon FromVerbs(std::span<const std::string> verb_classes);

 private:
  std::unordered_map<std::string, std::string> forms_;
};

// Roles are <name>entity</name> tags with an optional following
// <box>[x1,y1,x2,y2]</box>; a role without a box is bound to the sentinel.
// The verb is the class of the first prose word found in the lexicon.
Parsed<SituationFrame> ParseSituationFrame(std::string_view answer,
                                           const VerbLexicon& lexicon);

// Role names that cannot be used as role tags.
bool IsReservedTag(std::string_view name);

// ---------------------------------------------------------------------------
// Canonical serialization. Parsing the output reproduces the structured
// fields exactly; free prose is not preserved.

std::string SerializeCaption(const SceneGraphCaption& caption);
std::string SerializeList(std::span<const Triplet> triplets);
std::string SerializeFrame(const SituationFrame& frame);

// Caption with one entity mention per distinct (label, box) and one
// predicate mention per triplet.
SceneGraphCaption CaptionFromTriplets(std::span<const Triplet> triplets);

// ---------------------------------------------------------------------------
// Task gate and prompts

enum class TaskKind { kBinary, kNary };

std::string_view TaskKindName(TaskKind kind);
std::optional<TaskKind> ParseTaskKind(std::string_view name);

// Binary iff the answer contains a <ref> tag.
TaskKind DetectTask(std::string_view answer);

enum class PromptKind { kSggCaptionCot, kGsrCot, kSggListTask };

std::string_view PromptKindName(PromptKind kind);
std::optional<PromptKind> ParsePromptKind(std::string_view name);

// Substitutes the ground truth into the stored template. The list-task
// prompt has no placeholder and ignores ground_truth.
std::string RenderPrompt(PromptKind kind, std::string_view ground_truth);
// Throws Error(kUnknownKind) for names other than sgg-caption-cot, gsr-cot
// and sgg-list-task.
std::string RenderPrompt(std::string_view kind, std::string_view ground_truth);

// Raw template text including its placeholder.
std::string_view PromptTemplate(PromptKind kind);
std::string_view PromptPlaceholder(PromptKind kind);

// Fixed three-step reasoning text used inside <think> for captions
// (object existence, localization, relations) and frames (activity, roles,
// localization).
std::string RenderTemplateCot(const SceneGraphCaption& caption);
std::string RenderTemplateCot(const SituationFrame& frame);

}  // namespace relr1::relgram

#endif  // RELR1_RELGRAM_H_
