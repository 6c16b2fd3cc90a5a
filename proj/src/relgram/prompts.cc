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

#include <string>

#include "relr1/error.h"
#include "relr1/relgram.h"
#include "scan.h"

namespace relr1::relgram {
namespace internal {
// Generated from assets/prompts at configure time.
extern const char kSggCaptionCotTemplate[];
extern const char kGsrCotTemplate[];
extern const char kSggListTaskTemplate[];
}  // namespace internal

std::string_view PromptKindName(PromptKind kind) {
  switch (kind) {
    case PromptKind::kSggCaptionCot: return "sgg-caption-cot";
    case PromptKind::kGsrCot: return "gsr-cot";
    case PromptKind::kSggListTask: return "sgg-list-task";
  }
  return "";
}

std::optional<PromptKind> ParsePromptKind(std::string_view name) {
  for (auto kind : {PromptKind::kSggCaptionCot, PromptKind::kGsrCot,
                    PromptKind::kSggListTask}) {
    if (PromptKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view PromptTemplate(PromptKind kind) {
  switch (kind) {
    case PromptKind::kSggCaptionCot: return internal::kSggCaptionCotTemplate;
    case PromptKind::kGsrCot: return internal::kGsrCotTemplate;
    case PromptKind::kSggListTask: return internal::kSggListTaskTemplate;
  }
  return "";
}

std::string_view PromptPlaceholder(PromptKind kind) {
  switch (kind) {
    case PromptKind::kSggCaptionCot: return "{ground-truth caption}";
    case PromptKind::kGsrCot: return "{ground-truth frame}";
    case PromptKind::kSggListTask: return "";
  }
  return "";
}

std::string RenderPrompt(PromptKind kind, std::string_view ground_truth) {
  std::string text(PromptTemplate(kind));
  const std::string_view placeholder = PromptPlaceholder(kind);
  if (placeholder.empty()) return text;
  const size_t at = text.find(placeholder);
  if (at != std::string::npos) {
    text.replace(at, placeholder.size(), ground_truth);
  }
  return text;
}

std::string RenderPrompt(std::string_view kind, std::string_view ground_truth) {
  auto parsed = ParsePromptKind(kind);
  if (!parsed) {
    throw Error(ErrorCode::kUnknownKind,
                "unknown prompt kind '" + std::string(kind) + "'");
  }
  return RenderPrompt(*parsed, ground_truth);
}

std::string RenderTemplateCot(const SceneGraphCaption& caption) {
  std::string objects;
  std::string located;
  for (const auto& e : caption.entities) {
    if (!objects.empty()) {
      objects += ", ";
      located += "; ";
    }
    objects += e.label;
    located += e.label + " " + internal::FormatBoxList(e.boxes);
  }
  std::string relations;
  for (const auto& t : ExtractTriplets(caption).value) {
    if (!relations.empty()) relations += "; ";
    relations += t.subject_label + " " + t.predicate + " " + t.object_label;
  }
  return "The objects present in the image are: " + objects +
         ". The objects are located at: " + located +
         ". The relations present are: " + relations + ".";
}

std::string RenderTemplateCot(const SituationFrame& frame) {
  std::string entities;
  std::string located;
  for (const auto& r : frame.roles) {
    if (!entities.empty()) {
      entities += ", ";
      located += "; ";
    }
    entities += r.entity_label + " as " + r.role;
    located += r.entity_label + " " +
               (r.box.is_sentinel() ? std::string("not visible") : r.box.ToString());
  }
  return "The primary activity is " + frame.verb +
         ". The entities engaged in the activity are: " + entities +
         ". The entities are located in: " + located + ".";
}

}  // namespace relr1::relgram
