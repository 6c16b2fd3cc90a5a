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

#include <cctype>
#include <set>

#include "relr1/relgram.h"
#include "scan.h"

namespace relr1::relgram {

using internal::NextTag;
using internal::Tag;
using internal::TagAt;

namespace {

bool IsConsonant(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) &&
         std::string_view("aeiou").find(c) == std::string_view::npos;
}

std::vector<std::string> Inflections(const std::string& verb) {
  std::vector<std::string> forms;
  constexpr std::string_view kIng = "ing";
  if (verb.size() > kIng.size() + 1 && verb.ends_with(kIng)) {
    const std::string stem = verb.substr(0, verb.size() - kIng.size());
    forms.push_back(stem);
    forms.push_back(stem + "s");
    forms.push_back(stem + "e");
    forms.push_back(stem + "es");
    const size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && IsConsonant(stem[n - 1])) {
      const std::string single = stem.substr(0, n - 1);
      forms.push_back(single);
      forms.push_back(single + "s");
    }
    if (stem.ends_with('y')) {
      forms.push_back(stem.substr(0, n - 1) + "ies");
    }
  } else {
    forms.push_back(verb + "s");
  }
  return forms;
}

std::optional<Tag> MatchClose(std::string_view text, const Tag& open) {
  size_t pos = open.end;
  while (true) {
    const size_t lt = text.find('<', pos);
    if (lt == std::string_view::npos) return std::nullopt;
    auto tag = TagAt(text, lt);
    if (!tag) {
      pos = lt + 1;
      continue;
    }
    if (tag->closing && tag->name == open.name) return tag;
    return std::nullopt;
  }
}

}  // namespace

void VerbLexicon::AddVerb(std::string_view verb_class) {
  const std::string cls = NormalizeLabel(verb_class);
  if (cls.empty()) return;
  forms_[cls] = cls;
  for (auto& form : Inflections(cls)) forms_.emplace(std::move(form), cls);
}

void VerbLexicon::AddForm(std::string_view surface, std::string_view verb_class) {
  const std::string s = NormalizeLabel(surface);
  const std::string cls = NormalizeLabel(verb_class);
  if (s.empty() || cls.empty()) return;
  forms_[s] = cls;
}

std::optional<std::string_view> VerbLexicon::Lookup(std::string_view word) const {
  auto it = forms_.find(NormalizeLabel(word));
  if (it == forms_.end()) return std::nullopt;
  return std::string_view(it->second);
}

VerbLexicon VerbLexicon::FromVerbs(std::span<const std::string> verb_classes) {
  VerbLexicon lex;
  // Exact classes first so an inflection never shadows a real class.
  for (const auto& v : verb_classes) lex.AddVerb(v);
  for (const auto& v : verb_classes) {
    const std::string cls = NormalizeLabel(v);
    if (!cls.empty()) lex.forms_[cls] = cls;
  }
  return lex;
}

bool IsReservedTag(std::string_view name) {
  return name == "think" || name == "answer" || name == "box" ||
         name == "ref" || name == "pred";
}

Parsed<SituationFrame> ParseSituationFrame(std::string_view answer,
                                           const VerbLexicon& lexicon) {
  Parsed<SituationFrame> out;
  out.value.raw_text = std::string(answer);
  auto& diags = out.diagnostics;
  std::set<std::string> seen_roles;
  bool verb_found = false;

  auto scan_prose = [&](size_t begin, size_t end) {
    size_t i = begin;
    while (!verb_found && i < end) {
      while (i < end && !std::isalpha(static_cast<unsigned char>(answer[i]))) ++i;
      const size_t w = i;
      while (i < end && std::isalpha(static_cast<unsigned char>(answer[i]))) ++i;
      if (i > w) {
        if (auto cls = lexicon.Lookup(answer.substr(w, i - w))) {
          out.value.verb = std::string(*cls);
          verb_found = true;
        }
      }
    }
  };

  size_t pos = 0;
  while (auto tag = NextTag(answer, pos)) {
    scan_prose(pos, tag->begin);
    pos = tag->end;
    if (tag->closing) {
      diags.push_back({DiagnosticKind::kUnexpectedTag, tag->begin,
                       "unmatched </" + std::string(tag->name) + ">"});
      continue;
    }
    if (tag->name == "box") {
      auto stray = internal::ReadBoxGroups(answer, tag->begin, 1, diags);
      diags.push_back({DiagnosticKind::kStrayBox, tag->begin,
                       "<box> not attached to a role"});
      pos = std::max(stray.end, tag->end);
      continue;
    }
    if (IsReservedTag(tag->name)) {
      diags.push_back({DiagnosticKind::kUnexpectedTag, tag->begin,
                       "unexpected <" + std::string(tag->name) + "> in frame"});
      continue;
    }
    auto close = MatchClose(answer, *tag);
    if (!close) {
      diags.push_back({DiagnosticKind::kDanglingTag, tag->begin,
                       "<" + std::string(tag->name) + "> without matching </" +
                           std::string(tag->name) + ">"});
      continue;
    }
    std::string role = NormalizeLabel(tag->name);
    std::string label =
        NormalizeLabel(answer.substr(tag->end, close->begin - tag->end));
    auto read = internal::ReadBoxGroups(answer, close->end, 1, diags);
    pos = read.end;

    BoundingBox box;
    if (!read.groups.empty() && read.groups[0]) {
      const auto& boxes = *read.groups[0];
      if (boxes.size() != 1) {
        diags.push_back({DiagnosticKind::kMalformedBox, close->end,
                         "role <" + role + "> has " +
                             std::to_string(boxes.size()) +
                             " boxes, using the first"});
      }
      if (!boxes.empty()) box = boxes[0];
    }
    if (label.empty()) {
      diags.push_back({DiagnosticKind::kEmptyLabel, tag->end,
                       "empty entity for role <" + role + ">"});
      continue;
    }
    if (!seen_roles.insert(role).second) {
      diags.push_back({DiagnosticKind::kDuplicateRole, tag->begin,
                       "duplicate role <" + role + "> ignored"});
      continue;
    }
    out.value.roles.push_back({std::move(role), std::move(label), box});
  }
  scan_prose(pos, answer.size());
  if (!verb_found) {
    diags.push_back({DiagnosticKind::kMissingVerb, 0,
                     "no known verb found in the frame sentence"});
  }
  return out;
}

std::string SerializeFrame(const SituationFrame& frame) {
  std::string out = frame.verb;
  if (frame.roles.empty()) return out + ".";
  out += ":";
  for (const auto& r : frame.roles) {
    out += " <" + r.role + ">" + r.entity_label + "</" + r.role + ">";
    if (!r.box.is_sentinel()) out += "<box>" + r.box.ToString() + "</box>";
  }
  return out;
}

}  // namespace relr1::relgram
