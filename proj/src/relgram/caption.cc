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

#include <map>
#include <set>

#include "relr1/relgram.h"
#include "scan.h"

namespace relr1::relgram {

using internal::NextTag;
using internal::Tag;
using internal::TagAt;

namespace {

// Label between an open tag and its close tag, where the label contains no
// tag. Returns the close tag.
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

Parsed<SceneGraphCaption> ParseSceneGraphCaption(std::string_view answer) {
  Parsed<SceneGraphCaption> out;
  out.value.raw_text = std::string(answer);
  auto& diags = out.diagnostics;

  size_t pos = 0;
  while (auto tag = NextTag(answer, pos)) {
    pos = tag->end;
    const bool is_ref = tag->name == "ref";
    const bool is_pred = tag->name == "pred";
    if (tag->closing) {
      diags.push_back({DiagnosticKind::kUnexpectedTag, tag->begin,
                       "unmatched </" + std::string(tag->name) + ">"});
      continue;
    }
    if (tag->name == "box") {
      auto stray = internal::ReadBoxGroups(answer, tag->begin, 1, diags);
      diags.push_back({DiagnosticKind::kStrayBox, tag->begin,
                       "<box> not attached to a <ref> or <pred>"});
      pos = std::max(stray.end, tag->end);
      continue;
    }
    if (!is_ref && !is_pred) {
      diags.push_back({DiagnosticKind::kUnexpectedTag, tag->begin,
                       "unexpected <" + std::string(tag->name) + "> in caption"});
      continue;
    }
    auto close = MatchClose(answer, *tag);
    if (!close) {
      diags.push_back({DiagnosticKind::kDanglingTag, tag->begin,
                       "<" + std::string(tag->name) + "> without matching </" +
                           std::string(tag->name) + ">"});
      continue;
    }
    std::string label =
        NormalizeLabel(answer.substr(tag->end, close->begin - tag->end));
    pos = close->end;

    const size_t wanted = is_ref ? SIZE_MAX : 2;
    auto read = internal::ReadBoxGroups(answer, close->end, wanted, diags);
    pos = read.end;
    bool groups_ok = true;
    for (const auto& g : read.groups) groups_ok = groups_ok && g.has_value();

    if (label.empty()) {
      diags.push_back({DiagnosticKind::kEmptyLabel, tag->end,
                       "empty <" + std::string(tag->name) + "> label"});
      continue;
    }
    if (!groups_ok) continue;  // already reported as kMalformedBox

    if (is_ref) {
      if (read.groups.empty()) {
        diags.push_back({DiagnosticKind::kMissingBox, close->end,
                         "<ref>" + label + "</ref> has no <box>"});
        continue;
      }
      EntityMention mention{std::move(label), {}};
      for (auto& g : read.groups) {
        mention.boxes.insert(mention.boxes.end(), g->begin(), g->end());
      }
      out.value.entities.push_back(std::move(mention));
    } else {
      if (read.groups.size() < 2) {
        diags.push_back({DiagnosticKind::kMissingBox, close->end,
                         "<pred>" + label +
                             "</pred> needs subject and object <box> groups"});
        continue;
      }
      out.value.predicates.push_back(
          {std::move(label), std::move(*read.groups[0]),
           std::move(*read.groups[1])});
    }
  }
  return out;
}

Parsed<std::vector<Triplet>> ExtractTriplets(const SceneGraphCaption& caption) {
  Parsed<std::vector<Triplet>> out;
  // First mention wins for a box claimed by several entities.
  std::map<BoundingBox, std::string_view> owner;
  for (const auto& e : caption.entities) {
    for (const auto& b : e.boxes) owner.emplace(b, e.label);
  }
  auto resolve = [&](const BoundingBox& b, std::string_view role) {
    auto it = owner.find(b);
    if (it != owner.end()) return std::string(it->second);
    out.diagnostics.push_back({DiagnosticKind::kUnresolvedBox, 0,
                               std::string(role) + " box " + b.ToString() +
                                   " matches no <ref>"});
    return std::string(kUnknownLabel);
  };
  for (const auto& p : caption.predicates) {
    for (const auto& sb : p.subject_boxes) {
      for (const auto& ob : p.object_boxes) {
        out.value.push_back(
            {resolve(sb, "subject"), sb, p.predicate, resolve(ob, "object"), ob});
      }
    }
  }
  return out;
}

std::string SerializeCaption(const SceneGraphCaption& caption) {
  std::string out;
  for (const auto& e : caption.entities) {
    if (!out.empty()) out += ' ';
    out += "<ref>" + e.label + "</ref><box>" + internal::FormatBoxList(e.boxes) +
           "</box>";
  }
  for (const auto& p : caption.predicates) {
    if (!out.empty()) out += ' ';
    out += "<pred>" + p.predicate + "</pred><box>" +
           internal::FormatBoxList(p.subject_boxes) + "</box><box>" +
           internal::FormatBoxList(p.object_boxes) + "</box>";
  }
  return out;
}

SceneGraphCaption CaptionFromTriplets(std::span<const Triplet> triplets) {
  SceneGraphCaption caption;
  std::set<std::pair<std::string, BoundingBox>> seen;
  auto add_entity = [&](const std::string& label, const BoundingBox& box) {
    if (seen.emplace(label, box).second) {
      caption.entities.push_back({label, {box}});
    }
  };
  for (const auto& t : triplets) {
    add_entity(t.subject_label, t.subject_box);
    add_entity(t.object_label, t.object_box);
    caption.predicates.push_back({t.predicate, {t.subject_box}, {t.object_box}});
  }
  caption.raw_text = SerializeCaption(caption);
  return caption;
}

}  // namespace relr1::relgram
