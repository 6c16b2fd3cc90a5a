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

#include "scan.h"

#include <cctype>

namespace relr1::relgram::internal {
namespace {

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

}  // namespace

size_t SkipSpace(std::string_view text, size_t pos) {
  while (pos < text.size() && IsSpace(text[pos])) ++pos;
  return pos;
}

bool IsBlank(std::string_view text) {
  return SkipSpace(text, 0) == text.size();
}

std::optional<Tag> TagAt(std::string_view text, size_t pos) {
  if (pos >= text.size() || text[pos] != '<') return std::nullopt;
  Tag tag;
  tag.begin = pos;
  size_t i = pos + 1;
  if (i < text.size() && text[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const size_t name_begin = i;
  while (i < text.size() && IsNameChar(text[i])) ++i;
  if (i == name_begin || i >= text.size() || text[i] != '>') {
    return std::nullopt;
  }
  tag.name = text.substr(name_begin, i - name_begin);
  tag.end = i + 1;
  return tag;
}

std::optional<Tag> NextTag(std::string_view text, size_t pos) {
  while (pos < text.size()) {
    const size_t lt = text.find('<', pos);
    if (lt == std::string_view::npos) return std::nullopt;
    if (auto tag = TagAt(text, lt)) return tag;
    pos = lt + 1;
  }
  return std::nullopt;
}

bool Cursor::Consume(char c) {
  if (peek() != c) return false;
  ++pos_;
  return true;
}

std::optional<int64_t> Cursor::Integer() {
  size_t i = pos_;
  bool negative = false;
  if (i < text_.size() && (text_[i] == '-' || text_[i] == '+')) {
    negative = text_[i] == '-';
    ++i;
  }
  const size_t digits_begin = i;
  int64_t value = 0;
  while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
    if (i - digits_begin >= 15) return std::nullopt;
    value = value * 10 + (text_[i] - '0');
    ++i;
  }
  if (i == digits_begin) return std::nullopt;
  if (i < text_.size() && text_[i] == '.') {
    ++i;
    while (i < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[i]))) {
      if (text_[i] != '0') return std::nullopt;
      ++i;
    }
  }
  pos_ = i;
  return negative ? -value : value;
}

namespace {

std::optional<geom::BoundingBox> ParseQuad(Cursor& cur) {
  int64_t v[4];
  for (int k = 0; k < 4; ++k) {
    cur.SkipSpace();
    if (k > 0) {
      if (!cur.Consume(',')) return std::nullopt;
      cur.SkipSpace();
    }
    auto n = cur.Integer();
    if (!n) return std::nullopt;
    v[k] = *n;
  }
  return geom::BoundingBox::TryMake(v[0], v[1], v[2], v[3]);
}

}  // namespace

std::optional<std::vector<geom::BoundingBox>> ParseBoxGroup(
    std::string_view content, size_t base, std::vector<Diagnostic>& diags) {
  Cursor cur(content);
  auto fail = [&]() -> std::optional<std::vector<geom::BoundingBox>> {
    diags.push_back({DiagnosticKind::kMalformedBox, base + cur.pos(),
                     "malformed box coordinates '" + std::string(content) +
                         "'"});
    return std::nullopt;
  };
  std::vector<geom::BoundingBox> boxes;
  cur.SkipSpace();
  if (!cur.Consume('[')) return fail();
  cur.SkipSpace();
  if (cur.peek() == '[') {
    while (true) {
      cur.SkipSpace();
      if (!cur.Consume('[')) return fail();
      auto box = ParseQuad(cur);
      if (!box) return fail();
      cur.SkipSpace();
      if (!cur.Consume(']')) return fail();
      boxes.push_back(*box);
      cur.SkipSpace();
      if (cur.Consume(',')) continue;
      if (cur.Consume(']')) break;
      return fail();
    }
  } else {
    auto box = ParseQuad(cur);
    if (!box) return fail();
    cur.SkipSpace();
    if (!cur.Consume(']')) return fail();
    boxes.push_back(*box);
  }
  cur.SkipSpace();
  if (!cur.done()) return fail();
  return boxes;
}

BoxGroupRead ReadBoxGroups(std::string_view text, size_t pos, size_t max_groups,
                           std::vector<Diagnostic>& diags) {
  BoxGroupRead read;
  read.end = pos;
  while (read.groups.size() < max_groups) {
    const size_t at = SkipSpace(text, read.end);
    auto open = TagAt(text, at);
    if (!open || open->closing || open->name != "box") break;
    const size_t lt = text.find('<', open->end);
    auto close = lt == std::string_view::npos ? std::nullopt : TagAt(text, lt);
    if (!close || !close->closing || close->name != "box") {
      diags.push_back({DiagnosticKind::kDanglingTag, open->begin,
                       "<box> without matching </box>"});
      read.end = open->end;
      break;
    }
    read.groups.push_back(ParseBoxGroup(
        text.substr(open->end, close->begin - open->end), open->end, diags));
    read.end = close->end;
  }
  return read;
}

std::string FormatBoxList(const std::vector<geom::BoundingBox>& boxes) {
  std::string out = "[";
  for (size_t i = 0; i < boxes.size(); ++i) {
    if (i > 0) out += ",";
    out += boxes[i].ToString();
  }
  out += "]";
  return out;
}

}  // namespace relr1::relgram::internal
