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

#ifndef RELR1_SRC_RELGRAM_SCAN_H_
#define RELR1_SRC_RELGRAM_SCAN_H_

// Shared lexical helpers for the tag grammars.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relr1/geom.h"
#include "relr1/relgram.h"

namespace relr1::relgram::internal {

inline bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

size_t SkipSpace(std::string_view text, size_t pos);
bool IsBlank(std::string_view text);

struct Tag {
  size_t begin = 0;  // offset of '<'
  size_t end = 0;    // offset one past '>'
  std::string_view name;
  bool closing = false;
};

// A tag starting exactly at pos, if the bytes there form one.
std::optional<Tag> TagAt(std::string_view text, size_t pos);
// The first well-formed tag at or after pos.
std::optional<Tag> NextTag(std::string_view text, size_t pos);

// Character cursor with integer and punctuation helpers.
class Cursor {
 public:
  explicit Cursor(std::string_view text, size_t pos = 0)
      : text_(text), pos_(pos) {}

  size_t pos() const { return pos_; }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  void SkipSpace() { pos_ = internal::SkipSpace(text_, pos_); }
  bool Consume(char c);
  // Integer with an optional all-zero fractional part ("12", "-1", "3.0").
  std::optional<int64_t> Integer();

 private:
  std::string_view text_;
  size_t pos_;
};

// Parses box-group content: "[[a,b,c,d],...]" or a bare "[a,b,c,d]".
// On failure appends a kMalformedBox diagnostic at base + error position.
std::optional<std::vector<geom::BoundingBox>> ParseBoxGroup(
    std::string_view content, size_t base, std::vector<Diagnostic>& diags);

// Reads consecutive <box>...</box> groups starting at pos (leading
// whitespace allowed). Returns the groups parsed and advances pos past the
// last one consumed. A malformed group is consumed and reported; it yields
// std::nullopt in the output.
struct BoxGroupRead {
  std::vector<std::optional<std::vector<geom::BoundingBox>>> groups;
  size_t end = 0;
};
BoxGroupRead ReadBoxGroups(std::string_view text, size_t pos, size_t max_groups,
                           std::vector<Diagnostic>& diags);

std::string FormatBoxList(const std::vector<geom::BoundingBox>& boxes);

}  // namespace relr1::relgram::internal

#endif  // RELR1_SRC_RELGRAM_SCAN_H_
