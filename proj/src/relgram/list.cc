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

#include <variant>

#include "relr1/relgram.h"
#include "scan.h"

namespace relr1::relgram {
namespace {

constexpr int kMaxDepth = 8;

// Minimal value model for the bracketed list: strings, integers, arrays.
struct Value {
  std::variant<std::string, int64_t, std::vector<Value>> v;
};

class ListParser {
 public:
  explicit ListParser(std::string_view text) : text_(text) {}

  std::optional<Value> ParseValue(size_t& pos, int depth) {
    pos = internal::SkipSpace(text_, pos);
    if (pos >= text_.size()) return std::nullopt;
    const char c = text_[pos];
    if (c == '"' || c == '\'') return ParseString(pos);
    if (c == '[') {
      if (depth >= kMaxDepth) return std::nullopt;
      ++pos;
      std::vector<Value> items;
      pos = internal::SkipSpace(text_, pos);
      if (pos < text_.size() && text_[pos] == ']') {
        ++pos;
        return Value{std::move(items)};
      }
      while (true) {
        auto item = ParseValue(pos, depth + 1);
        if (!item) return std::nullopt;
        items.push_back(std::move(*item));
        pos = internal::SkipSpace(text_, pos);
        if (pos >= text_.size()) return std::nullopt;
        if (text_[pos] == ',') {
          ++pos;
          continue;
        }
        if (text_[pos] == ']') {
          ++pos;
          return Value{std::move(items)};
        }
        return std::nullopt;
      }
    }
    internal::Cursor cur(text_, pos);
    auto n = cur.Integer();
    if (!n) return std::nullopt;
    pos = cur.pos();
    return Value{*n};
  }

  // Offset one past the bracket closing the array that opens at pos, or
  // the end of text. Quotes are honoured.
  size_t SkipBalanced(size_t pos) const {
    int depth = 0;
    char quote = 0;
    for (; pos < text_.size(); ++pos) {
      const char c = text_[pos];
      if (quote) {
        if (c == '\\') {
          ++pos;
        } else if (c == quote) {
          quote = 0;
        }
        continue;
      }
      if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '[') {
        ++depth;
      } else if (c == ']') {
        if (--depth <= 0) return pos + 1;
      }
    }
    return text_.size();
  }

 private:
  std::optional<Value> ParseString(size_t& pos) {
    const char quote = text_[pos++];
    std::string s;
    while (pos < text_.size()) {
      const char c = text_[pos++];
      if (c == quote) return Value{std::move(s)};
      if (c != '\\') {
        s.push_back(c);
        continue;
      }
      if (pos >= text_.size()) return std::nullopt;
      const char e = text_[pos++];
      switch (e) {
        case 'n': s.push_back('\n'); break;
        case 't': s.push_back('\t'); break;
        case 'r': s.push_back('\r'); break;
        case 'b': s.push_back('\b'); break;
        case 'f': s.push_back('\f'); break;
        case 'u': {
          if (pos + 4 > text_.size()) return std::nullopt;
          unsigned cp = 0;
          for (int k = 0; k < 4; ++k) {
            const char h = text_[pos++];
            cp <<= 4;
            if (h >= '0' && h <= '9') cp |= h - '0';
            else if (h >= 'a' && h <= 'f') cp |= h - 'a' + 10;
            else if (h >= 'A' && h <= 'F') cp |= h - 'A' + 10;
            else return std::nullopt;
          }
          if (cp < 0x80) {
            s.push_back(static_cast<char>(cp));
          } else if (cp < 0x800) {
            s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          } else {
            s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          }
          break;
        }
        default: s.push_back(e); break;
      }
    }
    return std::nullopt;
  }

  std::string_view text_;
};

const std::string* AsString(const Value& v) {
  return std::get_if<std::string>(&v.v);
}

std::optional<BoundingBox> AsBox(const Value& v) {
  const auto* items = std::get_if<std::vector<Value>>(&v.v);
  if (!items) return std::nullopt;
  // Tolerate a single box wrapped as [[x1,y1,x2,y2]].
  if (items->size() == 1) return AsBox((*items)[0]);
  if (items->size() != 4) return std::nullopt;
  int64_t c[4];
  for (int k = 0; k < 4; ++k) {
    const auto* n = std::get_if<int64_t>(&(*items)[k].v);
    if (!n) return std::nullopt;
    c[k] = *n;
  }
  return BoundingBox::TryMake(c[0], c[1], c[2], c[3]);
}

std::string QuoteJson(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* kHex = "0123456789abcdef";
          out += "\\u00";
          out.push_back(kHex[(c >> 4) & 0xF]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace

Parsed<std::vector<Triplet>> ParseSceneGraphList(std::string_view answer) {
  Parsed<std::vector<Triplet>> out;
  auto& diags = out.diagnostics;
  ListParser parser(answer);

  size_t pos = internal::SkipSpace(answer, 0);
  if (pos >= answer.size()) return out;  // empty answer: no triplets
  if (answer[pos] != '[') {
    diags.push_back({DiagnosticKind::kSyntax, pos, "expected '[' to open the list"});
    return out;
  }
  ++pos;
  pos = internal::SkipSpace(answer, pos);
  if (pos < answer.size() && answer[pos] == ']') {
    ++pos;
  } else {
    while (true) {
      pos = internal::SkipSpace(answer, pos);
      if (pos >= answer.size()) {
        diags.push_back({DiagnosticKind::kSyntax, pos, "unterminated list"});
        return out;
      }
      const size_t entry_begin = pos;
      size_t cursor = pos;
      auto value = answer[pos] == '[' ? parser.ParseValue(cursor, 1)
                                      : std::optional<Value>();
      if (!value) {
        diags.push_back({DiagnosticKind::kMalformedEntry, entry_begin,
                         "unparseable list entry"});
        pos = answer[pos] == '[' ? parser.SkipBalanced(entry_begin)
                                 : entry_begin + 1;
        // Resynchronise on the next entry separator.
        while (pos < answer.size() && answer[pos] != ',' && answer[pos] != '[' &&
               answer[pos] != ']') {
          ++pos;
        }
      } else {
        pos = cursor;
        const auto& items = std::get<std::vector<Value>>(value->v);
        if (items.size() != 5) {
          diags.push_back({DiagnosticKind::kArity, entry_begin,
                           "entry has " + std::to_string(items.size()) +
                               " elements, expected 5"});
        } else {
          const std::string* subject = AsString(items[0]);
          const std::string* object = AsString(items[2]);
          const std::string* predicate = AsString(items[4]);
          auto sbox = AsBox(items[1]);
          auto obox = AsBox(items[3]);
          if (!subject || !object || !predicate || !sbox || !obox) {
            diags.push_back({DiagnosticKind::kMalformedEntry, entry_begin,
                             "entry is not [subject, box, object, box, "
                             "predicate]"});
          } else {
            Triplet t{NormalizeLabel(*subject), *sbox, NormalizeLabel(*predicate),
                      NormalizeLabel(*object), *obox};
            if (t.subject_label.empty() || t.object_label.empty() ||
                t.predicate.empty()) {
              diags.push_back({DiagnosticKind::kEmptyLabel, entry_begin,
                               "entry has an empty label"});
            } else {
              out.value.push_back(std::move(t));
            }
          }
        }
      }
      pos = internal::SkipSpace(answer, pos);
      if (pos >= answer.size()) {
        diags.push_back({DiagnosticKind::kSyntax, pos, "unterminated list"});
        return out;
      }
      if (answer[pos] == ',') {
        ++pos;
        continue;
      }
      if (answer[pos] == ']') {
        ++pos;
        break;
      }
      if (answer[pos] == '[') continue;  // missing comma, keep going
      diags.push_back({DiagnosticKind::kSyntax, pos, "expected ',' or ']'"});
      return out;
    }
  }
  pos = internal::SkipSpace(answer, pos);
  if (pos < answer.size()) {
    diags.push_back({DiagnosticKind::kSyntax, pos, "trailing text after list"});
  }
  return out;
}

std::string SerializeList(std::span<const Triplet> triplets) {
  std::string out = "[";
  for (size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (i > 0) out += ", ";
    out += "[" + QuoteJson(t.subject_label) + ", " + t.subject_box.ToString() +
           ", " + QuoteJson(t.object_label) + ", " + t.object_box.ToString() +
           ", " + QuoteJson(t.predicate) + "]";
  }
  out += "]";
  return out;
}

}  // namespace relr1::relgram
