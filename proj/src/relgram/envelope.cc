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

#include "relr1/relgram.h"
#include "scan.h"

namespace relr1::relgram {

using internal::IsSpace;

std::string_view DiagnosticKindName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kDanglingTag: return "DanglingTag";
    case DiagnosticKind::kUnexpectedTag: return "UnexpectedTag";
    case DiagnosticKind::kMalformedBox: return "MalformedBox";
    case DiagnosticKind::kMissingBox: return "MissingBox";
    case DiagnosticKind::kStrayBox: return "StrayBox";
    case DiagnosticKind::kEmptyLabel: return "EmptyLabel";
    case DiagnosticKind::kArity: return "Arity";
    case DiagnosticKind::kMalformedEntry: return "MalformedEntry";
    case DiagnosticKind::kSyntax: return "Syntax";
    case DiagnosticKind::kUnresolvedBox: return "UnresolvedBox";
    case DiagnosticKind::kMissingVerb: return "MissingVerb";
    case DiagnosticKind::kDuplicateRole: return "DuplicateRole";
  }
  return "Unknown";
}

std::string Diagnostic::ToString() const {
  return "offset " + std::to_string(offset) + ": " +
         std::string(DiagnosticKindName(kind)) + ": " + message;
}

std::string NormalizeLabel(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

size_t Count(std::string_view text, std::string_view needle) {
  size_t n = 0;
  for (size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// Inner text of the first open..close pair; to end of text when unclosed.
std::optional<std::string_view> Block(std::string_view raw,
                                      std::string_view open,
                                      std::string_view close) {
  const size_t begin = raw.find(open);
  if (begin == std::string_view::npos) return std::nullopt;
  const size_t inner = begin + open.size();
  const size_t end = raw.find(close, inner);
  if (end == std::string_view::npos) return raw.substr(inner);
  return raw.substr(inner, end - inner);
}

}  // namespace

Envelope ParseEnvelope(std::string_view raw) {
  Envelope env;
  if (auto think = Block(raw, kThinkOpen, kThinkClose)) env.think = *think;
  if (auto answer = Block(raw, kAnswerOpen, kAnswerClose)) {
    env.answer = *answer;
  } else {
    env.answer = raw;
  }

  if (Count(raw, kThinkOpen) != 1 || Count(raw, kThinkClose) != 1 ||
      Count(raw, kAnswerOpen) != 1 || Count(raw, kAnswerClose) != 1) {
    return env;
  }
  size_t pos = internal::SkipSpace(raw, 0);
  if (raw.substr(pos, kThinkOpen.size()) != kThinkOpen) return env;
  pos = raw.find(kThinkClose) + kThinkClose.size();
  pos = internal::SkipSpace(raw, pos);
  if (raw.substr(pos, kAnswerOpen.size()) != kAnswerOpen) return env;
  pos = raw.find(kAnswerClose);
  if (pos < raw.find(kAnswerOpen)) return env;
  pos += kAnswerClose.size();
  env.well_formed = internal::SkipSpace(raw, pos) == raw.size();
  return env;
}

std::vector<Diagnostic> EnvelopeDiagnostics(std::string_view raw) {
  std::vector<Diagnostic> out;
  auto add = [&](DiagnosticKind kind, size_t offset, std::string message) {
    out.push_back({kind, offset, std::move(message)});
  };
  for (std::string_view tag : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
    size_t pos = raw.find(tag);
    if (pos == std::string_view::npos) continue;
    for (pos = raw.find(tag, pos + tag.size()); pos != std::string_view::npos;
         pos = raw.find(tag, pos + tag.size())) {
      add(DiagnosticKind::kUnexpectedTag, pos,
          "repeated " + std::string(tag));
    }
  }

  // Structural walk; stops at the first violation.
  size_t pos = internal::SkipSpace(raw, 0);
  if (raw.substr(pos, kThinkOpen.size()) != kThinkOpen) {
    add(DiagnosticKind::kSyntax, pos, "expected <think>");
    return out;
  }
  const size_t think_close = raw.find(kThinkClose, pos + kThinkOpen.size());
  if (think_close == std::string_view::npos) {
    add(DiagnosticKind::kDanglingTag, pos, "<think> is never closed");
    return out;
  }
  pos = internal::SkipSpace(raw, think_close + kThinkClose.size());
  if (raw.substr(pos, kAnswerOpen.size()) != kAnswerOpen) {
    add(DiagnosticKind::kSyntax, pos, "expected <answer> after </think>");
    return out;
  }
  const size_t answer_close = raw.find(kAnswerClose, pos + kAnswerOpen.size());
  if (answer_close == std::string_view::npos) {
    add(DiagnosticKind::kDanglingTag, pos, "<answer> is never closed");
    return out;
  }
  pos = internal::SkipSpace(raw, answer_close + kAnswerClose.size());
  if (pos != raw.size()) add(DiagnosticKind::kSyntax, pos, "text after </answer>");
  return out;
}

std::string MakeEnvelope(std::string_view think, std::string_view answer) {
  std::string out;
  out.reserve(think.size() + answer.size() + 32);
  out.append(kThinkOpen).append(think).append(kThinkClose);
  out.append(kAnswerOpen).append(answer).append(kAnswerClose);
  return out;
}

std::string_view TaskKindName(TaskKind kind) {
  return kind == TaskKind::kBinary ? "binary" : "nary";
}

std::optional<TaskKind> ParseTaskKind(std::string_view name) {
  const std::string n = NormalizeLabel(name);
  if (n == "binary" || n == "sgg") return TaskKind::kBinary;
  if (n == "nary" || n == "n-ary" || n == "gsr") return TaskKind::kNary;
  return std::nullopt;
}

TaskKind DetectTask(std::string_view answer) {
  return answer.find("<ref>") != std::string_view::npos ? TaskKind::kBinary
                                                        : TaskKind::kNary;
}

}  // namespace relr1::relgram
