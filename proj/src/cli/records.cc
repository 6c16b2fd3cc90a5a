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

#include <istream>
#include <set>

#include "json.hpp"
#include "relr1/cli.h"
#include "relr1/error.h"

namespace relr1::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kBadRecord, message);
}

std::string RequireString(const json& rec, const char* key) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    Bad(std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

std::string ImageId(const json& rec) {
  auto it = rec.find("image_id");
  if (it != rec.end() && it->is_number_integer()) return it->dump();
  return RequireString(rec, "image_id");
}

void RequireClean(const std::vector<relgram::Diagnostic>& diags,
                  const char* what) {
  if (!diags.empty()) {
    Bad(std::string(what) + " does not parse cleanly: " + diags.front().ToString());
  }
}

geom::BoundingBox BoxFromJson(const json& v) {
  if (v.is_null()) return geom::BoundingBox::Sentinel();
  if (!v.is_array() || v.size() != 4) Bad("box must be [x1,y1,x2,y2]");
  int64_t c[4];
  for (int k = 0; k < 4; ++k) {
    if (!v[k].is_number_integer()) Bad("box coordinates must be integers");
    c[k] = v[k].get<int64_t>();
  }
  if (c[0] == -1 && c[1] == -1 && c[2] == -1 && c[3] == -1) {
    return geom::BoundingBox::Sentinel();
  }
  auto box = geom::BoundingBox::TryMake(c[0], c[1], c[2], c[3]);
  if (!box) Bad("invalid box " + v.dump());
  return *box;
}

reward::BinaryTruth BinaryFromJson(const json& rec) {
  reward::BinaryTruth truth;
  if (auto it = rec.find("triplets"); it != rec.end()) {
    // A JSON array dumps to the list grammar itself.
    const std::string text = it->is_string() ? it->get<std::string>() : it->dump();
    auto parsed = relgram::ParseSceneGraphList(text);
    RequireClean(parsed.diagnostics, "triplets");
    truth.triplets = std::move(parsed.value);
  } else if (auto cap = rec.find("caption"); cap != rec.end()) {
    if (!cap->is_string()) Bad("caption must be a string");
    auto caption = relgram::ParseSceneGraphCaption(cap->get<std::string>());
    RequireClean(caption.diagnostics, "caption");
    auto triplets = relgram::ExtractTriplets(caption.value);
    RequireClean(triplets.diagnostics, "caption");
    truth.triplets = std::move(triplets.value);
  } else {
    Bad("binary record needs \"triplets\" or \"caption\"");
  }
  return truth;
}

reward::NaryTruth NaryFromJson(const json& rec, std::vector<std::string>& forms) {
  reward::NaryTruth truth;
  auto it = rec.find("frame");
  if (it == rec.end()) Bad("nary record needs \"frame\"");
  if (auto f = rec.find("verb_forms"); f != rec.end()) {
    if (!f->is_array()) Bad("verb_forms must be an array of strings");
    for (const auto& v : *f) {
      if (!v.is_string()) Bad("verb_forms must be an array of strings");
      forms.push_back(v.get<std::string>());
    }
  }
  if (it->is_object()) {
    truth.frame.verb = relgram::NormalizeLabel(RequireString(*it, "verb"));
    auto roles = it->find("roles");
    if (roles == it->end() || !roles->is_array()) Bad("frame.roles must be an array");
    std::set<std::string> seen;
    for (const auto& r : *roles) {
      if (!r.is_object()) Bad("each role must be an object");
      relgram::RoleBinding b;
      b.role = relgram::NormalizeLabel(RequireString(r, "role"));
      b.entity_label = relgram::NormalizeLabel(RequireString(r, "entity"));
      if (auto box = r.find("box"); box != r.end()) b.box = BoxFromJson(*box);
      if (b.role.empty() || relgram::IsReservedTag(b.role)) Bad("bad role name");
      if (!seen.insert(b.role).second) Bad("duplicate role " + b.role);
      truth.frame.roles.push_back(std::move(b));
    }
    truth.frame.raw_text = relgram::SerializeFrame(truth.frame);
  } else {
    if (!it->is_string()) Bad("frame must be a string or an object");
    const std::string verb = RequireString(rec, "verb");
    relgram::VerbLexicon lexicon;
    lexicon.AddVerb(verb);
    for (const auto& f : forms) lexicon.AddForm(f, verb);
    auto parsed = relgram::ParseSituationFrame(it->get<std::string>(), lexicon);
    RequireClean(parsed.diagnostics, "frame");
    truth.frame = std::move(parsed.value);
  }
  if (truth.frame.roles.empty()) Bad("frame has no roles");
  return truth;
}

std::vector<double> LogProbs(const json& v, const char* key) {
  auto it = v.find(key);
  if (it == v.end() || !it->is_array()) Bad(std::string("missing array \"") + key + "\"");
  std::vector<double> out;
  for (const auto& x : *it) {
    if (!x.is_number()) Bad(std::string(key) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <typename Record, typename ParseFn>
std::vector<Record> ReadLines(std::istream& in, std::string_view source,
                              ParseFn parse) {
  std::vector<Record> out;
  std::set<std::string> ids;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Record rec = parse(line);
      if (!ids.insert(rec.image_id).second) Bad("duplicate image_id " + rec.image_id);
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      const std::string detail =
          std::string(e.what()).substr(ErrorCodeName(e.code()).size() + 2);
      throw Error(e.code(), std::string(source) + ":" + std::to_string(lineno) +
                                ": " + detail);
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on " + std::string(source));
  return out;
}

json ParseObject(std::string_view line) {
  json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (rec.is_discarded() || !rec.is_object()) Bad("not a JSON object");
  return rec;
}

}  // namespace

GroundTruthRecord ParseGroundTruthRecord(std::string_view json_line) {
  const json rec = ParseObject(json_line);
  GroundTruthRecord out;
  out.image_id = ImageId(rec);
  const auto task = relgram::ParseTaskKind(RequireString(rec, "task"));
  if (!task) Bad("task must be \"binary\" or \"nary\"");
  if (*task == relgram::TaskKind::kBinary) {
    out.truth = BinaryFromJson(rec);
  } else {
    out.truth = NaryFromJson(rec, out.verb_forms);
  }
  return out;
}

grpo::RolloutGroup ParseRolloutGroup(std::string_view json_line) {
  const json rec = ParseObject(json_line);
  grpo::RolloutGroup group;
  group.prompt_id = RequireString(rec, "prompt_id");
  auto responses = rec.find("responses");
  if (responses == rec.end() || !responses->is_array()) Bad("missing array \"responses\"");
  for (const auto& r : *responses) {
    if (!r.is_object()) Bad("each response must be an object");
    grpo::ResponseSample s;
    if (auto t = r.find("text"); t != r.end() && t->is_string()) {
      s.response_text = t->get<std::string>();
    }
    auto reward = r.find("reward");
    if (reward == r.end() || !reward->is_number()) Bad("response needs a numeric reward");
    s.reward = reward->get<double>();
    s.logp_new = LogProbs(r, "logp_new");
    s.logp_old = LogProbs(r, "logp_old");
    s.logp_ref = LogProbs(r, "logp_ref");
    if (s.logp_old.size() != s.logp_new.size() ||
        s.logp_ref.size() != s.logp_new.size()) {
      Bad("logp_new, logp_old and logp_ref must have equal lengths");
    }
    group.samples.push_back(std::move(s));
  }
  return group;
}

std::vector<grpo::RolloutGroup> ReadRolloutGroups(std::istream& in,
                                                  std::string_view source) {
  std::vector<grpo::RolloutGroup> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseRolloutGroup(line));
    } catch (const Error& e) {
      const std::string detail =
          std::string(e.what()).substr(ErrorCodeName(e.code()).size() + 2);
      throw Error(e.code(), std::string(source) + ":" + std::to_string(lineno) +
                                ": " + detail);
    }
  }
  return out;
}

std::vector<PredictionRecord> ReadPredictions(std::istream& in,
                                              std::string_view source) {
  return ReadLines<PredictionRecord>(in, source, [](std::string_view line) {
    const json rec = ParseObject(line);
    return PredictionRecord{ImageId(rec), RequireString(rec, "output_text")};
  });
}

std::vector<GroundTruthRecord> ReadGroundTruth(std::istream& in,
                                               std::string_view source) {
  return ReadLines<GroundTruthRecord>(in, source, ParseGroundTruthRecord);
}

relgram::VerbLexicon CorpusLexicon(std::span<const GroundTruthRecord> gt) {
  std::vector<std::string> verbs;
  for (const auto& rec : gt) {
    const auto* nary = std::get_if<reward::NaryTruth>(&rec.truth);
    if (nary != nullptr) verbs.push_back(nary->frame.verb);
  }
  relgram::VerbLexicon lexicon = relgram::VerbLexicon::FromVerbs(verbs);
  // Listed forms go last so a derived inflection never shadows them.
  for (const auto& rec : gt) {
    const auto* nary = std::get_if<reward::NaryTruth>(&rec.truth);
    if (nary == nullptr) continue;
    for (const auto& f : rec.verb_forms) lexicon.AddForm(f, nary->frame.verb);
  }
  return lexicon;
}

}  // namespace relr1::cli
