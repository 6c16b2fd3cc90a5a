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
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "relr1/cli.h"
#include "relr1/error.h"

extern char** environ;

namespace relr1::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kEnvPrefix = "RELR1_";

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

double Number(const json& v, const std::string& key) {
  if (!v.is_number()) Bad(key + " must be a number");
  return v.get<double>();
}

int64_t Integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) Bad(key + " must be an integer");
  return v.get<int64_t>();
}

bool Boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) Bad(key + " must be true or false");
  return v.get<bool>();
}

std::string String(const json& v, const std::string& key) {
  if (!v.is_string()) Bad(key + " must be a string");
  return v.get<std::string>();
}

geom::Ratio Threshold(const json& v, const std::string& key) {
  if (v.is_string()) return ParseThreshold(v.get<std::string>());
  const double x = Number(v, key);
  return geom::Ratio::FromDouble(x);
}

void ApplyReward(const json& section, reward::RewardConfig& cfg) {
  for (const auto& [key, v] : section.items()) {
    const std::string name = "reward." + key;
    if (key == "alpha") {
      cfg.alpha = Number(v, name);
    } else if (key == "nary_weight") {
      cfg.nary_weight = Number(v, name);
    } else if (key == "iou_threshold") {
      cfg.iou_threshold = Threshold(v, name);
    } else if (key == "gate_on_format") {
      cfg.gate_on_format = Boolean(v, name);
    } else if (key == "binary_format") {
      auto f = reward::ParseBinaryFormat(String(v, name));
      if (!f) Bad(name + " must be \"caption\" or \"list\"");
      cfg.binary_format = *f;
    } else {
      Bad("unknown key " + name);
    }
  }
}

void ApplyGrpo(const json& section, grpo::GrpoConfig& cfg) {
  for (const auto& [key, v] : section.items()) {
    const std::string name = "grpo." + key;
    if (key == "epsilon") {
      cfg.epsilon = Number(v, name);
    } else if (key == "kl_coeff") {
      cfg.kl_coeff = Number(v, name);
    } else if (key == "std_floor") {
      cfg.std_floor = Number(v, name);
    } else if (key == "aggregation") {
      auto a = grpo::ParseAggregation(String(v, name));
      if (!a) Bad(name + " must be \"response-level\" or \"per-token-mean\"");
      cfg.aggregation = *a;
    } else {
      Bad("unknown key " + name);
    }
  }
}

void ApplySim(const json& section, sim::TrainConfig& cfg) {
  for (const auto& [key, v] : section.items()) {
    const std::string name = "sim." + key;
    if (key == "task") {
      auto t = relgram::ParseTaskKind(String(v, name));
      if (!t) Bad(name + " must be \"binary\" or \"nary\"");
      cfg.task = *t;
    } else if (key == "group_size") {
      cfg.group_size = static_cast<int>(Integer(v, name));
    } else if (key == "steps") {
      cfg.steps = static_cast<int>(Integer(v, name));
    } else if (key == "learning_rate") {
      cfg.learning_rate = Number(v, name);
    } else if (key == "seed") {
      const int64_t seed = Integer(v, name);
      if (seed < 0) Bad(name + " must be non-negative");
      cfg.seed = static_cast<uint64_t>(seed);
    } else if (key == "refresh_interval") {
      cfg.refresh_interval = static_cast<int>(Integer(v, name));
    } else if (key == "max_grad_norm") {
      cfg.max_grad_norm = Number(v, name);
    } else {
      Bad("unknown key " + name);
    }
  }
}

void Apply(const json& doc, Config& cfg) {
  if (!doc.is_object()) Bad("configuration must be a JSON object");
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) Bad("section " + section + " must be an object");
    if (section == "reward") {
      ApplyReward(body, cfg.reward);
    } else if (section == "grpo") {
      ApplyGrpo(body, cfg.grpo);
    } else if (section == "sim") {
      ApplySim(body, cfg.sim);
    } else {
      Bad("unknown configuration section " + section);
    }
  }
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

geom::Ratio ParseThreshold(std::string_view text) {
  const size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (auto r = geom::Ratio::ParseDecimal(text)) return *r;
    Bad("not a number: " + std::string(text));
  }
  auto num = geom::Ratio::ParseDecimal(text.substr(0, slash));
  auto den = geom::Ratio::ParseDecimal(text.substr(slash + 1));
  if (!num || !den || num->den() != 1 || den->den() != 1 || den->num() == 0) {
    Bad("not a fraction: " + std::string(text));
  }
  return geom::Ratio(num->num(), den->num());
}

Environment ProcessEnvironment() {
  Environment env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view entry(*e);
    if (entry.substr(0, kEnvPrefix.size()) != kEnvPrefix) continue;
    const size_t eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return env;
}

void ApplyConfigText(std::string_view json_text, Config& cfg) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) Bad("configuration is not valid JSON");
  Apply(doc, cfg);
}

Config LoadConfig(const std::string& path, const Environment& env) {
  Config cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    ApplyConfigText(buf.str(), cfg);
  }
  // RELR1_REWARD_ALPHA=0.7 sets reward.alpha. Values are read as JSON and
  // fall back to plain strings (RELR1_SIM_TASK=nary).
  for (const auto& [name, value] : env) {
    if (name.substr(0, kEnvPrefix.size()) != kEnvPrefix) continue;
    const std::string rest = Lower(std::string_view(name).substr(kEnvPrefix.size()));
    const size_t sep = rest.find('_');
    if (sep == std::string::npos) continue;  // e.g. RELR1_CONFIG
    const std::string section = rest.substr(0, sep);
    if (section != "reward" && section != "grpo" && section != "sim") continue;
    json v = json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (v.is_discarded()) v = value;
    Apply(json{{section, json{{rest.substr(sep + 1), v}}}}, cfg);
  }
  return cfg;
}

std::string ConfigToJson(const Config& cfg) {
  ordered_json doc;
  doc["reward"] = {
      {"alpha", cfg.reward.alpha},
      {"nary_weight", cfg.reward.nary_weight},
      {"iou_threshold", cfg.reward.iou_threshold.ToString()},
      {"gate_on_format", cfg.reward.gate_on_format},
      {"binary_format", reward::BinaryFormatName(cfg.reward.binary_format)},
  };
  doc["grpo"] = {
      {"epsilon", cfg.grpo.epsilon},
      {"kl_coeff", cfg.grpo.kl_coeff},
      {"std_floor", cfg.grpo.std_floor},
      {"aggregation", grpo::AggregationName(cfg.grpo.aggregation)},
  };
  doc["sim"] = {
      {"task", relgram::TaskKindName(cfg.sim.task)},
      {"group_size", cfg.sim.group_size},
      {"steps", cfg.sim.steps},
      {"learning_rate", cfg.sim.learning_rate},
      {"seed", cfg.sim.seed},
      {"refresh_interval", cfg.sim.refresh_interval},
      {"max_grad_norm", cfg.sim.max_grad_norm},
  };
  return doc.dump(2);
}

}  // namespace relr1::cli
