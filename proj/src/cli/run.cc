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

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "relr1/cli.h"
#include "relr1/error.h"

namespace relr1::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using relgram::TaskKind;

struct InputFile {
  std::string path;
  std::string bytes;
};

InputFile ReadInput(const std::string& path, std::istream& stdin_stream) {
  InputFile f{path, {}};
  std::stringstream buf;
  if (path == "-") {
    buf << stdin_stream.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    buf << in.rdbuf();
  }
  f.bytes = buf.str();
  return f;
}

void WriteFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Written beside every output; the only file with run-varying content.
void WriteManifest(const fs::path& dir, std::string_view command,
                   std::span<const std::string> args, const Config& cfg,
                   std::span<const InputFile> inputs) {
  ordered_json doc;
  doc["command"] = command;
  doc["args"] = std::vector<std::string>(args.begin(), args.end());
  doc["config"] = ordered_json::parse(ConfigToJson(cfg));
  doc["inputs"] = ordered_json::array();
  for (const auto& f : inputs) {
    doc["inputs"].push_back({{"path", f.path},
                             {"bytes", f.bytes.size()},
                             {"sha256", Sha256Hex(f.bytes)}});
  }
  doc["tool_version"] = kToolVersion;
  doc["timestamp"] = UtcTimestamp();
  WriteFile(dir / "run-manifest", doc.dump(2) + "\n");
}

fs::path DirOf(const std::string& file) {
  const fs::path p(file);
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

template <typename T>
std::vector<T> ReadRecords(const InputFile& f,
                           std::vector<T> (*reader)(std::istream&, std::string_view)) {
  std::istringstream in(f.bytes);
  return reader(in, f.path);
}

// Flags shared by commands that load a configuration.
struct Common {
  std::string config_path;
  std::optional<std::string> iou;
};

Config Load(const Common& c, const Environment& env) {
  std::string path = c.config_path;
  if (path.empty()) {
    if (auto it = env.find("RELR1_CONFIG"); it != env.end()) path = it->second;
  }
  Config cfg = LoadConfig(path, env);
  if (c.iou) cfg.reward.iou_threshold = ParseThreshold(*c.iou);
  return cfg;
}

std::string RewardTable(const RewardRun& run) {
  std::string out;
  char buf[160];
  auto section = [&](const char* title, const std::map<TaskKind, RewardSummary>& m) {
    std::snprintf(buf, sizeof(buf), "%-16s %6s %8s %8s %8s\n", title, "count",
                  "format", "task", "total");
    out += buf;
    for (const auto& [kind, s] : m) {
      std::snprintf(buf, sizeof(buf), "%-16s %6d %8.4f %8.4f %8.4f\n",
                    std::string(relgram::TaskKindName(kind)).c_str(), s.count,
                    s.mean_format, s.mean_task, s.mean_total);
      out += buf;
    }
  };
  section("by ground truth", run.by_gt_task);
  section("by gate", run.by_routed_task);
  return out;
}

struct ParseReport {
  size_t mentions = 0;
  std::vector<relgram::Diagnostic> diagnostics;
};

ParseReport Lint(std::string_view format, std::string_view text,
                 const relgram::VerbLexicon& lexicon) {
  ParseReport r;
  if (format == "envelope") {
    r.diagnostics = relgram::EnvelopeDiagnostics(text);
    r.mentions = (text.find("<think>") != std::string_view::npos) +
                 (text.find("<answer>") != std::string_view::npos);
  } else if (format == "caption") {
    auto caption = relgram::ParseSceneGraphCaption(text);
    auto triplets = relgram::ExtractTriplets(caption.value);
    r.mentions = caption.value.entities.size() + caption.value.predicates.size();
    r.diagnostics = std::move(caption.diagnostics);
    for (auto& d : triplets.diagnostics) r.diagnostics.push_back(std::move(d));
  } else if (format == "list") {
    auto parsed = relgram::ParseSceneGraphList(text);
    r.mentions = parsed.value.size();
    r.diagnostics = std::move(parsed.diagnostics);
  } else {
    auto parsed = relgram::ParseSituationFrame(text, lexicon);
    r.mentions = parsed.value.roles.size();
    r.diagnostics = std::move(parsed.diagnostics);
  }
  return r;
}

std::string Trim1Newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

int RunInner(std::span<const std::string> args, const Environment& env,
             std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relation-output parsing, rewards, metrics and GRPO simulator"};
  app.name("relr1");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // eval-sgg
  auto* sgg = app.add_subcommand("eval-sgg", "Scene graph metrics over a corpus");
  std::string sgg_pred, sgg_gt, sgg_out, sgg_format;
  Common sgg_common;
  bool pooled = false;
  sgg->add_option("pred", sgg_pred, "Prediction JSONL ({image_id, output_text})")->required();
  sgg->add_option("gt", sgg_gt, "Ground-truth JSONL")->required();
  sgg->add_option("--iou", sgg_common.iou, "IoU threshold, e.g. 0.5 or 1/2");
  sgg->add_option("--format", sgg_format, "Binary answer format")
      ->check(CLI::IsMember({"caption", "list"}));
  sgg->add_flag("--pooled-mrecall", pooled,
                "Pool per-predicate counts over the corpus before averaging");
  sgg->add_option("--config", sgg_common.config_path, "JSON configuration file");
  sgg->add_option("--out", sgg_out, "Write the JSON report here");

  // eval-gsr
  auto* gsr = app.add_subcommand("eval-gsr", "Grounded situation metrics over a corpus");
  std::string gsr_pred, gsr_gt, gsr_out;
  Common gsr_common;
  bool no_verb = false;
  gsr->add_option("pred", gsr_pred, "Prediction JSONL")->required();
  gsr->add_option("gt", gsr_gt, "Ground-truth JSONL")->required();
  gsr->add_option("--iou", gsr_common.iou, "IoU threshold, e.g. 0.5 or 1/2");
  gsr->add_flag("--no-verb-constraint", no_verb,
                "Credit roles even when the verb is wrong");
  gsr->add_option("--config", gsr_common.config_path, "JSON configuration file");
  gsr->add_option("--out", gsr_out, "Write the JSON report here");

  // reward
  auto* rew = app.add_subcommand("reward", "Per-record rewards and summaries");
  std::string rew_pred, rew_gt, rew_out, rew_summary, rew_format;
  Common rew_common;
  std::optional<double> alpha, nary_weight;
  bool gate = false;
  rew->add_option("pred", rew_pred, "Prediction JSONL")->required();
  rew->add_option("gt", rew_gt, "Ground-truth JSONL")->required();
  rew->add_option("--config", rew_common.config_path, "JSON configuration file");
  rew->add_option("--iou", rew_common.iou, "IoU threshold");
  rew->add_option("--alpha", alpha, "Recall weight for binary rewards");
  rew->add_option("--nary-weight", nary_weight, "Entity-value weight for N-ary rewards");
  rew->add_flag("--gate-on-format", gate, "Zero the total when the format fails");
  rew->add_option("--format", rew_format, "Binary answer format")
      ->check(CLI::IsMember({"caption", "list"}));
  rew->add_option("--out", rew_out, "Write per-record breakdowns (JSONL) here");
  rew->add_option("--summary-out", rew_summary, "Write the JSON summary here");

  // train-sim
  auto* train = app.add_subcommand("train-sim", "Train the toy policy with GRPO");
  Common train_common;
  std::optional<uint64_t> seed;
  std::optional<int> steps, group_size;
  std::optional<double> lr;
  std::string task_name, out_dir;
  train->add_option("--config", train_common.config_path, "JSON configuration file");
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--steps", steps, "Optimization steps");
  train->add_option("--group-size", group_size, "Responses per group");
  train->add_option("--learning-rate", lr, "Gradient ascent step size");
  train->add_option("--task", task_name, "Task kind")
      ->check(CLI::IsMember({"binary", "nary"}));
  train->add_option("--out-dir", out_dir, "Directory for trace.csv and run-manifest")
      ->required();

  // grpo-stats
  auto* stats_cmd = app.add_subcommand("grpo-stats", "GRPO objective per rollout group");
  std::string groups_file;
  Common stats_common;
  std::string aggregation;
  std::optional<double> epsilon, kl_coeff;
  stats_cmd->add_option("groups", groups_file, "Rollout-group JSONL, - for stdin")
      ->required();
  stats_cmd->add_option("--config", stats_common.config_path, "JSON configuration file");
  stats_cmd->add_option("--aggregation", aggregation, "response-level or per-token-mean")
      ->check(CLI::IsMember({"response-level", "per-token-mean"}));
  stats_cmd->add_option("--epsilon", epsilon, "Clipping range");
  stats_cmd->add_option("--kl-coeff", kl_coeff, "KL penalty weight");

  // parse
  auto* parse = app.add_subcommand("parse", "Lint one text; exit 0 iff no diagnostics");
  std::string parse_format = "envelope", parse_file = "-";
  std::vector<std::string> verbs;
  parse->add_option("--format", parse_format, "Grammar to check")
      ->check(CLI::IsMember({"envelope", "caption", "list", "frame"}));
  parse->add_option("--verb", verbs,
                    "Verb class for frames (repeatable; default: simulator verbs)");
  parse->add_option("file", parse_file, "Input file, - for stdin");

  // render-prompt
  auto* render = app.add_subcommand("render-prompt", "Print a CoT generation prompt");
  std::string kind, gt_file;
  std::optional<std::string> gt_inline;
  render->add_option("--kind", kind, "sgg-caption-cot, gsr-cot or sgg-list-task")
      ->required()
      ->check(CLI::IsMember({"sgg-caption-cot", "gsr-cot", "sgg-list-task"}));
  auto* gt_file_opt = render->add_option("--gt-file", gt_file, "Ground truth text file");
  auto* gt_inline_opt = render->add_option("--gt-inline", gt_inline, "Ground truth text");
  gt_file_opt->excludes(gt_inline_opt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  if (sgg->parsed()) {
    Config cfg = Load(sgg_common, env);
    SggOptions opt;
    opt.iou_threshold = cfg.reward.iou_threshold;
    opt.format = sgg_format.empty() ? cfg.reward.binary_format
                                    : *reward::ParseBinaryFormat(sgg_format);
    opt.pooled_mrecall = pooled;
    cfg.reward.binary_format = opt.format;
    cfg.reward.Validate();
    const InputFile pf = ReadInput(sgg_pred, in), gf = ReadInput(sgg_gt, in);
    const auto eval = EvaluateSgg(ReadRecords(pf, ReadPredictions),
                                  ReadRecords(gf, ReadGroundTruth), opt);
    out << SggTable(eval);
    if (!sgg_out.empty()) {
      WriteFile(sgg_out, SggReportJson(eval, opt));
      const InputFile inputs[] = {pf, gf};
      WriteManifest(DirOf(sgg_out), "eval-sgg", args, cfg, inputs);
    }
    return kExitOk;
  }

  if (gsr->parsed()) {
    Config cfg = Load(gsr_common, env);
    cfg.reward.Validate();
    GsrOptions opt;
    opt.iou_threshold = cfg.reward.iou_threshold;
    opt.verb_constraint = !no_verb;
    const InputFile pf = ReadInput(gsr_pred, in), gf = ReadInput(gsr_gt, in);
    const auto eval = EvaluateGsr(ReadRecords(pf, ReadPredictions),
                                  ReadRecords(gf, ReadGroundTruth), opt);
    out << GsrTable(eval);
    if (!gsr_out.empty()) {
      WriteFile(gsr_out, GsrReportJson(eval, opt));
      const InputFile inputs[] = {pf, gf};
      WriteManifest(DirOf(gsr_out), "eval-gsr", args, cfg, inputs);
    }
    return kExitOk;
  }

  if (rew->parsed()) {
    Config cfg = Load(rew_common, env);
    if (alpha) cfg.reward.alpha = *alpha;
    if (nary_weight) cfg.reward.nary_weight = *nary_weight;
    if (gate) cfg.reward.gate_on_format = true;
    if (!rew_format.empty()) cfg.reward.binary_format = *reward::ParseBinaryFormat(rew_format);
    cfg.reward.Validate();
    const InputFile pf = ReadInput(rew_pred, in), gf = ReadInput(rew_gt, in);
    const RewardRun run = ScoreRewards(ReadRecords(pf, ReadPredictions),
                                       ReadRecords(gf, ReadGroundTruth), cfg.reward);
    out << RewardTable(run);
    std::string manifest_dir;
    if (!rew_out.empty()) {
      std::string lines;
      for (const auto& r : run.records) lines += RewardRecordJson(r) + "\n";
      WriteFile(rew_out, lines);
      manifest_dir = DirOf(rew_out).string();
    }
    if (!rew_summary.empty()) {
      WriteFile(rew_summary, RewardSummaryJson(run));
      if (manifest_dir.empty()) manifest_dir = DirOf(rew_summary).string();
    }
    if (!manifest_dir.empty()) {
      const InputFile inputs[] = {pf, gf};
      WriteManifest(manifest_dir, "reward", args, cfg, inputs);
    }
    return kExitOk;
  }

  if (train->parsed()) {
    Config cfg = Load(train_common, env);
    sim::TrainConfig tc = cfg.sim;
    if (seed) tc.seed = *seed;
    if (steps) tc.steps = *steps;
    if (group_size) tc.group_size = *group_size;
    if (lr) tc.learning_rate = *lr;
    if (!task_name.empty()) tc.task = *relgram::ParseTaskKind(task_name);
    tc.grpo = cfg.grpo;
    tc.reward = cfg.reward;
    cfg.sim = tc;
    const sim::TrainResult result = sim::Train(tc);

    std::ostringstream csv;
    sim::WriteTraceCsv(csv, result.trace);
    WriteFile(fs::path(out_dir) / "trace.csv", csv.str());
    std::vector<InputFile> inputs;
    if (!train_common.config_path.empty()) {
      inputs.push_back(ReadInput(train_common.config_path, in));
    }
    WriteManifest(out_dir, "train-sim", args, cfg, inputs);

    const size_t n = result.trace.size();
    const size_t w = std::min<size_t>(100, n);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "task %s  seed %llu  steps %d\n"
                  "mean task reward, first %zu steps: %.4f\n"
                  "mean task reward, last %zu steps:  %.4f\n"
                  "final mean kl: %.6f\n",
                  std::string(relgram::TaskKindName(tc.task)).c_str(),
                  static_cast<unsigned long long>(tc.seed), tc.steps, w,
                  sim::WindowMeanTaskReward(result.trace, 0, w), w,
                  sim::WindowMeanTaskReward(result.trace, n - w, n),
                  result.trace.back().mean_kl);
    out << buf;
    return kExitOk;
  }

  if (stats_cmd->parsed()) {
    Config cfg = Load(stats_common, env);
    if (!aggregation.empty()) cfg.grpo.aggregation = *grpo::ParseAggregation(aggregation);
    if (epsilon) cfg.grpo.epsilon = *epsilon;
    if (kl_coeff) cfg.grpo.kl_coeff = *kl_coeff;
    const InputFile f = ReadInput(groups_file, in);
    std::istringstream lines(f.bytes);
    for (const auto& g : ReadRolloutGroups(lines, f.path)) {
      out << GrpoStatsJson(g.prompt_id, grpo::Objective(g, cfg.grpo)) << "\n";
    }
    return kExitOk;
  }

  if (parse->parsed()) {
    const InputFile f = ReadInput(parse_file, in);
    relgram::VerbLexicon lexicon;
    if (verbs.empty()) {
      lexicon = sim::Catalog::Default().Lexicon();
    } else {
      lexicon = relgram::VerbLexicon::FromVerbs(verbs);
    }
    const ParseReport r = Lint(parse_format, f.bytes, lexicon);
    for (const auto& d : r.diagnostics) out << d.ToString() << "\n";
    out << r.mentions << (r.mentions == 1 ? " mention, " : " mentions, ")
        << r.diagnostics.size()
        << (r.diagnostics.size() == 1 ? " diagnostic\n" : " diagnostics\n");
    return r.diagnostics.empty() ? kExitOk : kExitInputError;
  }

  if (render->parsed()) {
    const relgram::PromptKind pk = *relgram::ParsePromptKind(kind);
    std::string gt;
    if (gt_inline) {
      gt = *gt_inline;
    } else if (!gt_file.empty()) {
      gt = Trim1Newline(ReadInput(gt_file, in).bytes);
    } else if (pk != relgram::PromptKind::kSggListTask) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--gt-file or --gt-inline is required for " + kind);
    }
    out << relgram::RenderPrompt(pk, gt);
    return kExitOk;
  }
  return kExitInternalError;
}

}  // namespace

int Run(std::span<const std::string> args, const Environment& env,
        std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    return RunInner(args, env, in, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kGroupTooSmall:
      case ErrorCode::kLengthMismatch:
      case ErrorCode::kEmptyGroundTruth:
      case ErrorCode::kNoSamples:
      case ErrorCode::kUnknownKind:
      case ErrorCode::kMissingGroundTruth:
      case ErrorCode::kBadRecord:
      case ErrorCode::kIo:
        return kExitInputError;
      default:
        return kExitInternalError;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace relr1::cli
