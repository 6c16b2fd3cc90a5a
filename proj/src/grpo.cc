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

#include "relr1/grpo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relr1/error.h"

namespace relr1::grpo {
namespace {

void CheckSameLength(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "log-prob sequences of length " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()));
  }
}

double Sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

void CheckLogProbs(std::span<const double> v, std::string_view what) {
  if (v.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " has a non-finite entry");
    }
  }
}

double KlEstimator(double log_r) { return std::exp(log_r) - log_r - 1.0; }

}  // namespace

std::string_view AggregationName(Aggregation a) {
  return a == Aggregation::kResponse ? "response-level" : "per-token-mean";
}

std::optional<Aggregation> ParseAggregation(std::string_view name) {
  if (name == "response-level" || name == "response") return Aggregation::kResponse;
  if (name == "per-token-mean" || name == "token") return Aggregation::kTokenMean;
  return std::nullopt;
}

void GrpoConfig::Validate() const {
  if (!(epsilon > 0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (!(kl_coeff >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "kl_coeff must be >= 0");
  }
  if (!(std_floor > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "std_floor must be > 0");
  }
}

std::vector<double> Advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall,
                "group of " + std::to_string(rewards.size()) +
                    " responses; standardization needs at least 2");
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = Sum(rewards) / n;
  double var = 0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (std < std_floor) return out;
  for (size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

double ResponseRatio(std::span<const double> logp_new,
                     std::span<const double> logp_old) {
  CheckSameLength(logp_new, logp_old);
  return std::exp(Sum(logp_new) - Sum(logp_old));
}

std::vector<double> TokenRatios(std::span<const double> logp_new,
                                std::span<const double> logp_old) {
  CheckSameLength(logp_new, logp_old);
  std::vector<double> out(logp_new.size());
  for (size_t t = 0; t < out.size(); ++t) out[t] = std::exp(logp_new[t] - logp_old[t]);
  return out;
}

double KlTerm(std::span<const double> logp_new, std::span<const double> logp_ref,
              Aggregation aggregation) {
  CheckSameLength(logp_new, logp_ref);
  if (aggregation == Aggregation::kResponse) {
    return KlEstimator(Sum(logp_ref) - Sum(logp_new));
  }
  if (logp_new.empty()) return 0;
  double total = 0;
  for (size_t t = 0; t < logp_new.size(); ++t) {
    total += KlEstimator(logp_ref[t] - logp_new[t]);
  }
  return total / static_cast<double>(logp_new.size());
}

double ClippedSurrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

GrpoStats Objective(const RolloutGroup& group, const GrpoConfig& cfg) {
  cfg.Validate();
  std::vector<double> rewards;
  rewards.reserve(group.samples.size());
  for (const auto& s : group.samples) {
    CheckLogProbs(s.logp_new, "logp_new");
    CheckSameLength(s.logp_new, s.logp_old);
    CheckSameLength(s.logp_new, s.logp_ref);
    CheckLogProbs(s.logp_old, "logp_old");
    CheckLogProbs(s.logp_ref, "logp_ref");
    rewards.push_back(s.reward);
  }

  GrpoStats stats;
  stats.advantages = Advantages(rewards, cfg.std_floor);
  const double g = static_cast<double>(group.samples.size());
  for (size_t i = 0; i < group.samples.size(); ++i) {
    const auto& s = group.samples[i];
    const double a = stats.advantages[i];
    if (cfg.aggregation == Aggregation::kResponse) {
      const double rho = ResponseRatio(s.logp_new, s.logp_old);
      stats.ratios.push_back(rho);
      stats.surrogate += ClippedSurrogate(rho, a, cfg.epsilon);
    } else {
      const auto rhos = TokenRatios(s.logp_new, s.logp_old);
      double sum = 0;
      double log_sum = 0;
      for (double rho : rhos) {
        sum += ClippedSurrogate(rho, a, cfg.epsilon);
        log_sum += std::log(rho);
      }
      const double t = static_cast<double>(rhos.size());
      stats.ratios.push_back(std::exp(log_sum / t));
      stats.surrogate += sum / t;
    }
    stats.kl += KlTerm(s.logp_new, s.logp_ref, cfg.aggregation);
  }
  stats.surrogate /= g;
  stats.kl /= g;
  stats.objective = stats.surrogate - cfg.kl_coeff * stats.kl;
  return stats;
}

}  // namespace relr1::grpo
