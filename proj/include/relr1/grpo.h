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

#ifndef RELR1_GRPO_H_
#define RELR1_GRPO_H_

// Group relative policy optimization objective, computed from per-token
// log-probabilities supplied by the caller.
//
//   J = (1/G) sum_i min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i)
//       - kl_coeff * (1/G) sum_i (r_i - log r_i - 1)
//
// with rho_i = pi(o_i)/pi_old(o_i), r_i = pi_ref(o_i)/pi(o_i) and A_i the
// group-standardized reward.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relr1::grpo {

// How per-token quantities combine into one per response. kResponse uses
// sequence probabilities (sums of log-probs); kTokenMean averages the
// per-token surrogate and KL estimator.
enum class Aggregation { kResponse, kTokenMean };

std::string_view AggregationName(Aggregation a);
std::optional<Aggregation> ParseAggregation(std::string_view name);

struct GrpoConfig {
  // Conventional defaults; the objective itself fixes neither.
  double epsilon = 0.2;
  double kl_coeff = 0.04;
  double std_floor = 1e-8;
  Aggregation aggregation = Aggregation::kResponse;

  void Validate() const;
};

struct ResponseSample {
  std::string response_text;
  std::vector<double> logp_new;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
  double reward = 0;
};

struct RolloutGroup {
  std::string prompt_id;
  std::vector<ResponseSample> samples;
};

struct GrpoStats {
  double objective = 0;
  double surrogate = 0;
  double kl = 0;
  std::vector<double> advantages;
  // Response-level ratios; under kTokenMean, the exp of the mean per-token
  // log-ratio.
  std::vector<double> ratios;
};

// (r_i - mean) / std with the population standard deviation. All zeros
// when std < std_floor. Throws Error(kGroupTooSmall) for fewer than two
// rewards.
std::vector<double> Advantages(std::span<const double> rewards,
                               double std_floor = 1e-8);

// exp(sum new - sum old). Throws Error(kLengthMismatch).
double ResponseRatio(std::span<const double> logp_new,
                     std::span<const double> logp_old);
// exp(new_t - old_t) per token. Throws Error(kLengthMismatch).
std::vector<double> TokenRatios(std::span<const double> logp_new,
                                std::span<const double> logp_old);

// r - log r - 1 for r = pi_ref / pi, at response level or as the mean of
// the per-token estimator. Throws Error(kLengthMismatch).
double KlTerm(std::span<const double> logp_new, std::span<const double> logp_ref,
              Aggregation aggregation);

// min(rho A, clip(rho, 1-eps, 1+eps) A)
double ClippedSurrogate(double ratio, double advantage, double epsilon);

// Throws on invalid groups: kGroupTooSmall, kLengthMismatch, or
// kInvalidArgument for empty or non-finite log-prob sequences.
GrpoStats Objective(const RolloutGroup& group, const GrpoConfig& cfg);

}  // namespace relr1::grpo

#endif  // RELR1_GRPO_H_
