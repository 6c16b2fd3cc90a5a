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

#include "relr1/geom.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relr1/error.h"

namespace relr1 {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kNoSamples: return "NoSamples";
    case ErrorCode::kUnknownKind: return "UnknownKind";
    case ErrorCode::kProvenanceMismatch: return "ProvenanceMismatch";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kBadRecord: return "BadRecord";
    case ErrorCode::kIo: return "IOError";
  }
  return "Unknown";
}

namespace geom {

Ratio::Ratio(int64_t num, int64_t den) {
  if (den == 0) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::optional<Ratio> Ratio::ParseDecimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int64_t num = 0;
  int64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    if (num > 100000000000LL || den > 100000000000LL) return std::nullopt;
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
  }
  if (!seen_digit) return std::nullopt;
  return Ratio(num, den);
}

Ratio Ratio::FromDouble(double value, int64_t max_den) {
  if (!std::isfinite(value) || value < 0 || value > 1e12) {
    throw Error(ErrorCode::kInvalidArgument, "ratio out of range");
  }
  // Continued-fraction convergents, stopping at the denominator bound.
  int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = value;
  for (int i = 0; i < 64; ++i) {
    const double a_f = std::floor(x);
    const auto a = static_cast<int64_t>(a_f);
    const int64_t q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const int64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = x - a_f;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return Ratio(static_cast<int64_t>(std::llround(value)), 1);
  return Ratio(p1, q1);
}

std::string Ratio::ToString() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool operator==(const Ratio& a, const Ratio& b) {
  return a.num_ == b.num_ && a.den_ == b.den_;
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool BoundingBox::IsValid(int64_t x1, int64_t y1, int64_t x2, int64_t y2) {
  if (x1 == -1 && y1 == -1 && x2 == -1 && y2 == -1) return true;
  return x1 >= 0 && y1 >= 0 && x1 <= x2 && y1 <= y2;
}

BoundingBox::BoundingBox(int64_t x1, int64_t y1, int64_t x2, int64_t y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!IsValid(x1, y1, x2, y2)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid box [" + std::to_string(x1) + "," +
                    std::to_string(y1) + "," + std::to_string(x2) + "," +
                    std::to_string(y2) + "]");
  }
}

std::optional<BoundingBox> BoundingBox::TryMake(int64_t x1, int64_t y1,
                                                int64_t x2, int64_t y2) {
  if (!IsValid(x1, y1, x2, y2)) return std::nullopt;
  return BoundingBox(x1, y1, x2, y2);
}

std::string BoundingBox::ToString() const {
  return "[" + std::to_string(x1_) + "," + std::to_string(y1_) + "," +
         std::to_string(x2_) + "," + std::to_string(y2_) + "]";
}

int64_t Area(const BoundingBox& b) {
  if (b.is_sentinel()) return 0;
  return (b.x2() - b.x1()) * (b.y2() - b.y1());
}

int64_t IntersectionArea(const BoundingBox& a, const BoundingBox& b) {
  if (a.is_sentinel() || b.is_sentinel()) return 0;
  const int64_t w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const int64_t h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

Ratio Iou(const BoundingBox& a, const BoundingBox& b) {
  const int64_t area_a = Area(a);
  const int64_t area_b = Area(b);
  if (area_a == 0 || area_b == 0) return Ratio(0, 1);
  const int64_t inter = IntersectionArea(a, b);
  return Ratio(inter, area_a + area_b - inter);
}

}  // namespace geom
}  // namespace relr1
