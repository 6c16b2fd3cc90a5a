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

#ifndef RELR1_GEOM_H_
#define RELR1_GEOM_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace relr1::geom {

// Exact non-negative rational with a positive denominator. Comparisons are
// done by 128-bit cross multiplication so thresholds such as 1/2 are
// tie-stable.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(int64_t num, int64_t den);

  // Parses a plain decimal ("0.5", "1", ".75") exactly.
  static std::optional<Ratio> ParseDecimal(std::string_view text);
  // Closest fraction with denominator <= max_den.
  static Ratio FromDouble(double value, int64_t max_den = 1000000);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string ToString() const;

  friend bool operator==(const Ratio& a, const Ratio& b);
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

 private:
  int64_t num_ = 0;
  int64_t den_ = 1;
};

// Axis-aligned integer pixel rectangle (top-left, bottom-right), or the
// ungrounded sentinel [-1,-1,-1,-1]. Area uses the continuous convention
// (x2-x1)*(y2-y1), so [0,0,1,1] has area 1.
class BoundingBox {
 public:
  // The sentinel.
  constexpr BoundingBox() = default;
  // Throws Error(kInvalidArgument) unless the coordinates satisfy the
  // invariants.
  BoundingBox(int64_t x1, int64_t y1, int64_t x2, int64_t y2);

  static std::optional<BoundingBox> TryMake(int64_t x1, int64_t y1,
                                            int64_t x2, int64_t y2);
  static constexpr BoundingBox Sentinel() { return BoundingBox(); }
  static bool IsValid(int64_t x1, int64_t y1, int64_t x2, int64_t y2);

  int64_t x1() const { return x1_; }
  int64_t y1() const { return y1_; }
  int64_t x2() const { return x2_; }
  int64_t y2() const { return y2_; }
  bool is_sentinel() const { return x1_ < 0; }

  // "[x1,y1,x2,y2]"
  std::string ToString() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;

 private:
  int64_t x1_ = -1;
  int64_t y1_ = -1;
  int64_t x2_ = -1;
  int64_t y2_ = -1;
};

int64_t Area(const BoundingBox& b);
int64_t IntersectionArea(const BoundingBox& a, const BoundingBox& b);

// Intersection over union as an exact fraction. Zero when either operand is
// the sentinel or has zero area, even for coincident boxes.
Ratio Iou(const BoundingBox& a, const BoundingBox& b);

inline bool IouAtLeast(const BoundingBox& a, const BoundingBox& b,
                       const Ratio& threshold) {
  return Iou(a, b) >= threshold;
}

}  // namespace relr1::geom

#endif  // RELR1_GEOM_H_
