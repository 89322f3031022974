// Copyright 2026 The dimdecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace dimdecomp {

/// Largest dimension for which subsets are enumerated explicitly.
inline constexpr int kMaxSubsetDim = 24;

/// A subset u of {1, ..., N} stored as a bitmask; bit i stands for the
/// (0-based) coordinate i, printed 1-based.
class Subset {
 public:
  using Mask = std::uint32_t;

  Subset() = default;
  /// Throws std::invalid_argument if dim is outside [0, kMaxSubsetDim] or
  /// mask has bits at or above dim.
  Subset(Mask mask, int dim);

  static Subset empty(int dim) { return Subset(0, dim); }
  static Subset full(int dim) { return Subset(full_mask(dim), dim); }
  /// Builds a subset from 0-based coordinate indices.
  static Subset of(std::initializer_list<int> coords, int dim);

  static constexpr Mask full_mask(int dim) {
    return dim >= 32 ? ~Mask{0} : (Mask{1} << dim) - 1;
  }

  Mask mask() const { return mask_; }
  int dim() const { return dim_; }
  int size() const { return std::popcount(mask_); }
  bool is_empty() const { return mask_ == 0; }
  bool contains(int coord) const { return (mask_ >> coord) & 1u; }
  bool is_subset_of(const Subset& other) const { return (mask_ & ~other.mask_) == 0; }

  Subset complement() const { return Subset(mask_ ^ full_mask(dim_), dim_, Unchecked{}); }

  /// 0-based coordinates in increasing order.
  std::vector<int> coords() const;
  /// Sorted 1-based index list, e.g. "[1,3,7]"; the empty set prints "[]".
  std::string to_string() const;

  friend bool operator==(const Subset&, const Subset&) = default;
  /// Orders by (cardinality, numeric mask).
  friend std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return a.mask_ <=> b.mask_;
  }

 private:
  struct Unchecked {};
  Subset(Mask mask, int dim, Unchecked) : mask_(mask), dim_(dim) {}

  Mask mask_ = 0;
  int dim_ = 0;
};

/// Every subset of {1..dim} with |u| <= max_size, ordered by
/// (cardinality, numeric mask). Throws std::invalid_argument unless
/// 0 <= max_size <= dim <= kMaxSubsetDim.
std::vector<Subset> all_subsets_up_to(int dim, int max_size);

/// Subsets with exactly `size` elements, in increasing mask order.
std::vector<Subset> subsets_of_size(int dim, int size);

/// All v strictly contained in u (the empty set included), ordered by
/// (cardinality, numeric mask). Yields 2^|u| - 1 subsets.
std::vector<Subset> strict_subsets(const Subset& u);

/// Calls f(v) for every v contained in u, including u itself, in
/// decreasing numeric mask order (standard submask walk).
template <class F>
void for_each_submask(Subset::Mask u, F&& f) {
  Subset::Mask v = u;
  while (true) {
    f(v);
    if (v == 0) break;
    v = (v - 1) & u;
  }
}

}  // namespace dimdecomp
