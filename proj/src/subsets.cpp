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

#include "dimdecomp/subsets.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dimdecomp {

Subset::Subset(Mask mask, int dim) : mask_(mask), dim_(dim) {
  if (dim < 0 || dim > kMaxSubsetDim) {
    std::ostringstream msg;
    msg << "subset dimension " << dim << " outside [0, " << kMaxSubsetDim << "]";
    throw std::invalid_argument(msg.str());
  }
  if ((mask & ~full_mask(dim)) != 0) throw std::invalid_argument("subset mask has bits above dimension");
}

Subset Subset::of(std::initializer_list<int> coords, int dim) {
  Mask m = 0;
  for (int c : coords) {
    if (c < 0 || c >= dim) throw std::invalid_argument("subset coordinate out of range");
    m |= Mask{1} << c;
  }
  return Subset(m, dim);
}

std::vector<int> Subset::coords() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (Mask m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::string Subset::to_string() const {
  std::string out = "[";
  bool first = true;
  for (int c : coords()) {
    if (!first) out += ',';
    out += std::to_string(c + 1);
    first = false;
  }
  out += ']';
  return out;
}

std::vector<Subset> subsets_of_size(int dim, int size) {
  if (dim < 0 || dim > kMaxSubsetDim) throw std::invalid_argument("dimension exceeds subset cap");
  std::vector<Subset> out;
  if (size < 0 || size > dim) return out;
  if (size == 0) {
    out.push_back(Subset::empty(dim));
    return out;
  }
  // Gosper's hack walks masks of fixed popcount in increasing order.
  const Subset::Mask limit = Subset::Mask{1} << dim;
  for (Subset::Mask m = (Subset::Mask{1} << size) - 1; m < limit;) {
    out.emplace_back(m, dim);
    const Subset::Mask low = m & (~m + 1);
    const Subset::Mask ripple = m + low;
    m = (((ripple ^ m) >> 2) / low) | ripple;
  }
  return out;
}

std::vector<Subset> all_subsets_up_to(int dim, int max_size) {
  if (dim > kMaxSubsetDim) {
    std::ostringstream msg;
    msg << "dimension " << dim << " exceeds subset enumeration cap " << kMaxSubsetDim;
    throw std::invalid_argument(msg.str());
  }
  if (dim < 0 || max_size < 0 || max_size > dim)
    throw std::invalid_argument("require 0 <= S <= N for subset enumeration");
  std::vector<Subset> out;
  for (int s = 0; s <= max_size; ++s) {
    auto layer = subsets_of_size(dim, s);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::vector<Subset> strict_subsets(const Subset& u) {
  std::vector<Subset> out;
  out.reserve((std::size_t{1} << u.size()) - 1);
  for_each_submask(u.mask(), [&](Subset::Mask v) {
    if (v != u.mask()) out.emplace_back(v, u.dim());
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dimdecomp
