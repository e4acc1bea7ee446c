// Copyright 2026 The div2vec Authors. All Rights Reserved.
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

#include "div2vec/alias.hpp"

#include <cmath>
#include <stdexcept>

namespace div2vec {

void build_alias(std::span<const double> weights, std::span<double> prob,
                 std::span<std::uint32_t> alias) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table over no outcomes");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("alias weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("alias weights sum to 0");

  // Scaled so the mean is 1.
  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    prob[i] = weights[i] * static_cast<double>(n) / total;
    alias[i] = static_cast<std::uint32_t>(i);
    (prob[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    alias[s] = l;
    prob[l] = (prob[l] + prob[s]) - 1.0;
    if (prob[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) prob[i] = 1.0;
  for (auto i : small) prob[i] = 1.0;
}

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size()), alias_(weights.size()) {
  build_alias(weights, prob_, alias_);
}

std::vector<double> AliasTable::distribution() const {
  const double n = static_cast<double>(prob_.size());
  std::vector<double> p(prob_.size(), 0.0);
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    p[i] += prob_[i] / n;
    p[alias_[i]] += (1.0 - prob_[i]) / n;
  }
  return p;
}

}  // namespace div2vec
