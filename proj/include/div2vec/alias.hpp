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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace div2vec {

// Fills `prob` and `alias` (both weights.size() long) with Vose's alias
// table for the given nonnegative weights. Throws std::invalid_argument if
// the weights are empty, contain a negative or non-finite entry, or sum to
// zero.
void build_alias(std::span<const double> weights, std::span<double> prob,
                 std::span<std::uint32_t> alias);

// Draws one index from an alias table in O(1).
template <typename Rng>
std::uint32_t sample_alias(std::span<const double> prob,
                           std::span<const std::uint32_t> alias, Rng& rng) {
  std::uniform_int_distribution<std::uint32_t> column(
      0, static_cast<std::uint32_t>(prob.size() - 1));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uint32_t c = column(rng);
  return coin(rng) < prob[c] ? c : alias[c];
}

// Owning alias table over a fixed categorical distribution.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }

  template <typename Rng>
  std::uint32_t sample(Rng& rng) const {
    return sample_alias<Rng>(prob_, alias_, rng);
  }

  // The distribution the table encodes, reconstructed from prob/alias. It
  // equals the normalized input weights up to rounding.
  std::vector<double> distribution() const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace div2vec
