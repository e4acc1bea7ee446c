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

#include "div2vec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace div2vec {

Graph preferential_attachment_bipartite(std::size_t users, std::size_t items,
                                        double mean_user_degree,
                                        double attractiveness,
                                        std::uint64_t seed) {
  if (users == 0 || items == 0 || !(mean_user_degree >= 1.0) ||
      !(attractiveness > 0.0)) {
    throw std::invalid_argument("bad preferential attachment parameters");
  }
  std::mt19937_64 rng(seed);
  std::geometric_distribution<std::size_t> extra(1.0 / mean_user_degree);
  std::vector<double> weight(items, attractiveness);
  std::vector<Edge> edges;
  std::vector<std::uint8_t> taken(items, 0);
  std::vector<std::size_t> picked;
  for (std::size_t u = 0; u < users; ++u) {
    std::size_t k = std::min(items, 1 + extra(rng));
    picked.clear();
    // Sequential draws without replacement from the current weights.
    while (picked.size() < k) {
      std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
      std::size_t i = pick(rng);
      if (taken[i]) continue;
      taken[i] = 1;
      picked.push_back(i);
    }
    for (std::size_t i : picked) {
      taken[i] = 0;
      weight[i] += 1.0;
      edges.emplace_back(static_cast<NodeId>(u),
                         static_cast<NodeId>(users + i));
    }
  }
  std::vector<Side> partition(users + items, Side::kItem);
  std::fill(partition.begin(), partition.begin() + static_cast<std::ptrdiff_t>(users),
            Side::kUser);
  return build_graph(edges, users + items, std::move(partition));
}

SyntheticRatings synthetic_movielens(const SyntheticRatingsConfig& c) {
  if (c.users == 0 || c.items == 0 || c.genres == 0 || c.tags == 0) {
    throw std::invalid_argument("synthetic dataset sizes must be positive");
  }
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Items: popularity, genre mix, quality.
  std::vector<std::size_t> rank(c.items);
  std::iota(rank.begin(), rank.end(), std::size_t{1});
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> popularity(c.items);
  for (std::size_t i = 0; i < c.items; ++i) {
    popularity[i] = std::pow(static_cast<double>(rank[i]), -c.popularity_exponent);
  }
  std::uniform_int_distribution<std::size_t> genre_pick(0, c.genres - 1);
  std::vector<std::vector<double>> genre(c.items, std::vector<double>(c.genres, 0.0));
  std::vector<double> quality(c.items);
  for (std::size_t i = 0; i < c.items; ++i) {
    genre[i][genre_pick(rng)] += 1.0;
    if (unit(rng) < 0.5) genre[i][genre_pick(rng)] += 0.5;
    double norm = 0.0;
    for (double g : genre[i]) norm += g * g;
    for (double& g : genre[i]) g /= std::sqrt(norm);
    // Popular items tend to be rated higher.
    double z = -std::log(static_cast<double>(rank[i]) / static_cast<double>(c.items));
    quality[i] = 0.5 * normal(rng) + 0.15 * (z - 1.0);
  }

  // Users: taste over genres (sparse Dirichlet), bias, activity.
  std::gamma_distribution<double> gamma(0.3, 1.0);
  std::lognormal_distribution<double> activity(std::log(c.median_user_ratings), 0.9);
  SyntheticRatings out;
  std::vector<double> taste(c.genres);
  std::vector<std::pair<double, std::size_t>> keys(c.items);
  std::vector<double> affinity(c.items);
  for (std::size_t u = 0; u < c.users; ++u) {
    double sum = 0.0;
    for (double& t : taste) sum += (t = gamma(rng) + 1e-9);
    for (double& t : taste) t /= sum;
    double bias = 0.4 * normal(rng);
    auto n = static_cast<std::size_t>(std::clamp<double>(
        std::round(activity(rng)), static_cast<double>(c.min_user_ratings),
        static_cast<double>(std::min(c.max_user_ratings, c.items))));

    double mean_aff = 0.0;
    for (std::size_t i = 0; i < c.items; ++i) {
      double a = 0.0;
      for (std::size_t g = 0; g < c.genres; ++g) a += taste[g] * genre[i][g];
      affinity[i] = a;
      mean_aff += a;
    }
    mean_aff /= static_cast<double>(c.items);

    // Weighted sampling without replacement via exponential keys.
    for (std::size_t i = 0; i < c.items; ++i) {
      double w = popularity[i] * std::exp(3.0 * affinity[i]);
      keys[i] = {std::log(unit(rng) + 1e-300) / w, i};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n),
                      keys.end(), std::greater<>());
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t i = keys[r].second;
      double score = 3.6 + bias + quality[i] +
                     2.5 * (affinity[i] - mean_aff) + 0.6 * normal(rng);
      double stars = std::clamp(std::round(score * 2.0) / 2.0, 0.5, 5.0);
      out.ratings.push_back({std::to_string(u + 1), std::to_string(i + 1), stars});
    }
  }

  // Tags load on genres; relevance is a squashed genre match plus noise.
  std::vector<std::vector<double>> loading(c.tags, std::vector<double>(c.genres, 0.0));
  for (auto& l : loading) {
    l[genre_pick(rng)] = 1.0;
    if (unit(rng) < 0.3) l[genre_pick(rng)] += 0.5;
  }
  for (std::size_t i = 0; i < c.items; ++i) {
    for (std::size_t t = 0; t < c.tags; ++t) {
      double m = 0.0;
      for (std::size_t g = 0; g < c.genres; ++g) m += genre[i][g] * loading[t][g];
      double rel = 1.0 / (1.0 + std::exp(-(4.0 * m - 2.5 + 0.7 * normal(rng))));
      rel = std::round(rel * 1e5) / 1e5;
      out.tags.push_back({std::to_string(i + 1), std::to_string(t + 1),
                          std::clamp(rel, 1e-5, 1.0)});
    }
  }
  return out;
}

void SyntheticRatings::write_ratings_csv(std::ostream& out) const {
  out << "userId,movieId,rating,timestamp\n";
  char buf[16];
  for (std::size_t r = 0; r < ratings.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%.1f", ratings[r].rating);
    out << ratings[r].user << ',' << ratings[r].item << ',' << buf << ','
        << 1'500'000'000 + r << '\n';
  }
}

void SyntheticRatings::write_tags_csv(std::ostream& out) const {
  out << "movieId,tagId,relevance\n";
  char buf[32];
  for (const auto& c : tags) {
    std::snprintf(buf, sizeof(buf), "%.5f", c.relevance);
    out << c.item << ',' << c.tag << ',' << buf << '\n';
  }
}

}  // namespace div2vec
