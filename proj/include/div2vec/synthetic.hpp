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

// Synthetic inputs for tests, benchmarks and offline reproduction runs.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "div2vec/graph.hpp"

namespace div2vec {

// User-item preferential attachment: users arrive one at a time and attach
// to a geometric(mean_user_degree) number of distinct items, each chosen
// with probability proportional to (item degree + attractiveness). Users
// are nodes [0, users), items [users, users + items).
Graph preferential_attachment_bipartite(std::size_t users, std::size_t items,
                                        double mean_user_degree,
                                        double attractiveness,
                                        std::uint64_t seed);

struct SyntheticRatingsConfig {
  std::size_t users = 943;
  std::size_t items = 1682;
  std::size_t genres = 8;
  std::size_t tags = 32;
  // Median ratings per user; counts are log-normal, clipped to
  // [min_user_ratings, max_user_ratings].
  double median_user_ratings = 65.0;
  std::size_t min_user_ratings = 20;
  std::size_t max_user_ratings = 700;
  // Zipf exponent of item popularity.
  double popularity_exponent = 0.9;
  std::uint64_t seed = 1;
};

struct SyntheticRatings {
  std::vector<RatingRecord> ratings;
  // (item, tag, relevance) triples covering every item x tag cell.
  struct TagCell {
    std::string item;
    std::string tag;
    double relevance;
  };
  std::vector<TagCell> tags;

  // MovieLens-style "userId,movieId,rating,timestamp" CSV.
  void write_ratings_csv(std::ostream& out) const;
  // "movieId,tagId,relevance" CSV.
  void write_tags_csv(std::ostream& out) const;
};

// MovieLens-like ratings: popularity-skewed item exposure, users with latent
// genre tastes, half-star ratings driven by user bias, item quality and
// taste affinity, and tag relevances derived from item genres.
SyntheticRatings synthetic_movielens(const SyntheticRatingsConfig& config);

}  // namespace div2vec
