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

#include "div2vec/predictor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "div2vec/embed.hpp"
#include "text_util.hpp"

namespace div2vec {

std::string to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

MlpModel MlpModel::zeros(std::size_t input_dim, Activation activation) {
  MlpModel m;
  m.input_dim = input_dim;
  m.activation = activation;
  m.shift.assign(input_dim, 0.0);
  m.scale.assign(input_dim, 1.0);
  m.w1.assign(kHiddenWidth * input_dim, 0.0);
  m.b1.assign(kHiddenWidth, 0.0);
  m.w2.assign(kHiddenWidth, 0.0);
  m.b2 = 0.0;
  return m;
}

namespace {

double activate(Activation a, double x) {
  return a == Activation::kRelu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

// Derivative expressed through the pre-activation.
double activate_grad(Activation a, double x) {
  if (a == Activation::kRelu) return x > 0.0 ? 1.0 : 0.0;
  double t = std::tanh(x);
  return 1.0 - t * t;
}

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                : std::exp(x) / (1.0 + std::exp(x));
}

struct Forward {
  std::vector<double> z;    // standardized input
  std::vector<double> pre;  // hidden pre-activation
  double logit = 0.0;
};

void forward(const MlpModel& m, std::span<const double> x, Forward& f) {
  if (x.size() != m.input_dim) {
    throw std::invalid_argument("feature width " + std::to_string(x.size()) +
                                " does not match model input " +
                                std::to_string(m.input_dim));
  }
  const std::size_t d = m.input_dim;
  f.z.resize(d);
  for (std::size_t i = 0; i < d; ++i) f.z[i] = (x[i] - m.shift[i]) * m.scale[i];
  f.pre.resize(kHiddenWidth);
  double logit = m.b2;
  for (std::size_t h = 0; h < kHiddenWidth; ++h) {
    const double* w = m.w1.data() + h * d;
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= d; i += 4) {
      s0 += w[i] * f.z[i];
      s1 += w[i + 1] * f.z[i + 1];
      s2 += w[i + 2] * f.z[i + 2];
      s3 += w[i + 3] * f.z[i + 3];
    }
    for (; i < d; ++i) s0 += w[i] * f.z[i];
    f.pre[h] = m.b1[h] + ((s0 + s1) + (s2 + s3));
    logit += m.w2[h] * activate(m.activation, f.pre[h]);
  }
  f.logit = logit;
}

// -ln sigmoid(logit) for y = 1, -ln(1 - sigmoid(logit)) for y = 0.
double bce_from_logit(double logit, bool label) {
  return label ? -log_sigmoid(logit) : -log_sigmoid(-logit);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
  for (double x : xs) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
}

void get_doubles(std::istream& in, std::span<double> xs) {
  for (double& x : xs) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
      throw std::runtime_error("truncated model file");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    x = std::bit_cast<double>(v);
  }
}

}  // namespace

void MlpModel::write(std::ostream& out) const {
  out << "div2vec-mlp 1\n"
      << "input_dim " << input_dim << '\n'
      << "hidden " << kHiddenWidth << '\n'
      << "activation " << to_string(activation) << '\n'
      << "params float64le\n";
  put_doubles(out, shift);
  put_doubles(out, scale);
  put_doubles(out, w1);
  put_doubles(out, b1);
  put_doubles(out, w2);
  put_doubles(out, std::span<const double>(&b2, 1));
}

MlpModel MlpModel::read(std::istream& in) {
  auto expect = [&](std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("truncated model header");
    auto f = detail::split_blanks(line);
    if (f.size() != 2 || f[0] != key) {
      throw std::invalid_argument("model header: expected '" +
                                  std::string(key) + " ...', got '" + line + "'");
    }
    return std::string(f[1]);
  };
  if (expect("div2vec-mlp") != "1") {
    throw std::invalid_argument("unsupported model version");
  }
  auto dim = detail::parse_or_throw<std::size_t>(expect("input_dim"), "input_dim", 2);
  if (expect("hidden") != std::to_string(kHiddenWidth)) {
    throw std::invalid_argument("model hidden width must be " +
                                std::to_string(kHiddenWidth));
  }
  MlpModel m = zeros(dim, parse_activation(expect("activation")));
  if (expect("params") != "float64le") {
    throw std::invalid_argument("unsupported parameter encoding");
  }
  get_doubles(in, m.shift);
  get_doubles(in, m.scale);
  get_doubles(in, m.w1);
  get_doubles(in, m.b1);
  get_doubles(in, m.w2);
  get_doubles(in, std::span<double>(&m.b2, 1));
  return m;
}

double mlp_forward(const MlpModel& model, std::span<const double> feature) {
  thread_local Forward f;
  forward(model, feature, f);
  return sigmoid(f.logit);
}

void MlpGradient::clear() {
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  b2 = 0.0;
}

double mlp_accumulate_gradient(const MlpModel& model,
                               std::span<const double> feature, bool label,
                               MlpGradient& grad) {
  thread_local Forward f;
  forward(model, feature, f);
  const std::size_t d = model.input_dim;
  // d loss / d logit = p - y.
  const double delta = sigmoid(f.logit) - (label ? 1.0 : 0.0);
  grad.b2 += delta;
  for (std::size_t h = 0; h < kHiddenWidth; ++h) {
    grad.w2[h] += delta * activate(model.activation, f.pre[h]);
    double dh = delta * model.w2[h] * activate_grad(model.activation, f.pre[h]);
    if (dh == 0.0) continue;
    grad.b1[h] += dh;
    double* g = grad.w1.data() + h * d;
    for (std::size_t i = 0; i < d; ++i) g[i] += dh * f.z[i];
  }
  return bce_from_logit(f.logit, label);
}

double binary_cross_entropy(const MlpModel& model,
                            std::span<const double> feature, bool label) {
  thread_local Forward f;
  forward(model, feature, f);
  return bce_from_logit(f.logit, label);
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || !(learning_rate > 0.0)) {
    throw std::invalid_argument(
        "classifier epochs, batch size and learning rate must be positive");
  }
}

void FeatureSet::add(std::span<const double> feature, bool label) {
  if (width == 0 && labels.empty()) width = feature.size();
  if (feature.size() != width) {
    throw std::invalid_argument("feature width mismatch in feature set");
  }
  values.insert(values.end(), feature.begin(), feature.end());
  labels.push_back(label ? 1 : 0);
}

TrainedClassifier train_classifier(const FeatureSet& data,
                                   const TrainConfig& config) {
  config.validate();
  const std::size_t n = data.size();
  const std::size_t d = data.width;
  auto positives = static_cast<std::size_t>(
      std::count(data.labels.begin(), data.labels.end(), std::uint8_t{1}));
  if (positives == 0 || positives == n) {
    throw std::invalid_argument(
        "classifier training data must contain both labels");
  }

  TrainedClassifier out;
  MlpModel& m = out.model;
  m = MlpModel::zeros(d, config.activation);
  if (config.standardize) {
    for (std::size_t i = 0; i < d; ++i) {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += data.values[r * d + i];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        double c = data.values[r * d + i] - mean;
        var += c * c;
      }
      var /= static_cast<double>(n);
      m.shift[i] = mean;
      m.scale[i] = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    }
  }

  std::mt19937_64 rng(derive_seed(config.seed, 0x3117));
  {
    const double a1 = std::sqrt(6.0 / static_cast<double>(d));
    const double a2 = std::sqrt(6.0 / static_cast<double>(kHiddenWidth + 1));
    std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
    for (double& w : m.w1) w = u1(rng);
    for (double& w : m.w2) w = u2(rng);
  }

  MlpGradient grad(d);
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, 0x5eed, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      std::size_t end = std::min(n, start + config.batch_size);
      grad.clear();
      for (std::size_t k = start; k < end; ++k) {
        loss += mlp_accumulate_gradient(m, data.row(order[k]),
                                        data.labels[order[k]] != 0, grad);
      }
      const double step = config.learning_rate / static_cast<double>(end - start);
      for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= step * grad.w1[i];
      for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        m.b1[h] -= step * grad.b1[h];
        m.w2[h] -= step * grad.w2[h];
      }
      m.b2 -= step * grad.b2;
    }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("classifier loss became non-finite in epoch " +
                               std::to_string(epoch));
    }
    out.epoch_losses.push_back(loss);
  }
  return out;
}

double auc(std::span<const ScoredLabel> scores) {
  std::size_t pos = 0;
  for (const auto& s : scores) pos += s.positive ? 1 : 0;
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("AUC needs at least one positive and one "
                                "negative score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].score < scores[b].score;
  });
  // Twice the positive rank sum keeps mid-ranks integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scores[order[j + 1]].score == scores[order[i]].score) {
      ++j;
    }
    std::uint64_t twice_rank = i + j + 2;  // 2 * mid-rank, 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (scores[order[k]].positive) twice_rank_sum += twice_rank;
    }
    i = j + 1;
  }
  // 2U = 2 R_pos - P (P + 1)
  std::uint64_t twice_u = twice_rank_sum - std::uint64_t{pos} * (pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace div2vec
