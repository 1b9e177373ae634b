#ifndef PROSODY_MLP_HPP
#define PROSODY_MLP_HPP

// Single-hidden-layer perceptron: tanh hidden units, softmax outputs read
// as class posteriors, trained by mini-batch gradient descent on mean
// cross-entropy with early stopping on a chronological validation tail.
// Posteriors divided by class priors give scaled likelihoods; the network
// answers only when one scaled likelihood exceeds the sum of the others.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "prosody/error.hpp"
#include "prosody/features.hpp"
#include "prosody/labels.hpp"

namespace prosody {

/// Weights of both layers, row-major: w1 is hidden x input, w2 is output x hidden.
struct Parameters {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t output = 0;
  std::vector<double> w1, b1, w2, b2;

  Parameters() = default;
  Parameters(std::size_t in, std::size_t hid, std::size_t out)
      : input(in), hidden(hid), output(out), w1(hid * in, 0.0), b1(hid, 0.0), w2(out * hid, 0.0), b2(out, 0.0) {}

  std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  /// Flat view order: w1, b1, w2, b2.
  double& at(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    return b2.at(i - w2.size());
  }
  double at(std::size_t i) const { return const_cast<Parameters*>(this)->at(i); }

  /// this += scale * other
  void add_scaled(const Parameters& other, double scale) {
    auto axpy = [scale](std::vector<double>& y, const std::vector<double>& x) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * x[i];
    };
    axpy(w1, other.w1);
    axpy(b1, other.b1);
    axpy(w2, other.w2);
    axpy(b2, other.b2);
  }

  bool all_finite() const {
    auto ok = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return ok(w1) && ok(b1) && ok(w2) && ok(b2);
  }

  bool operator==(const Parameters&) const = default;
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero.
inline Parameters init_parameters(std::size_t input, std::size_t hidden, std::size_t output, std::uint64_t seed) {
  Parameters p(input, hidden, output);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u1(-1.0 / std::sqrt(static_cast<double>(input)),
                                            1.0 / std::sqrt(static_cast<double>(input)));
  std::uniform_real_distribution<double> u2(-1.0 / std::sqrt(static_cast<double>(hidden)),
                                            1.0 / std::sqrt(static_cast<double>(hidden)));
  for (auto& w : p.w1) w = u1(rng);
  for (auto& w : p.w2) w = u2(rng);
  return p;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  double mx = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (auto& v : out) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : out) v /= sum;
  return out;
}

namespace detail {

struct Activations {
  std::vector<double> hidden;
  std::vector<double> posterior;
};

inline Activations activate(const Parameters& p, std::span<const double> x) {
  if (x.size() != p.input)
    throw DataError("input has " + std::to_string(x.size()) + " values, model expects " + std::to_string(p.input));
  Activations a;
  a.hidden.resize(p.hidden);
  for (std::size_t h = 0; h < p.hidden; ++h) {
    double z = p.b1[h];
    const double* row = &p.w1[h * p.input];
    for (std::size_t i = 0; i < p.input; ++i) z += row[i] * x[i];
    a.hidden[h] = std::tanh(z);
  }
  std::vector<double> logits(p.output);
  for (std::size_t k = 0; k < p.output; ++k) {
    double z = p.b2[k];
    const double* row = &p.w2[k * p.hidden];
    for (std::size_t h = 0; h < p.hidden; ++h) z += row[h] * a.hidden[h];
    logits[k] = z;
  }
  a.posterior = softmax(logits);
  return a;
}

}  // namespace detail

/// Class posteriors for one input vector.
inline std::vector<double> forward(const Parameters& p, std::span<const double> x) {
  return detail::activate(p, x).posterior;
}

/// Inputs and class labels; labels index the network outputs.
struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
};

inline double example_loss(const std::vector<double>& posterior, int label) {
  return -std::log(std::max(posterior[static_cast<std::size_t>(label)], std::numeric_limits<double>::min()));
}

/// Mean cross-entropy over the given example indices.
inline double mean_loss(const Parameters& p, const Dataset& data, std::span<const std::size_t> indices) {
  if (indices.empty()) return 0.0;
  double sum = 0.0;
  for (auto i : indices) sum += example_loss(forward(p, data.inputs[i]), data.labels[i]);
  return sum / static_cast<double>(indices.size());
}

/// Exact gradient of the mean cross-entropy over the batch.
inline Parameters gradient(const Parameters& p, const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw DataError("gradient of an empty batch");
  Parameters g(p.input, p.hidden, p.output);
  std::vector<double> dz2(p.output), dz1(p.hidden);
  for (auto idx : batch) {
    const auto& x = data.inputs[idx];
    auto a = detail::activate(p, x);
    auto y = static_cast<std::size_t>(data.labels[idx]);
    for (std::size_t k = 0; k < p.output; ++k) dz2[k] = a.posterior[k] - (k == y ? 1.0 : 0.0);
    for (std::size_t k = 0; k < p.output; ++k) {
      g.b2[k] += dz2[k];
      double* row = &g.w2[k * p.hidden];
      for (std::size_t h = 0; h < p.hidden; ++h) row[h] += dz2[k] * a.hidden[h];
    }
    for (std::size_t h = 0; h < p.hidden; ++h) {
      double back = 0.0;
      for (std::size_t k = 0; k < p.output; ++k) back += p.w2[k * p.hidden + h] * dz2[k];
      dz1[h] = back * (1.0 - a.hidden[h] * a.hidden[h]);
    }
    for (std::size_t h = 0; h < p.hidden; ++h) {
      g.b1[h] += dz1[h];
      double* row = &g.w1[h * p.input];
      for (std::size_t i = 0; i < p.input; ++i) row[i] += dz1[h] * x[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < g.size(); ++i) g.at(i) *= inv;
  return g;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t hidden_size = 10;
  double learning_rate = 0.01;
  std::size_t max_epochs = 500;
  std::size_t patience = 20;
  double validation_fraction = 0.1;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;

  void validate() const {
    if (hidden_size < 1) throw ConfigError("hidden size must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
    if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
    if (patience < 1) throw ConfigError("patience must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
      throw ConfigError("validation fraction must be in (0,1)");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
  }
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  bool operator==(const EpochLog&) const = default;
};

struct TrainResult {
  Parameters params;          ///< from the best validation epoch
  std::vector<double> priors;  ///< class frequencies of the whole training set
  std::vector<EpochLog> log;   ///< epoch 0 is the initialization
  std::size_t best_epoch = 0;
  std::size_t validation_begin = 0;  ///< examples [validation_begin, n) were held out
};

inline TrainResult train(const Dataset& data, const TrainConfig& config,
                         std::span<const std::string> class_names = {}) {
  config.validate();
  const std::size_t n = data.size();
  if (n == 0) throw DataError("empty training set");
  if (data.num_classes < 2) throw DataError("need at least 2 classes");
  if (data.inputs.size() != n) throw DataError("inputs and labels differ in length");
  const std::size_t input = data.inputs.front().size();
  for (const auto& x : data.inputs)
    if (x.size() != input) throw DataError("inconsistent input sizes");

  std::vector<std::size_t> counts(data.num_classes, 0);
  for (int y : data.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= data.num_classes) throw DataError("label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }

  TrainResult result;
  result.priors = priors_from_counts(counts, class_names);

  std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(n * config.validation_fraction)));
  if (n_val >= n) throw DataError("training set too small for a validation split");
  const std::size_t n_fit = n - n_val;
  result.validation_begin = n_fit;

  std::vector<std::size_t> fit(n_fit), val(n_val);
  for (std::size_t i = 0; i < n_fit; ++i) fit[i] = i;
  for (std::size_t i = 0; i < n_val; ++i) val[i] = n_fit + i;

  Parameters p = init_parameters(input, config.hidden_size, data.num_classes, config.seed);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  double best = mean_loss(p, data, val);
  result.params = p;
  result.log.push_back({0, mean_loss(p, data, fit), best});
  std::size_t stall = 0;

  std::vector<std::size_t> order = fit;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n_fit; start += config.batch_size) {
      auto len = std::min(config.batch_size, n_fit - start);
      auto g = gradient(p, data, std::span<const std::size_t>(order).subspan(start, len));
      p.add_scaled(g, -config.learning_rate);
    }
    if (!p.all_finite()) throw DataError("training diverged (non-finite weights); lower the learning rate");
    double vloss = mean_loss(p, data, val);
    result.log.push_back({epoch, mean_loss(p, data, fit), vloss});
    if (vloss < best) {
      best = vloss;
      result.params = p;
      result.best_epoch = epoch;
      stall = 0;
    } else if (++stall >= config.patience) {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Decision rule

struct SpotDecision {
  std::vector<double> map;     ///< posteriors
  std::vector<double> scaled;  ///< posterior / prior
  std::optional<std::size_t> answer;
};

/// Index k with scaled[k] > sum of the others, if any. At most one k qualifies.
inline std::optional<std::size_t> strict_majority(std::span<const double> scaled) {
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    double others = 0.0;
    for (std::size_t j = 0; j < scaled.size(); ++j)
      if (j != k) others += scaled[j];
    if (scaled[k] > others) return k;
  }
  return std::nullopt;
}

inline SpotDecision decide_from_posterior(std::vector<double> map, std::span<const double> priors) {
  if (priors.size() != map.size()) throw DataError("prior vector does not match the number of outputs");
  SpotDecision d;
  d.scaled.resize(map.size());
  for (std::size_t k = 0; k < map.size(); ++k) {
    if (!(priors[k] > 0.0)) throw DataError("priors must be strictly positive");
    d.scaled[k] = map[k] / priors[k];
  }
  d.map = std::move(map);
  d.answer = strict_majority(d.scaled);
  return d;
}

// ---------------------------------------------------------------------------
// Model

/// How the model's input vectors are built from a corpus.
struct InputSpec {
  std::size_t window = 7;
  FeatureSelection features = default_mark_features();
  bool semitones = false;
  bool operator==(const InputSpec&) const = default;
};

struct MlpModel {
  Parameters params;
  std::vector<double> priors;
  NormStats norm;
  InputSpec input;
  Task task = Task::Mark;
  std::vector<std::string> class_names;
  unsigned vote_threshold = 3;
  std::uint64_t seed = 0;
  std::vector<EpochLog> train_log;
  std::size_t best_epoch = 0;

  std::size_t output_size() const { return params.output; }
  bool operator==(const MlpModel&) const = default;
};

inline std::vector<double> forward(const MlpModel& model, const FeatureWindow& window) {
  return forward(model.params, window.values);
}

inline SpotDecision decide(const MlpModel& model, const FeatureWindow& window) {
  return decide_from_posterior(forward(model, window), model.priors);
}

}  // namespace prosody

#endif  // PROSODY_MLP_HPP
