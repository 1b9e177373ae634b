#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "prosody/model_io.hpp"
#include "test_util.hpp"

namespace prosody {
namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Parameters random_parameters(std::mt19937_64& rng, std::size_t in, std::size_t hid, std::size_t out) {
  Parameters p(in, hid, out);
  for (std::size_t i = 0; i < p.size(); ++i) p.at(i) = random_vector(rng, 1)[0];
  return p;
}

// Scalar recomputation written independently of the library's loops.
std::vector<double> brute_forward(const Parameters& p, const std::vector<double>& x) {
  std::vector<double> z(p.output);
  for (std::size_t k = 0; k < p.output; ++k) {
    long double acc = p.b2[k];
    for (std::size_t h = 0; h < p.hidden; ++h) {
      long double a = p.b1[h];
      for (std::size_t i = 0; i < p.input; ++i) a += p.w1[h * p.input + i] * x[i];
      acc += p.w2[k * p.hidden + h] * std::tanh(a);
    }
    z[k] = static_cast<double>(acc);
  }
  long double total = 0;
  for (double v : z) total += std::exp(static_cast<long double>(v));
  for (auto& v : z) v = static_cast<double>(std::exp(static_cast<long double>(v)) / total);
  return z;
}

TEST(Forward, ZeroWeightsGiveUniformPosterior) {
  Parameters p(4, 3, 5);
  auto y = forward(p, std::vector<double>{1, 2, 3, 4});
  for (double v : y) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(Forward, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto p = random_parameters(rng, 6, 4, 5);
    auto x = random_vector(rng, 6, 2.0);
    auto a = forward(p, x), b = brute_forward(p, x);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(Forward, DimensionMismatch) {
  Parameters p(4, 3, 5);
  EXPECT_THROW(forward(p, std::vector<double>{1, 2}), DataError);
}

TEST(Softmax, Invariants) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 1000; ++t) {
    auto z = random_vector(rng, 5, 50.0);
    auto y = softmax(z);
    double sum = std::accumulate(y.begin(), y.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (double v : y) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
    auto shifted = z;
    for (auto& v : shifted) v += 123.0;
    auto y2 = softmax(shifted);
    for (std::size_t k = 0; k < y.size(); ++k) EXPECT_NEAR(y[k], y2[k], 1e-12);
  }
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t in, std::size_t classes) {
  Dataset d;
  d.num_classes = classes;
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.inputs.push_back(random_vector(rng, in, 2.0));
    d.labels.push_back(label(rng));
  }
  return d;
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    auto p = random_parameters(rng, 5, 4, 5);
    auto d = random_dataset(rng, 8, 5, 5);
    std::vector<std::size_t> batch(d.size());
    std::iota(batch.begin(), batch.end(), 0);
    auto g = gradient(p, d, batch);
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto plus = p, minus = p;
      plus.at(i) += h;
      minus.at(i) -= h;
      double fd = (mean_loss(plus, d, batch) - mean_loss(minus, d, batch)) / (2 * h);
      double scale = std::max({std::abs(fd), std::abs(g.at(i)), 1e-4});
      EXPECT_LE(std::abs(fd - g.at(i)) / scale, 1e-4) << "parameter " << i;
    }
  }
}

TEST(Gradient, ZeroInputsWithUniformTargetGiveZeroOutputBiasGradient) {
  Parameters p(3, 2, 5);
  Dataset d;
  d.num_classes = 5;
  for (int k = 0; k < 5; ++k) {
    d.inputs.push_back({0.0, 0.0, 0.0});
    d.labels.push_back(k);
  }
  auto g = gradient(p, d, std::vector<std::size_t>{0, 1, 2, 3, 4});
  for (double v : g.b2) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Gradient, EmptyBatchRejected) {
  Parameters p(3, 2, 2);
  Dataset d;
  d.num_classes = 2;
  EXPECT_THROW(gradient(p, d, std::vector<std::size_t>{}), DataError);
}

TEST(Gradient, DuplicatedBatchIsUnchanged) {
  std::mt19937_64 rng(2);
  auto p = random_parameters(rng, 3, 2, 3);
  auto d = random_dataset(rng, 5, 3, 3);
  std::vector<std::size_t> once = {0, 1, 2, 3, 4}, twice = {0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
  auto a = gradient(p, d, once), b = gradient(p, d, twice);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.at(i), b.at(i), 1e-14);
}

Dataset clusters(std::uint64_t seed, std::size_t n, double sigma) {
  // Three centres on an equilateral triangle with side 2.
  const double cx[] = {0.0, 2.0, 1.0}, cy[] = {0.0, 0.0, std::sqrt(3.0)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Dataset d;
  d.num_classes = 3;
  for (std::size_t i = 0; i < n; ++i) {
    int k = static_cast<int>(i % 3);
    d.inputs.push_back({cx[k] + noise(rng), cy[k] + noise(rng)});
    d.labels.push_back(k);
  }
  return d;
}

double argmax_accuracy(const Parameters& p, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto y = forward(p, d.inputs[i]);
    if (static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin()) == d.labels[i]) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

TEST(Train, SeparableClustersReachBayesRate) {
  auto d = clusters(1, 200, 0.1);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.max_epochs = 300;
  auto r = train(d, cfg);
  // Nearest-centre error: each class borders two others at distance 1 from the midpoint.
  double bayes_error = std::min(1.0, 2 * 0.5 * std::erfc(1.0 / (0.1 * std::sqrt(2.0))));
  EXPECT_LT(bayes_error, 1e-6);
  EXPECT_GE(argmax_accuracy(r.params, clusters(2, 600, 0.1)), 0.99);
}

TEST(Train, RandomLabelsStayNearChance) {
  std::mt19937_64 rng(4);
  auto d = random_dataset(rng, 600, 3, 3);
  auto held = random_dataset(rng, 600, 3, 3);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  auto r = train(d, cfg);
  EXPECT_NEAR(argmax_accuracy(r.params, held), 1.0 / 3.0, 0.1);
}

TEST(Train, Deterministic) {
  auto d = clusters(3, 120, 0.5);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.seed = 42;
  auto a = train(d, cfg), b = train(d, cfg);
  ASSERT_EQ(a.params.size(), b.params.size());
  for (std::size_t i = 0; i < a.params.size(); ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.params.at(i)), std::bit_cast<std::uint64_t>(b.params.at(i)));
  EXPECT_EQ(a.log, b.log);
}

TEST(Train, ReturnedWeightsHaveMinimalValidationLoss) {
  auto d = clusters(5, 300, 0.8);
  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.patience = 5;
  auto r = train(d, cfg);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.log) best = std::min(best, e.validation_loss);
  std::vector<std::size_t> val;
  for (auto i = r.validation_begin; i < d.size(); ++i) val.push_back(i);
  EXPECT_DOUBLE_EQ(mean_loss(r.params, d, val), best);
  EXPECT_EQ(r.log[r.best_epoch].validation_loss, best);
  EXPECT_EQ(r.log.front().epoch, 0u);
  for (std::size_t i = 0; i < r.log.size(); ++i) EXPECT_EQ(r.log[i].epoch, i);
}

TEST(Train, PriorsAreTrainingFrequencies) {
  Dataset d;
  d.num_classes = 3;
  for (int i = 0; i < 10; ++i) {
    d.inputs.push_back({static_cast<double>(i)});
    d.labels.push_back(i < 5 ? 0 : (i < 8 ? 1 : 2));
  }
  TrainConfig cfg;
  cfg.max_epochs = 2;
  auto r = train(d, cfg);
  EXPECT_EQ(r.priors, (std::vector<double>{0.5, 0.3, 0.2}));
  EXPECT_NEAR(std::accumulate(r.priors.begin(), r.priors.end(), 0.0), 1.0, 1e-12);
}

TEST(Train, Errors) {
  Dataset empty;
  empty.num_classes = 2;
  EXPECT_THROW(train(empty, {}), DataError);

  Dataset missing;
  missing.num_classes = 3;
  for (int i = 0; i < 10; ++i) {
    missing.inputs.push_back({1.0 * i});
    missing.labels.push_back(i % 2);
  }
  std::vector<std::string> names = {"N", "F", "X"};
  try {
    train(missing, {}, names);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);
  }

  TrainConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Decision, Examples) {
  std::vector<double> uniform(5, 0.2);
  auto a = strict_majority(std::vector<double>{10, 1, 1, 1, 1});
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(*a, 0u);
  EXPECT_FALSE(strict_majority(std::vector<double>{4, 4, 0, 0, 0}).has_value());
  auto d = decide_from_posterior({0.6, 0.1, 0.1, 0.1, 0.1}, uniform);
  EXPECT_EQ(d.answer, std::optional<std::size_t>(0));
  EXPECT_DOUBLE_EQ(d.scaled[0], 3.0);
}

TEST(Decision, Properties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> raw(5), pri(5);
    for (auto& v : raw) v = u(rng) + 1e-6;
    for (auto& v : pri) v = u(rng) + 1e-3;
    auto map = softmax(raw);
    double ps = std::accumulate(pri.begin(), pri.end(), 0.0);
    for (auto& v : pri) v /= ps;
    auto d = decide_from_posterior(map, pri);

    int qualifying = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      double others = 0.0;
      for (std::size_t j = 0; j < 5; ++j)
        if (j != k) others += d.scaled[j];
      if (d.scaled[k] > others) ++qualifying;
    }
    ASSERT_LE(qualifying, 1);
    ASSERT_EQ(qualifying == 1, d.answer.has_value());
    if (d.answer) {
      auto argmax = static_cast<std::size_t>(std::max_element(d.scaled.begin(), d.scaled.end()) - d.scaled.begin());
      ASSERT_EQ(*d.answer, argmax);
    }

    // With uniform priors the rule is "posterior above one half".
    auto du = decide_from_posterior(map, std::vector<double>(5, 0.2));
    auto top = static_cast<std::size_t>(std::max_element(map.begin(), map.end()) - map.begin());
    ASSERT_EQ(du.answer.has_value(), map[top] > 0.5);

    // Raising one class's prior can only remove that class as an answer.
    auto k = t % 5;
    auto raised = pri;
    raised[k] *= 1.5;
    auto dr = decide_from_posterior(map, raised);
    if (dr.answer == std::optional<std::size_t>(k)) {
      ASSERT_EQ(d.answer, std::optional<std::size_t>(k));
    }
  }
}

MlpModel sample_model() {
  std::mt19937_64 rng(8);
  MlpModel m;
  m.input.window = 3;
  m.input.features = {Feature::VowelDuration, Feature::F0Mean};
  m.norm.features = m.input.features;
  m.norm.mean = {0.08, 130.0};
  m.norm.stddev = {0.02, 15.0};
  m.norm.kept = {true, true};
  m.params = random_parameters(rng, 6, 4, 5);
  m.priors = {0.75, 0.06, 0.03, 0.08, 0.08};
  m.class_names = {"Nil", "B", "C", "P", "R"};
  m.seed = 3;
  m.train_log = {{0, 1.6, 1.61}, {1, 1.2, 1.25}};
  m.best_epoch = 1;
  return m;
}

TEST(ModelIo, RoundTripIsBitIdentical) {
  testing::TempDir dir;
  auto m = sample_model();
  save_model(m, dir.path() / "model.bin");
  auto back = load_model(dir.path() / "model.bin");
  EXPECT_EQ(back, m);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    FeatureWindow w;
    w.values = random_vector(rng, 6, 3.0);
    auto a = forward(m, w), b = forward(back, w);
    for (std::size_t k = 0; k < a.size(); ++k)
      ASSERT_EQ(std::bit_cast<std::uint64_t>(a[k]), std::bit_cast<std::uint64_t>(b[k]));
  }
}

TEST(ModelIo, TruncatedFile) {
  auto bytes = serialize_model(sample_model());
  for (std::size_t cut : {std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    try {
      deserialize_model(t);
      FAIL() << "expected ModelFileError";
    } catch (const ModelFileError& e) {
      EXPECT_NE(std::string(e.what()).find("checksum error"), std::string::npos) << e.what();
    }
  }
}

TEST(ModelIo, VersionMismatch) {
  auto bytes = serialize_model(sample_model());
  bytes[8] = 2;
  auto crc = detail::crc32_of(bytes.data(), bytes.size() - 4);
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
  try {
    deserialize_model(bytes);
    FAIL() << "expected ModelFileError";
  } catch (const ModelFileError& e) {
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, MissingFile) {
  testing::TempDir dir;
  EXPECT_THROW(load_model(dir.path() / "none.bin"), DataError);
}

}  // namespace
}  // namespace prosody
