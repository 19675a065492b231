#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "ihra/errors.hpp"
#include "ihra/predictor.hpp"

using namespace ihra;

namespace {

std::vector<Eigen::VectorXd> random_states(int q, int hidden, Rng& rng) {
  std::vector<Eigen::VectorXd> s;
  for (int j = 0; j < q; ++j) {
    Eigen::VectorXd v(hidden);
    for (int k = 0; k < hidden; ++k) v(k) = 2.0 * rng.uniform() - 1.0;
    s.push_back(v);
  }
  return s;
}

Sample random_sample(int q, Rng& rng) {
  Sample s;
  for (int k = 0; k < q; ++k) s.window.push_back(static_cast<double>(rng.poisson(5.0)));
  s.target = static_cast<double>(rng.uniform_int(0, 15)) + 0.5;
  return s;
}

}  // namespace

TEST_CASE("softmax of equal scores is uniform and context is the mean") {
  Rng rng(1);
  const auto states = random_states(4, 3, rng);
  const auto params = AttentionParams::zeros(3, 3);  // v = 0, every score is 0
  const auto r = bahdanau_attention(states, Eigen::VectorXd::Random(3), params);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (const auto& s : states) mean += s / 4.0;
  for (int j = 0; j < 4; ++j) CHECK(r.weights(j) == doctest::Approx(0.25).epsilon(1e-15));
  for (int k = 0; k < 3; ++k) CHECK(r.context(k) == doctest::Approx(mean(k)).epsilon(1e-12));
}

TEST_CASE("saturated softmax selects one state") {
  Eigen::VectorXd scores(4);
  scores << -20, 20, -20, -20;
  const auto a = softmax(scores);
  CHECK(std::abs(a(1) - 1.0) < 1e-15);
  Rng rng(2);
  const auto states = random_states(4, 3, rng);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  for (int j = 0; j < 4; ++j) z += a(j) * states[static_cast<std::size_t>(j)];
  CHECK((z - states[1]).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("attention weights form a distribution and the context stays in the hull") {
  Rng rng(3);
  for (int round = 0; round < 10000; ++round) {
    const int q = rng.uniform_int(1, 12), hidden = rng.uniform_int(1, 6);
    const auto states = random_states(q, hidden, rng);
    auto params = AttentionParams::random(hidden, rng.uniform_int(1, 6), rng);
    params.v *= 10.0 * rng.uniform();
    const auto r = bahdanau_attention(states, random_states(1, hidden, rng)[0], params);
    REQUIRE(std::abs(r.weights.sum() - 1.0) < 1e-9);
    REQUIRE(r.weights.minCoeff() >= 0.0);
    for (int k = 0; k < hidden; ++k) {
      double lo = states[0](k), hi = states[0](k);
      for (const auto& s : states) {
        lo = std::min(lo, s(k));
        hi = std::max(hi, s(k));
      }
      REQUIRE(r.context(k) >= lo - 1e-12);
      REQUIRE(r.context(k) <= hi + 1e-12);
    }
  }
}

TEST_CASE("softmax is shift invariant") {
  Rng rng(4);
  for (int round = 0; round < 1000; ++round) {
    Eigen::VectorXd e = Eigen::VectorXd::Random(rng.uniform_int(1, 10)) * 5.0;
    const double shift = 100.0 * (rng.uniform() - 0.5);
    const Eigen::VectorXd shifted = (e.array() + shift).matrix();
    REQUIRE((softmax(e) - softmax(shifted)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("attention errors") {
  CHECK_THROWS_AS(bahdanau_attention({}, Eigen::VectorXd::Zero(2), AttentionParams::zeros(2, 2)), InputError);
}

TEST_CASE("zero model outputs the head bias") {
  for (auto arch : {Architecture::attention, Architecture::plain}) {
    auto m = PredictorModel::zeros({arch, 10, 5, 8, 20.0});
    m.fc_bias = 3.25;
    const std::vector<double> w{1, 7, 2, 9, 0, 4, 4, 3, 5, 6};
    CHECK(forward(std::span<const double>(w), m) == 3.25);
  }
}

TEST_CASE("forward is deterministic and checks the window length") {
  Rng rng(5);
  const auto m = PredictorModel::random({Architecture::attention, 10, 5, 8, 20.0}, rng);
  const std::vector<int> w{5, 3, 6, 4, 7, 5, 2, 8, 5, 4};
  const double a = forward(std::span<const int>(w), m);
  const double b = forward(std::span<const int>(w), m);
  CHECK(std::isfinite(a));
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  const std::vector<int> short_window{1, 2, 3};
  CHECK_THROWS_AS(forward(std::span<const int>(short_window), m), InputError);
}

TEST_CASE("plain model feeds layer-2 with h1(i) and h1(i-1)") {
  Rng rng(6);
  const auto m = PredictorModel::random({Architecture::plain, 4, 5, 3, 20.0}, rng);
  const std::vector<double> w{2, 5, 1, 7};
  const auto t = forward_trace(w, m);
  // Rebuild the output by hand from the layer-1 states.
  Eigen::VectorXd h2 = Eigen::VectorXd::Zero(3), c2 = Eigen::VectorXd::Zero(3);
  for (int i = 1; i <= 4; ++i) {
    Eigen::VectorXd x(6);
    x << t.h1[static_cast<std::size_t>(i)], t.h1[static_cast<std::size_t>(i - 1)];
    const auto s = lstm_cell(x, h2, c2, m.lstm2);
    h2 = s.h;
    c2 = s.c;
  }
  CHECK(t.output == doctest::Approx(m.fc_weight.dot(h2) + m.fc_bias).epsilon(1e-14));
  CHECK(m.parameter_count() < PredictorModel::random({Architecture::attention, 4, 5, 3, 20.0}, rng).parameter_count());
}

TEST_CASE("attention model rebuilds from per-step attention") {
  Rng rng(7);
  const auto m = PredictorModel::random({Architecture::attention, 5, 5, 4, 20.0}, rng);
  const std::vector<double> w{2, 5, 1, 7, 3};
  const auto t = forward_trace(w, m);
  const std::vector<Eigen::VectorXd> states(t.h1.begin() + 1, t.h1.end());
  Eigen::VectorXd h2 = Eigen::VectorXd::Zero(4), c2 = Eigen::VectorXd::Zero(4);
  for (int i = 1; i <= 5; ++i) {
    const auto att = bahdanau_attention(states, t.h1[static_cast<std::size_t>(i - 1)], m.attention);
    Eigen::VectorXd x(8);
    x << att.context, t.h1[static_cast<std::size_t>(i - 1)];
    const auto s = lstm_cell(x, h2, c2, m.lstm2);
    h2 = s.h;
    c2 = s.c;
  }
  CHECK(t.output == doctest::Approx(m.fc_weight.dot(h2) + m.fc_bias).epsilon(1e-13));
}

TEST_CASE("gradient check on random models") {
  Rng rng(8);
  for (int round = 0; round < 20; ++round) {
    const auto arch = round % 2 ? Architecture::plain : Architecture::attention;
    const int q = rng.uniform_int(2, 10);
    const auto m = PredictorModel::random({arch, q, 5, rng.uniform_int(2, 8), 20.0}, rng);
    const auto s = random_sample(q, rng);
    CAPTURE(round);
    CHECK(gradient_check(m, s) < 1e-4);
  }
}

TEST_CASE("head bias gradient of a zero model") {
  auto m = PredictorModel::zeros({Architecture::attention, 3, 5, 4, 20.0});
  m.fc_bias = 2.0;
  Sample s{{1, 2, 3}, 6.5};
  auto grads = PredictorModel::zeros({Architecture::attention, 3, 5, 4, 20.0});
  const double loss = rmse_loss(m, std::span<const Sample>(&s, 1), &grads);
  CHECK(loss == doctest::Approx(4.5));
  // d|b - t|/db = sign(b - t) = -1
  CHECK(std::abs(grads.fc_bias - (-1.0)) < 1e-6);
  CHECK(gradient_check(m, s) == gradient_check(m, s));
}

TEST_CASE("batch rmse") {
  auto m = PredictorModel::zeros({Architecture::plain, 2, 5, 2, 20.0});
  m.fc_bias = 1.0;
  const std::vector<Sample> batch{{{0, 0}, 4.0}, {{0, 0}, -2.0}};
  CHECK(rmse_loss(m, batch) == doctest::Approx(std::sqrt((9.0 + 9.0) / 2.0)));
  CHECK_THROWS_AS(rmse_loss(m, std::span<const Sample>()), InputError);
}

TEST_CASE("round_prediction") {
  CHECK(round_prediction(4.5) == 5);
  CHECK(round_prediction(2.2) == 2);
  CHECK(round_prediction(-0.3) == 0);
  CHECK(round_prediction(-2.5) == 0);
  CHECK(round_prediction(3.4999) == 3);
  CHECK_THROWS_AS(round_prediction(std::nan("")), InputError);
  CHECK_THROWS_AS(round_prediction(INFINITY), InputError);
}

TEST_CASE("peak_targets") {
  const std::vector<int> a{5, 2, 7, 1, 3};
  CHECK(peak_targets(a, 5) == std::vector<int>{7});
  const std::vector<int> ones(6, 1);
  CHECK(peak_targets(ones, 5) == std::vector<int>{1, 1});
  const std::vector<int> b{4, 0, 9, 2};
  CHECK(peak_targets(b, 1) == b);
  CHECK(peak_targets(b, 2) == std::vector<int>{4, 9, 9});
  CHECK_THROWS_AS(peak_targets(b, 5), InputError);
  CHECK_THROWS_AS(peak_targets(b, 0), InputError);
}

TEST_CASE("model validation") {
  auto m = PredictorModel::zeros({Architecture::attention, 3, 5, 4, 20.0});
  CHECK_NOTHROW(m.validate());
  m.fc_bias = NAN;
  CHECK_THROWS_AS(m.validate(), InputError);
  CHECK_THROWS_AS(PredictorModel::zeros({Architecture::attention, 0, 5, 4, 20.0}), InputError);
}
