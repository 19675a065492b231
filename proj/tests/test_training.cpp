#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ihra/errors.hpp"
#include "ihra/training.hpp"

using namespace ihra;

namespace {

TrainingOptions quick_options() {
  TrainingOptions o;
  o.hidden_size = 8;
  o.window = 5;
  o.batch_size = 1;
  o.epochs = 60;
  o.patience = 60;
  o.seed = 3;
  return o;
}

UrllcSeries constant_series(int value, std::size_t n) {
  UrllcSeries s;
  s.counts.assign(n, value);
  s.mean_rate = value;
  return s;
}

}  // namespace

TEST_CASE("make_samples pairs windows with peak targets") {
  const std::vector<int> s{1, 4, 2, 0, 3, 5, 1};
  const auto counts = make_samples(s, 2, 3);
  REQUIRE(counts.size() == 3);  // t = 2, 3, 4
  CHECK(counts[0].window == std::vector<double>{1, 4});
  CHECK(counts[0].target == 3);  // max(2, 0, 3)
  CHECK(counts[2].window == std::vector<double>{2, 0});
  CHECK(counts[2].target == 5);  // max(3, 5, 1)

  const auto peaks = make_samples(s, 2, 3, WindowSource::peaks);
  REQUIRE(peaks.size() == 3);
  CHECK(peaks[0].window == std::vector<double>{4, 4});  // p[0], p[1]
  CHECK(peaks[0].target == 3);
  CHECK(peaks[2].window == std::vector<double>{3, 5});

  CHECK(make_samples(s, 5, 3).empty());
}

TEST_CASE("training on a constant series learns the constant") {
  const auto series = constant_series(5, 1000);
  const auto result = train(series, quick_options());
  const std::vector<int> window(5, 5);
  const double y = forward(std::span<const int>(window), result.model);
  CHECK(std::abs(y - 5.0) < 0.5);
  const auto ev = evaluate(result.model, constant_series(5, 200));
  CHECK(ev.rmse < 0.5);
  CHECK(ev.coverage == 1.0);
}

TEST_CASE("a model trained on constant c predicts within 1 of c") {
  for (int c : {2, 8}) {
    const auto result = train(constant_series(c, 1000), quick_options());
    const std::vector<int> window(5, c);
    CAPTURE(c);
    CHECK(std::abs(forward(std::span<const int>(window), result.model) - c) < 1.0);
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Rng rng(1);
  const auto series = poisson_series(5.0, 300, rng);
  auto o = quick_options();
  o.learning_rate = 0.0;
  o.epochs = 3;
  const auto result = train(series, o);
  Rng init(o.seed);
  const auto initial = PredictorModel::random({o.architecture, o.window, o.horizon, o.hidden_size, 20.0}, init);
  std::vector<double> a, b;
  for_each_block(result.model, [&](std::span<const double> s) { a.insert(a.end(), s.begin(), s.end()); });
  for_each_block(initial, [&](std::span<const double> s) { b.insert(b.end(), s.begin(), s.end()); });
  CHECK(a == b);
  for (std::size_t k = 1; k < result.curve.size(); ++k) {
    CHECK(result.curve[k].val_rmse == result.curve[0].val_rmse);
  }
}

TEST_CASE("training is deterministic and keeps the best validation epoch") {
  Rng rng(2);
  const auto series = poisson_series(5.0, 400, rng);
  auto o = quick_options();
  o.epochs = 5;
  const auto a = train(series, o);
  const auto b = train(series, o);
  std::ostringstream ca, cb;
  write_curve_csv(ca, a.curve);
  write_curve_csv(cb, b.curve);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("epoch,train_rmse,val_rmse\n0,", 0) == 0);
  double best = a.curve[0].val_rmse;
  for (const auto& r : a.curve) best = std::min(best, r.val_rmse);
  CHECK(a.best_val_rmse == best);
  CHECK(a.curve[static_cast<std::size_t>(a.best_epoch)].val_rmse == best);
}

TEST_CASE("early stopping") {
  Rng rng(3);
  const auto series = poisson_series(5.0, 300, rng);
  auto o = quick_options();
  o.learning_rate = 0.0;
  o.epochs = 50;
  o.patience = 4;
  const auto result = train(series, o);
  CHECK(result.curve.size() == 5);  // epoch 0 plus four stale epochs
}

TEST_CASE("training input errors") {
  CHECK_THROWS_AS(train(constant_series(3, 8), quick_options()), InputError);
  auto o = quick_options();
  o.learning_rate = -1;
  CHECK_THROWS_AS(train(constant_series(3, 100), o), ConfigError);
  o = quick_options();
  o.batch_size = 0;
  CHECK_THROWS_AS(train(constant_series(3, 100), o), ConfigError);
}

TEST_CASE("one training pair is enough") {
  auto o = quick_options();
  o.epochs = 2;
  const auto r = train(constant_series(4, 10), o);  // 10 - 5 - 5 + 1 = 1 pair
  CHECK(r.curve.size() == 3);
}

TEST_CASE("evaluation coverage against slot counts") {
  auto m = PredictorModel::zeros({Architecture::plain, 2, 2, 2, 20.0});
  m.fc_bias = 3.0;
  UrllcSeries s;
  s.counts = {0, 0, 2, 5, 3, 1};
  const auto ev = evaluate(m, s);
  // t = 2..4: actual 2, 5, 3; peaks 5, 5, 3
  REQUIRE(ev.actual == std::vector<int>{2, 5, 3});
  REQUIRE(ev.peaks == std::vector<int>{5, 5, 3});
  CHECK(ev.coverage == doctest::Approx(2.0 / 3.0));
  CHECK(ev.peak_coverage == doctest::Approx(1.0 / 3.0));
  CHECK(ev.rmse == doctest::Approx(std::sqrt((4.0 + 4.0 + 0.0) / 3.0)));
}
