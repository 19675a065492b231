#include "ihra/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ihra/errors.hpp"
#include "ihra/report.hpp"

namespace ihra {

namespace {

double global_norm(PredictorModel& grads) {
  double sum = 0.0;
  for_each_block(grads, [&](std::span<double> block) {
    for (double g : block) sum += g * g;
  });
  return std::sqrt(sum);
}

void apply_step(PredictorModel& model, PredictorModel& grads, double step) {
  std::vector<std::span<double>> params;
  for_each_block(model, [&](std::span<double> block) { params.push_back(block); });
  std::size_t k = 0;
  for_each_block(grads, [&](std::span<double> block) {
    auto& target = params[k++];
    for (std::size_t i = 0; i < block.size(); ++i) target[i] -= step * block[i];
  });
}

void zero(PredictorModel& grads) {
  for_each_block(grads, [](std::span<double> block) { std::fill(block.begin(), block.end(), 0.0); });
}

}  // namespace

std::string_view to_string(WindowSource source) {
  return source == WindowSource::counts ? "counts" : "peaks";
}

void TrainingOptions::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "must be finite and non-negative");
  }
  if (epochs < 0) throw ConfigError("epochs", "must be non-negative");
  if (window < 1) throw ConfigError("window", "must be at least 1");
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (hidden_size < 1) throw ConfigError("hidden_size", "must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm", "must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction", "must be in [0, 1)");
  }
  if (patience < 1) throw ConfigError("patience", "must be at least 1");
  if (!(input_scale >= 0.0)) throw ConfigError("input_scale", "must be non-negative");
}

std::vector<Sample> make_samples(std::span<const int> series, int window, int horizon,
                                 WindowSource source) {
  if (window < 1 || horizon < 1) throw InputError("make_samples: window and horizon must be positive");
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<Sample> samples;
  if (n < window + horizon) return samples;
  const auto peaks = peak_targets(series, horizon);
  for (std::ptrdiff_t t = window; t + horizon <= n; ++t) {
    Sample s;
    if (source == WindowSource::counts) {
      s.window.assign(series.begin() + (t - window), series.begin() + t);
    } else {
      s.window.assign(peaks.begin() + (t - window), peaks.begin() + t);
    }
    s.target = peaks[static_cast<std::size_t>(t)];
    samples.push_back(std::move(s));
  }
  return samples;
}

TrainingResult train(const UrllcSeries& series, const TrainingOptions& options) {
  options.validate();
  auto samples = make_samples(series.counts, options.window, options.horizon, options.source);
  if (samples.empty()) {
    throw InputError("train: series of " + std::to_string(series.size()) +
                     " slots yields no (window, target) pair");
  }

  auto validation_count = static_cast<std::size_t>(
      std::floor(options.validation_fraction * static_cast<double>(samples.size())));
  if (validation_count >= samples.size()) validation_count = samples.size() - 1;
  const std::size_t train_count = samples.size() - validation_count;
  const std::span<const Sample> train_set(samples.data(), train_count);
  // With no validation samples the training set doubles as the validation set.
  const std::span<const Sample> validation_set =
      validation_count == 0 ? train_set : std::span<const Sample>(samples.data() + train_count, validation_count);

  double scale = options.input_scale;
  if (scale == 0.0) {
    double rate = series.mean_rate;
    if (!(rate > 0.0)) {
      rate = std::accumulate(series.counts.begin(), series.counts.end(), 0.0) /
             static_cast<double>(series.size());
    }
    scale = 4.0 * std::max(rate, 1.0);
  }

  Rng rng(options.seed);
  PredictorShape shape{options.architecture, options.window, options.horizon, options.hidden_size, scale};
  PredictorModel model = PredictorModel::random(shape, rng);
  PredictorModel grads = PredictorModel::zeros(shape);

  TrainingResult result;
  result.model = model;
  result.best_val_rmse = rmse_loss(model, validation_set);
  result.best_epoch = 0;
  result.curve.push_back(EpochRecord{0, rmse_loss(model, train_set), result.best_val_rmse});

  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Sample> batch;
  batch.reserve(static_cast<std::size_t>(options.batch_size));

  int stale = 0;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[rng.below(k)]);
    }
    double squared = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(samples[order[k]]);
      zero(grads);
      const double loss = rmse_loss(model, batch, &grads);
      squared += loss * loss * static_cast<double>(batch.size());
      const double norm = global_norm(grads);
      const double factor = norm > options.clip_norm ? options.clip_norm / norm : 1.0;
      apply_step(model, grads, options.learning_rate * factor);
    }
    const double train_rmse = std::sqrt(squared / static_cast<double>(train_count));
    const double val_rmse = rmse_loss(model, validation_set);
    result.curve.push_back(EpochRecord{epoch, train_rmse, val_rmse});
    if (val_rmse < result.best_val_rmse) {
      result.best_val_rmse = val_rmse;
      result.best_epoch = epoch;
      result.model = model;
      stale = 0;
    } else if (++stale >= options.patience) {
      break;
    }
  }
  return result;
}

Evaluation evaluate(const PredictorModel& model, const UrllcSeries& series, WindowSource source) {
  const auto samples = make_samples(series.counts, model.window, model.horizon, source);
  if (samples.empty()) throw InputError("evaluate: series too short for one window");
  Evaluation ev;
  double squared = 0.0;
  int covered = 0;
  int peak_covered = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double y = forward(samples[k].window, model);
    const int actual = series.counts[k + static_cast<std::size_t>(model.window)];
    const int peak = static_cast<int>(samples[k].target);
    const int rounded = round_prediction(y);
    squared += (y - peak) * (y - peak);
    covered += rounded >= actual ? 1 : 0;
    peak_covered += rounded >= peak ? 1 : 0;
    ev.predictions.push_back(y);
    ev.actual.push_back(actual);
    ev.peaks.push_back(peak);
  }
  const double n = static_cast<double>(samples.size());
  ev.rmse = std::sqrt(squared / n);
  ev.coverage = covered / n;
  ev.peak_coverage = peak_covered / n;
  return ev;
}

void write_curve_csv(std::ostream& out, const std::vector<EpochRecord>& curve) {
  out << "epoch,train_rmse,val_rmse\n";
  for (const auto& r : curve) {
    out << r.epoch << ',' << format_double(r.train_rmse) << ',' << format_double(r.val_rmse) << '\n';
  }
}

}  // namespace ihra
