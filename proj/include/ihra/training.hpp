#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ihra/predictor.hpp"
#include "ihra/traffic.hpp"

namespace ihra {

/// What the input window holds. `counts`: the raw per-slot counts preceding
/// slot t. `peaks`: the peak series itself, so the model forecasts the next
/// element of the series it is fed.
enum class WindowSource { counts, peaks };

std::string_view to_string(WindowSource source);

struct TrainingOptions {
  Architecture architecture = Architecture::attention;
  WindowSource source = WindowSource::counts;
  double learning_rate = 0.001;
  int epochs = 200;
  int window = 10;
  int horizon = 5;
  int hidden_size = 32;
  std::uint64_t seed = 1;
  int batch_size = 32;
  double clip_norm = 5.0;
  double validation_fraction = 0.2;
  int patience = 20;          // epochs without validation improvement before stopping
  double input_scale = 0.0;   // 0 selects 4 * mean rate of the training series

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_rmse = 0.0;
  double val_rmse = 0.0;
};

struct TrainingResult {
  PredictorModel model;  // parameters with the lowest validation RMSE seen
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_val_rmse = 0.0;
};

/// Sliding (window, peak target) pairs. With p[t] = max(series[t, t + horizon)),
/// for each t with q <= t <= n - horizon the target is p[t] and the window is
/// series[t-q, t) (counts) or p[t-q, t) (peaks).
std::vector<Sample> make_samples(std::span<const int> series, int window, int horizon,
                                 WindowSource source = WindowSource::counts);

/// Minibatch gradient descent on the RMSE loss with global-norm clipping and
/// early stopping on a chronological validation split. Epoch 0 of the curve
/// is the initial model. Deterministic for a given seed.
TrainingResult train(const UrllcSeries& series, const TrainingOptions& options);

struct Evaluation {
  double rmse = 0.0;           // against peak targets
  double coverage = 0.0;       // P(round(pred) >= count at slot t)
  double peak_coverage = 0.0;  // P(round(pred) >= peak target)
  std::vector<double> predictions;
  std::vector<int> actual;
  std::vector<int> peaks;
};

/// Scores `model` on every window of a held-out series.
Evaluation evaluate(const PredictorModel& model, const UrllcSeries& series,
                    WindowSource source = WindowSource::counts);

/// CSV `epoch,train_rmse,val_rmse`.
void write_curve_csv(std::ostream& out, const std::vector<EpochRecord>& curve);

}  // namespace ihra
