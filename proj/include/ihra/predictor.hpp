#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ihra/lstm.hpp"
#include "ihra/rng.hpp"

namespace ihra {

/// `attention` is the full forecaster. `plain` replaces the attention layer by
/// passing h1(i) straight through, leaving everything else identical.
enum class Architecture { attention, plain };

std::string_view to_string(Architecture architecture);
Architecture parse_architecture(std::string_view name);

/// Additive (Bahdanau) scoring: e_j = v . tanh(W_keys h1(j) + W_query query).
struct AttentionParams {
  int hidden_size = 0;
  int attention_size = 0;
  Eigen::MatrixXd w_keys;   // attention_size x hidden_size
  Eigen::MatrixXd w_query;  // attention_size x hidden_size
  Eigen::VectorXd v;        // attention_size

  static AttentionParams zeros(int hidden_size, int attention_size);
  static AttentionParams random(int hidden_size, int attention_size, Rng& rng);
  void check_shapes() const;
};

struct AttentionResult {
  Eigen::VectorXd context;  // z = sum_j a_j h1(j)
  Eigen::VectorXd weights;  // a = softmax(e)
  Eigen::VectorXd scores;   // e
};

/// Attention over `states` (the layer-1 outputs h1(1..q)) for one query.
AttentionResult bahdanau_attention(const std::vector<Eigen::VectorXd>& states,
                                   const Eigen::VectorXd& query, const AttentionParams& params);

/// Numerically stable softmax (max-shifted).
Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

struct PredictorShape {
  Architecture architecture = Architecture::attention;
  int window = 10;
  int horizon = 5;
  int hidden_size = 32;
  double input_scale = 20.0;
};

/// LSTM -> attention -> LSTM -> linear head. Inputs are counts divided by
/// `input_scale`; the head emits counts directly.
struct PredictorModel {
  Architecture architecture = Architecture::attention;
  int window = 10;
  int horizon = 5;
  double input_scale = 20.0;
  LstmParams lstm1;
  AttentionParams attention;  // empty for Architecture::plain
  LstmParams lstm2;           // input is concat(z(i), h1(i-1))
  Eigen::VectorXd fc_weight;
  double fc_bias = 0.0;

  static PredictorModel zeros(const PredictorShape& shape);
  static PredictorModel random(const PredictorShape& shape, Rng& rng);

  int hidden_size() const noexcept { return lstm1.hidden_size; }
  std::size_t parameter_count() const;
  void validate() const;
};

/// Visits every parameter block of `model` as a contiguous span, in a fixed
/// order (lstm1, attention, lstm2, fc weight, fc bias).
template <typename Model, typename F>
void for_each_block(Model& model, F&& fn) {
  auto lstm = [&](auto& p) {
    for (std::size_t k = 0; k < 4; ++k) {
      fn(std::span(p.weight[k].data(), static_cast<std::size_t>(p.weight[k].size())));
      fn(std::span(p.bias[k].data(), static_cast<std::size_t>(p.bias[k].size())));
    }
  };
  lstm(model.lstm1);
  if (model.architecture == Architecture::attention) {
    auto& a = model.attention;
    fn(std::span(a.w_keys.data(), static_cast<std::size_t>(a.w_keys.size())));
    fn(std::span(a.w_query.data(), static_cast<std::size_t>(a.w_query.size())));
    fn(std::span(a.v.data(), static_cast<std::size_t>(a.v.size())));
  }
  lstm(model.lstm2);
  fn(std::span(model.fc_weight.data(), static_cast<std::size_t>(model.fc_weight.size())));
  fn(std::span(&model.fc_bias, 1));
}

/// Everything computed during one forward pass, kept for backpropagation.
struct ForwardTrace {
  std::vector<double> inputs;             // normalized window
  std::vector<LstmStep> layer1;           // q steps
  std::vector<Eigen::VectorXd> h1;        // h1(0..q), h1(0) = 0
  std::vector<Eigen::VectorXd> keys;      // W_keys h1(j), j = 1..q
  std::vector<Eigen::MatrixXd> features;  // per step i: tanh(keys + W_query h1(i-1)), one column per j
  std::vector<Eigen::VectorXd> weights;   // per step i: attention weights
  std::vector<LstmStep> layer2;           // q steps
  double output = 0.0;
};

ForwardTrace forward_trace(std::span<const double> window, const PredictorModel& model);

/// Predicted URLLC count (unrounded) for the slot after `window`.
double forward(std::span<const double> window, const PredictorModel& model);
double forward(std::span<const int> window, const PredictorModel& model);

/// Accumulates d(output)/d(params) * d_output into `grads`, which must have
/// the same shapes as `model`.
void backward(const ForwardTrace& trace, double d_output, const PredictorModel& model,
              PredictorModel& grads);

struct Sample {
  std::vector<double> window;  // raw counts, oldest first
  double target = 0.0;
};

/// Root-mean-square error of `model` over `batch`. When `grads` is non-null the
/// gradient of that RMSE is added into it.
double rmse_loss(const PredictorModel& model, std::span<const Sample> batch,
                 PredictorModel* grads = nullptr);

/// Largest relative difference between backpropagated gradients of the RMSE
/// loss on `sample` and central finite differences (step 1e-5), over every
/// parameter. Relative difference is |a - n| / max(|a| + |n|, 1e-5).
double gradient_check(const PredictorModel& model, const Sample& sample);

/// Round half away from zero, clamped at 0.
int round_prediction(double y);

/// target[t] = max(series[t .. t + horizon - 1]).
std::vector<int> peak_targets(std::span<const int> series, int horizon);

}  // namespace ihra
