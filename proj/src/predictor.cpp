#include "ihra/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

std::string_view to_string(Architecture architecture) {
  return architecture == Architecture::attention ? "attention" : "plain";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "attention") return Architecture::attention;
  if (name == "plain" || name == "lstm") return Architecture::plain;
  throw InputError("unknown architecture '" + std::string(name) + "'");
}

AttentionParams AttentionParams::zeros(int hidden_size, int attention_size) {
  if (hidden_size < 1 || attention_size < 1) {
    throw InputError("AttentionParams: sizes must be positive");
  }
  AttentionParams p;
  p.hidden_size = hidden_size;
  p.attention_size = attention_size;
  p.w_keys = Eigen::MatrixXd::Zero(attention_size, hidden_size);
  p.w_query = Eigen::MatrixXd::Zero(attention_size, hidden_size);
  p.v = Eigen::VectorXd::Zero(attention_size);
  return p;
}

AttentionParams AttentionParams::random(int hidden_size, int attention_size, Rng& rng) {
  AttentionParams p = zeros(hidden_size, attention_size);
  const double bound_in = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  const double bound_v = 1.0 / std::sqrt(static_cast<double>(attention_size));
  for (auto* m : {&p.w_keys, &p.w_query})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = bound_in * (2.0 * rng.uniform() - 1.0);
  for (Eigen::Index r = 0; r < p.v.size(); ++r) p.v(r) = bound_v * (2.0 * rng.uniform() - 1.0);
  return p;
}

void AttentionParams::check_shapes() const {
  if (w_keys.rows() != attention_size || w_keys.cols() != hidden_size ||
      w_query.rows() != attention_size || w_query.cols() != hidden_size ||
      v.size() != attention_size) {
    throw InputError("AttentionParams: shape does not match sizes");
  }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  const double top = scores.maxCoeff();
  Eigen::VectorXd e = (scores.array() - top).exp().matrix();
  return e / e.sum();
}

AttentionResult bahdanau_attention(const std::vector<Eigen::VectorXd>& states,
                                   const Eigen::VectorXd& query, const AttentionParams& params) {
  if (states.empty()) throw InputError("bahdanau_attention: empty state sequence");
  params.check_shapes();
  if (query.size() != params.hidden_size) throw InputError("bahdanau_attention: query size");
  const Eigen::VectorXd projected_query = params.w_query * query;
  AttentionResult out;
  out.scores.resize(static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].size() != params.hidden_size) throw InputError("bahdanau_attention: state size");
    const Eigen::VectorXd feature =
        (params.w_keys * states[j] + projected_query).array().tanh().matrix();
    out.scores(static_cast<Eigen::Index>(j)) = params.v.dot(feature);
  }
  out.weights = softmax(out.scores);
  out.context = Eigen::VectorXd::Zero(params.hidden_size);
  for (std::size_t j = 0; j < states.size(); ++j) {
    out.context += out.weights(static_cast<Eigen::Index>(j)) * states[j];
  }
  return out;
}

PredictorModel PredictorModel::zeros(const PredictorShape& shape) {
  if (shape.window < 1) throw InputError("PredictorModel: window must be at least 1");
  if (shape.horizon < 1) throw InputError("PredictorModel: horizon must be at least 1");
  if (!(shape.input_scale > 0.0)) throw InputError("PredictorModel: input_scale must be positive");
  PredictorModel m;
  m.architecture = shape.architecture;
  m.window = shape.window;
  m.horizon = shape.horizon;
  m.input_scale = shape.input_scale;
  m.lstm1 = LstmParams::zeros(1, shape.hidden_size);
  if (shape.architecture == Architecture::attention) {
    m.attention = AttentionParams::zeros(shape.hidden_size, shape.hidden_size);
  }
  m.lstm2 = LstmParams::zeros(2 * shape.hidden_size, shape.hidden_size);
  m.fc_weight = Eigen::VectorXd::Zero(shape.hidden_size);
  m.fc_bias = 0.0;
  return m;
}

PredictorModel PredictorModel::random(const PredictorShape& shape, Rng& rng) {
  PredictorModel m = zeros(shape);
  m.lstm1 = LstmParams::random(1, shape.hidden_size, rng);
  if (shape.architecture == Architecture::attention) {
    m.attention = AttentionParams::random(shape.hidden_size, shape.hidden_size, rng);
  }
  m.lstm2 = LstmParams::random(2 * shape.hidden_size, shape.hidden_size, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden_size));
  for (Eigen::Index k = 0; k < m.fc_weight.size(); ++k) {
    m.fc_weight(k) = bound * (2.0 * rng.uniform() - 1.0);
  }
  m.fc_bias = bound * (2.0 * rng.uniform() - 1.0);
  return m;
}

std::size_t PredictorModel::parameter_count() const {
  std::size_t n = 0;
  for_each_block(*this, [&](std::span<const double> block) { n += block.size(); });
  return n;
}

void PredictorModel::validate() const {
  if (window < 1) throw InputError("PredictorModel: window must be at least 1");
  if (horizon < 1) throw InputError("PredictorModel: horizon must be at least 1");
  if (!(input_scale > 0.0)) throw InputError("PredictorModel: input_scale must be positive");
  lstm1.check_shapes();
  lstm2.check_shapes();
  if (lstm1.input_size != 1) throw InputError("PredictorModel: layer 1 takes scalar input");
  if (lstm2.input_size != 2 * lstm1.hidden_size) {
    throw InputError("PredictorModel: layer 2 input must be twice the layer 1 width");
  }
  if (architecture == Architecture::attention) {
    attention.check_shapes();
    if (attention.hidden_size != lstm1.hidden_size) {
      throw InputError("PredictorModel: attention width must match layer 1");
    }
  }
  if (fc_weight.size() != lstm2.hidden_size) throw InputError("PredictorModel: head width");
  bool finite = true;
  for_each_block(*this, [&](std::span<const double> block) {
    finite = finite && std::all_of(block.begin(), block.end(), [](double x) { return std::isfinite(x); });
  });
  if (!finite) throw InputError("PredictorModel: non-finite parameter");
}

ForwardTrace forward_trace(std::span<const double> window, const PredictorModel& model) {
  const int q = model.window;
  if (static_cast<int>(window.size()) != q) {
    throw InputError("forward: window length " + std::to_string(window.size()) +
                     " does not match model window " + std::to_string(q));
  }
  const int hidden = model.lstm1.hidden_size;
  const bool attend = model.architecture == Architecture::attention;
  ForwardTrace t;
  t.inputs.reserve(window.size());
  for (double x : window) t.inputs.push_back(x / model.input_scale);

  t.h1.reserve(static_cast<std::size_t>(q) + 1);
  t.h1.push_back(Eigen::VectorXd::Zero(hidden));
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd x1(1);
  for (int i = 0; i < q; ++i) {
    x1(0) = t.inputs[static_cast<std::size_t>(i)];
    t.layer1.push_back(lstm_step(x1, t.h1.back(), c1, model.lstm1));
    c1 = t.layer1.back().c;
    t.h1.push_back(t.layer1.back().h);
  }

  if (attend) {
    for (int j = 1; j <= q; ++j) t.keys.push_back(model.attention.w_keys * t.h1[static_cast<std::size_t>(j)]);
  }

  Eigen::VectorXd h2 = Eigen::VectorXd::Zero(model.lstm2.hidden_size);
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(model.lstm2.hidden_size);
  Eigen::VectorXd x2(2 * hidden);
  for (int i = 1; i <= q; ++i) {
    const auto& previous = t.h1[static_cast<std::size_t>(i - 1)];
    Eigen::VectorXd context;
    if (attend) {
      const Eigen::VectorXd projected_query = model.attention.w_query * previous;
      Eigen::MatrixXd feature(model.attention.attention_size, q);
      Eigen::VectorXd scores(q);
      for (int j = 0; j < q; ++j) {
        feature.col(j) = (t.keys[static_cast<std::size_t>(j)] + projected_query).array().tanh().matrix();
        scores(j) = model.attention.v.dot(feature.col(j));
      }
      Eigen::VectorXd a = softmax(scores);
      context = Eigen::VectorXd::Zero(hidden);
      for (int j = 0; j < q; ++j) context += a(j) * t.h1[static_cast<std::size_t>(j + 1)];
      t.features.push_back(std::move(feature));
      t.weights.push_back(std::move(a));
    } else {
      context = t.h1[static_cast<std::size_t>(i)];
    }
    x2 << context, previous;
    t.layer2.push_back(lstm_step(x2, h2, c2, model.lstm2));
    h2 = t.layer2.back().h;
    c2 = t.layer2.back().c;
  }
  t.output = model.fc_weight.dot(h2) + model.fc_bias;
  return t;
}

double forward(std::span<const double> window, const PredictorModel& model) {
  return forward_trace(window, model).output;
}

double forward(std::span<const int> window, const PredictorModel& model) {
  std::vector<double> values(window.begin(), window.end());
  return forward(std::span<const double>(values), model);
}

void backward(const ForwardTrace& t, double d_output, const PredictorModel& model,
              PredictorModel& grads) {
  const int q = model.window;
  const int hidden = model.lstm1.hidden_size;
  const bool attend = model.architecture == Architecture::attention;
  const auto& h2_last = t.layer2.back().h;

  grads.fc_weight += d_output * h2_last;
  grads.fc_bias += d_output;

  // Gradients arriving at h1(0..q) from layer 2 and the attention layer.
  std::vector<Eigen::VectorXd> dh1(static_cast<std::size_t>(q) + 1, Eigen::VectorXd::Zero(hidden));
  // Key-side pre-activation gradients summed over all queries; W_keys h1(j)
  // is shared by every decoding step, so its backward runs once per key.
  Eigen::MatrixXd d_key_pre;
  if (attend) d_key_pre = Eigen::MatrixXd::Zero(model.attention.attention_size, q);

  Eigen::VectorXd dh2 = d_output * model.fc_weight;
  Eigen::VectorXd dc2 = Eigen::VectorXd::Zero(model.lstm2.hidden_size);
  for (int i = q; i >= 1; --i) {
    const auto step_grad =
        lstm_step_backward(t.layer2[static_cast<std::size_t>(i - 1)], dh2, dc2, model.lstm2, grads.lstm2);
    dh2 = step_grad.dh_prev;
    dc2 = step_grad.dc_prev;
    const Eigen::VectorXd d_context = step_grad.dx.head(hidden);
    dh1[static_cast<std::size_t>(i - 1)] += step_grad.dx.tail(hidden);

    if (!attend) {
      dh1[static_cast<std::size_t>(i)] += d_context;
      continue;
    }
    const auto& a = t.weights[static_cast<std::size_t>(i - 1)];
    const auto& feature = t.features[static_cast<std::size_t>(i - 1)];
    Eigen::VectorXd d_weight(q);
    for (int j = 0; j < q; ++j) {
      d_weight(j) = d_context.dot(t.h1[static_cast<std::size_t>(j + 1)]);
      dh1[static_cast<std::size_t>(j + 1)] += a(j) * d_context;
    }
    const double mean = a.dot(d_weight);
    const Eigen::VectorXd d_score = (a.array() * (d_weight.array() - mean)).matrix();

    grads.attention.v.noalias() += feature * d_score;
    // d_pre(:, j) = d_score(j) * v .* (1 - feature(:, j)^2)
    Eigen::MatrixXd d_pre = (1.0 - feature.array().square()).matrix();
    d_pre = model.attention.v.asDiagonal() * d_pre * d_score.asDiagonal();
    d_key_pre += d_pre;
    const Eigen::VectorXd d_query_pre = d_pre.rowwise().sum();
    grads.attention.w_query.noalias() += d_query_pre * t.h1[static_cast<std::size_t>(i - 1)].transpose();
    dh1[static_cast<std::size_t>(i - 1)].noalias() += model.attention.w_query.transpose() * d_query_pre;
  }
  if (attend) {
    for (int j = 0; j < q; ++j) {
      const auto& hj = t.h1[static_cast<std::size_t>(j + 1)];
      grads.attention.w_keys.noalias() += d_key_pre.col(j) * hj.transpose();
      dh1[static_cast<std::size_t>(j + 1)].noalias() += model.attention.w_keys.transpose() * d_key_pre.col(j);
    }
  }

  Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd dc1 = Eigen::VectorXd::Zero(hidden);
  for (int i = q; i >= 1; --i) {
    const Eigen::VectorXd dh = dh1[static_cast<std::size_t>(i)] + dh_carry;
    const auto step_grad =
        lstm_step_backward(t.layer1[static_cast<std::size_t>(i - 1)], dh, dc1, model.lstm1, grads.lstm1);
    dh_carry = step_grad.dh_prev;
    dc1 = step_grad.dc_prev;
  }
}

double rmse_loss(const PredictorModel& model, std::span<const Sample> batch, PredictorModel* grads) {
  if (batch.empty()) throw InputError("rmse_loss: empty batch");
  std::vector<ForwardTrace> traces;
  if (grads) traces.reserve(batch.size());
  double squared = 0.0;
  std::vector<double> errors;
  errors.reserve(batch.size());
  for (const auto& sample : batch) {
    auto trace = forward_trace(sample.window, model);
    const double err = trace.output - sample.target;
    squared += err * err;
    errors.push_back(err);
    if (grads) traces.push_back(std::move(trace));
  }
  const double n = static_cast<double>(batch.size());
  const double loss = std::sqrt(squared / n);
  if (grads && loss > 0.0) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
      backward(traces[k], errors[k] / (n * loss), model, *grads);
    }
  }
  return loss;
}

double gradient_check(const PredictorModel& model, const Sample& sample) {
  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-5;
  const std::span<const Sample> one(&sample, 1);

  PredictorModel analytic = model;
  for_each_block(analytic, [](std::span<double> block) { std::fill(block.begin(), block.end(), 0.0); });
  rmse_loss(model, one, &analytic);

  std::vector<double> expected;
  for_each_block(analytic, [&](std::span<double> block) { expected.insert(expected.end(), block.begin(), block.end()); });

  PredictorModel probe = model;
  std::size_t index = 0;
  double worst = 0.0;
  for_each_block(probe, [&](std::span<double> block) {
    for (double& p : block) {
      const double saved = p;
      p = saved + kStep;
      const double up = rmse_loss(probe, one);
      p = saved - kStep;
      const double down = rmse_loss(probe, one);
      p = saved;
      const double numeric = (up - down) / (2.0 * kStep);
      const double a = expected[index++];
      const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), kFloor);
      worst = std::max(worst, rel);
    }
  });
  return worst;
}

int round_prediction(double y) {
  if (!std::isfinite(y)) throw InputError("round_prediction: non-finite prediction");
  const double r = std::round(y);  // half away from zero
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return static_cast<int>(r);
}

std::vector<int> peak_targets(std::span<const int> series, int horizon) {
  if (horizon < 1) throw InputError("peak_targets: horizon must be at least 1");
  if (series.size() < static_cast<std::size_t>(horizon)) {
    throw InputError("peak_targets: series shorter than horizon");
  }
  std::vector<int> out;
  out.reserve(series.size() - static_cast<std::size_t>(horizon) + 1);
  for (std::size_t t = 0; t + static_cast<std::size_t>(horizon) <= series.size(); ++t) {
    out.push_back(*std::max_element(series.begin() + static_cast<std::ptrdiff_t>(t),
                                    series.begin() + static_cast<std::ptrdiff_t>(t) + horizon));
  }
  return out;
}

}  // namespace ihra
