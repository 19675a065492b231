#include "ihra/lstm.hpp"

#include <cmath>

#include "ihra/errors.hpp"

namespace ihra {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double t) { return 1.0 / (1.0 + std::exp(-t)); });
}

Eigen::VectorXd tanh_of(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double t) { return std::tanh(t); });
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order so the stream maps onto the serialized layout.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = bound * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace

LstmParams LstmParams::zeros(int input_size, int hidden_size) {
  if (input_size < 1 || hidden_size < 1) throw InputError("LstmParams: sizes must be positive");
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  for (auto g : kGates) {
    p.w(g) = Eigen::MatrixXd::Zero(hidden_size, hidden_size + input_size);
    p.b(g) = Eigen::VectorXd::Zero(hidden_size);
  }
  return p;
}

LstmParams LstmParams::random(int input_size, int hidden_size, Rng& rng) {
  LstmParams p = zeros(input_size, hidden_size);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size + input_size));
  for (auto g : kGates) {
    p.w(g) = uniform_matrix(hidden_size, hidden_size + input_size, bound, rng);
    p.b(g) = uniform_matrix(hidden_size, 1, bound, rng);
  }
  return p;
}

void LstmParams::check_shapes() const {
  for (auto g : kGates) {
    if (w(g).rows() != hidden_size || w(g).cols() != hidden_size + input_size ||
        b(g).size() != hidden_size) {
      throw InputError("LstmParams: gate shape does not match sizes");
    }
  }
}

LstmStep lstm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                   const Eigen::VectorXd& c_prev, const LstmParams& params) {
  if (x.size() != params.input_size || h_prev.size() != params.hidden_size ||
      c_prev.size() != params.hidden_size) {
    throw InputError("lstm_cell: state or input size does not match parameters");
  }
  LstmStep s;
  s.joint.resize(params.hidden_size + params.input_size);
  s.joint << h_prev, x;
  s.c_prev = c_prev;
  s.forget = sigmoid(params.w(Gate::forget) * s.joint + params.b(Gate::forget));
  s.update = sigmoid(params.w(Gate::update) * s.joint + params.b(Gate::update));
  s.candidate = tanh_of(params.w(Gate::candidate) * s.joint + params.b(Gate::candidate));
  s.c = s.forget.cwiseProduct(c_prev) + s.update.cwiseProduct(s.candidate);
  s.output = sigmoid(params.w(Gate::output) * s.joint + params.b(Gate::output));
  s.tanh_c = tanh_of(s.c);
  s.h = s.output.cwiseProduct(s.tanh_c);
  return s;
}

LstmState lstm_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                    const Eigen::VectorXd& c_prev, const LstmParams& params) {
  auto s = lstm_step(x, h_prev, c_prev, params);
  return LstmState{std::move(s.h), std::move(s.c)};
}

LstmStepGrad lstm_step_backward(const LstmStep& s, const Eigen::VectorXd& dh,
                                const Eigen::VectorXd& dc_in, const LstmParams& params,
                                LstmParams& grads) {
  const Eigen::ArrayXd one = Eigen::ArrayXd::Ones(params.hidden_size);
  const Eigen::VectorXd d_output = dh.cwiseProduct(s.tanh_c);
  const Eigen::VectorXd dc =
      dc_in + (dh.array() * s.output.array() * (one - s.tanh_c.array().square())).matrix();

  std::array<Eigen::VectorXd, 4> d_pre;
  d_pre[0] = (dc.array() * s.c_prev.array() * s.forget.array() * (one - s.forget.array())).matrix();
  d_pre[1] = (dc.array() * s.candidate.array() * s.update.array() * (one - s.update.array())).matrix();
  d_pre[2] = (dc.array() * s.update.array() * (one - s.candidate.array().square())).matrix();
  d_pre[3] = (d_output.array() * s.output.array() * (one - s.output.array())).matrix();

  Eigen::VectorXd d_joint = Eigen::VectorXd::Zero(s.joint.size());
  for (std::size_t k = 0; k < 4; ++k) {
    grads.weight[k].noalias() += d_pre[k] * s.joint.transpose();
    grads.bias[k] += d_pre[k];
    d_joint.noalias() += params.weight[k].transpose() * d_pre[k];
  }

  LstmStepGrad out;
  out.dh_prev = d_joint.head(params.hidden_size);
  out.dx = d_joint.tail(params.input_size);
  out.dc_prev = dc.cwiseProduct(s.forget);
  return out;
}

}  // namespace ihra
