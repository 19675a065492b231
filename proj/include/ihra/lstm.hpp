#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "ihra/rng.hpp"

namespace ihra {

enum class Gate : std::size_t { forget = 0, update = 1, candidate = 2, output = 3 };

inline constexpr std::array<Gate, 4> kGates{Gate::forget, Gate::update, Gate::candidate,
                                            Gate::output};

/// Parameters of one LSTM layer. Every gate weight acts on the concatenation
/// [h_prev, x], so it is hidden_size x (hidden_size + input_size).
struct LstmParams {
  int input_size = 0;
  int hidden_size = 0;
  std::array<Eigen::MatrixXd, 4> weight;
  std::array<Eigen::VectorXd, 4> bias;

  static LstmParams zeros(int input_size, int hidden_size);
  /// Uniform in +-1/sqrt(hidden_size + input_size) for weights and biases.
  static LstmParams random(int input_size, int hidden_size, Rng& rng);

  Eigen::MatrixXd& w(Gate g) { return weight[static_cast<std::size_t>(g)]; }
  const Eigen::MatrixXd& w(Gate g) const { return weight[static_cast<std::size_t>(g)]; }
  Eigen::VectorXd& b(Gate g) { return bias[static_cast<std::size_t>(g)]; }
  const Eigen::VectorXd& b(Gate g) const { return bias[static_cast<std::size_t>(g)]; }

  /// Throws InputError if a shape disagrees with input_size/hidden_size.
  void check_shapes() const;
};

/// Activations of one cell evaluation, kept for backpropagation.
struct LstmStep {
  Eigen::VectorXd joint;  // [h_prev, x]
  Eigen::VectorXd c_prev;
  Eigen::VectorXd forget, update, candidate, output;
  Eigen::VectorXd c, tanh_c, h;
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

/// One LSTM step:
///   f = sig(Wf [h,x] + bf), u = sig(Wu [h,x] + bu), g = tanh(Wc [h,x] + bc)
///   c' = f * c + u * g,     o = sig(Wo [h,x] + bo), h' = o * tanh(c')
LstmState lstm_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                    const Eigen::VectorXd& c_prev, const LstmParams& params);

/// lstm_cell that also records the intermediate activations.
LstmStep lstm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                   const Eigen::VectorXd& c_prev, const LstmParams& params);

struct LstmStepGrad {
  Eigen::VectorXd dx;
  Eigen::VectorXd dh_prev;
  Eigen::VectorXd dc_prev;
};

/// Backward through one step. `dh` and `dc` are the loss gradients flowing
/// into h' and c'. Parameter gradients are accumulated into `grads`.
LstmStepGrad lstm_step_backward(const LstmStep& step, const Eigen::VectorXd& dh,
                                const Eigen::VectorXd& dc, const LstmParams& params,
                                LstmParams& grads);

}  // namespace ihra
