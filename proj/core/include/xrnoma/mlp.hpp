// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_MLP_HPP_
#define XRNOMA_MLP_HPP_

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "xrnoma/random.hpp"

namespace xrnoma::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Intermediate activations of one forward pass; activations[0] is the input
// and activations.back() the (identity) output.
struct MlpCache {
  std::vector<Matrix> activations;
  bool empty() const { return activations.empty(); }
};

// Feed-forward network: tanh on hidden layers, identity on the output.
// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // All-zero network with the given layer sizes (input first).
  explicit Mlp(std::vector<int> sizes);

  // Weights and biases ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)]; the last layer's
  // weights are multiplied by output_scale.
  static Mlp uniform_init(std::vector<int> sizes, RngStream& rng, double output_scale = 1.0);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t num_parameters() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Throws std::invalid_argument when input.rows() != input_dim().
  Matrix forward(const Matrix& input, MlpCache* cache = nullptr) const;
  Vector forward(const Vector& input) const;
  Vector forward(std::span<const double> input) const;

  // Accumulates dLoss/dparams into grads (same shape as *this) and returns
  // dLoss/dinput. Throws std::logic_error if cache holds no forward pass.
  Matrix backward(const MlpCache& cache, const Matrix& grad_output, Mlp& grads) const;

  Mlp zeros_like() const { return Mlp(sizes_); }

  // Flat views in layer order: W0, b0, W1, b1, ...
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

// All trainable tensors of one network: a list of MLPs plus free vectors
// (the Gaussian log-std).
struct ParamSet {
  std::vector<Mlp> mlps;
  std::vector<Vector> vectors;

  ParamSet zeros_like() const;
  void set_zero();
  std::size_t num_parameters() const;
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  // Bitwise equality of every value and matching shapes.
  bool identical(const ParamSet& other) const;
};

}  // namespace xrnoma::nn

#endif  // XRNOMA_MLP_HPP_
