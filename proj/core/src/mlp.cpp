// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace xrnoma::nn {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
  layers_.reserve(sizes_.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back({Matrix::Zero(sizes_[l + 1], sizes_[l]), Vector::Zero(sizes_[l + 1])});
  }
}

Mlp Mlp::uniform_init(std::vector<int> sizes, RngStream& rng, double output_scale) {
  Mlp net(std::move(sizes));
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    auto& layer = net.layers_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    const double scale = l + 1 == net.layers_.size() ? output_scale : 1.0;
    // Column-major fill order keeps initialization tied to the stream position.
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
        layer.weight(i, j) = scale * rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = rng.uniform(-bound, bound);
  }
  return net;
}

std::size_t Mlp::num_parameters() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) count += layer.weight.size() + layer.bias.size();
  return count;
}

Matrix Mlp::forward(const Matrix& input, MlpCache* cache) const {
  if (input.rows() != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.rows()) +
                                " rows, expected " + std::to_string(input_dim()));
  }
  if (cache) {
    cache->activations.resize(layers_.size() + 1);
    cache->activations[0] = input;
  }
  Matrix x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * x;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    if (cache) cache->activations[l + 1] = z;
    x = std::move(z);
  }
  return x;
}

Vector Mlp::forward(const Vector& input) const {
  return forward(Matrix(input)).col(0);
}

Vector Mlp::forward(std::span<const double> input) const {
  return forward(Vector(Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size()))));
}

Matrix Mlp::backward(const MlpCache& cache, const Matrix& grad_output, Mlp& grads) const {
  if (cache.activations.size() != layers_.size() + 1) {
    throw std::logic_error("Mlp::backward called without a matching forward pass");
  }
  if (grads.sizes_ != sizes_) throw std::invalid_argument("Mlp::backward: gradient shape mismatch");
  if (grad_output.rows() != output_dim() ||
      grad_output.cols() != cache.activations.back().cols()) {
    throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");
  }
  Matrix delta = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Matrix& input = cache.activations[l];
    grads.layers_[l].weight.noalias() += delta * input.transpose();
    grads.layers_[l].bias.noalias() += delta.rowwise().sum();
    Matrix upstream = layers_[l].weight.transpose() * delta;
    if (l > 0) {
      // input is tanh output of the previous layer.
      upstream.array() *= 1.0 - input.array().square();
    }
    delta = std::move(upstream);
  }
  return delta;
}

std::vector<std::span<double>> Mlp::tensors() {
  std::vector<std::span<double>> out;
  for (auto& layer : layers_) {
    out.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    out.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return out;
}

std::vector<std::span<const double>> Mlp::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& layer : layers_) {
    out.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    out.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return out;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet z;
  for (const auto& m : mlps) z.mlps.push_back(m.zeros_like());
  for (const auto& v : vectors) z.vectors.push_back(Vector::Zero(v.size()));
  return z;
}

void ParamSet::set_zero() {
  for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
}

std::size_t ParamSet::num_parameters() const {
  std::size_t count = 0;
  for (auto t : tensors()) count += t.size();
  return count;
}

std::vector<std::span<double>> ParamSet::tensors() {
  std::vector<std::span<double>> out;
  for (auto& m : mlps) {
    auto t = m.tensors();
    out.insert(out.end(), t.begin(), t.end());
  }
  for (auto& v : vectors) out.emplace_back(v.data(), static_cast<std::size_t>(v.size()));
  return out;
}

std::vector<std::span<const double>> ParamSet::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& m : mlps) {
    auto t = m.tensors();
    out.insert(out.end(), t.begin(), t.end());
  }
  for (const auto& v : vectors) out.emplace_back(v.data(), static_cast<std::size_t>(v.size()));
  return out;
}

bool ParamSet::identical(const ParamSet& other) const {
  if (mlps.size() != other.mlps.size() || vectors.size() != other.vectors.size()) return false;
  for (std::size_t i = 0; i < mlps.size(); ++i) {
    if (mlps[i].sizes() != other.mlps[i].sizes()) return false;
  }
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    if (std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace xrnoma::nn
