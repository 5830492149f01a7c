// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace xrnoma::nn {

Adam::Adam(const ParamSet& like, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(like.zeros_like()),
      v_(like.zeros_like()) {}

void Adam::step(ParamSet& params, const ParamSet& grads) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  if (p.size() != g.size() || p.size() != m.size()) {
    throw std::invalid_argument("Adam::step: tensor count mismatch");
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].size() != g[t].size() || p[t].size() != m[t].size()) {
      throw std::invalid_argument("Adam::step: tensor shape mismatch");
    }
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      m[t][i] = beta1_ * m[t][i] + (1.0 - beta1_) * g[t][i];
      v[t][i] = beta2_ * v[t][i] + (1.0 - beta2_) * g[t][i] * g[t][i];
      p[t][i] -= lr_ * (m[t][i] / c1) / (std::sqrt(v[t][i] / c2) + eps_);
    }
  }
}

}  // namespace xrnoma::nn
