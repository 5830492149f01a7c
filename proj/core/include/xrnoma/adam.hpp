// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_ADAM_HPP_
#define XRNOMA_ADAM_HPP_

#include <cstdint>

#include "xrnoma/mlp.hpp"

namespace xrnoma::nn {

// Bias-corrected Adam over every tensor of a ParamSet.
class Adam {
 public:
  Adam() = default;
  Adam(const ParamSet& like, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  // params -= lr * m_hat / (sqrt(v_hat) + eps). Throws std::invalid_argument
  // when shapes differ from the ParamSet the optimizer was built for.
  void step(ParamSet& params, const ParamSet& grads);

  double learning_rate() const { return lr_; }
  std::int64_t steps() const { return steps_; }
  const ParamSet& first_moment() const { return m_; }
  const ParamSet& second_moment() const { return v_; }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t steps_ = 0;
  ParamSet m_;
  ParamSet v_;
};

}  // namespace xrnoma::nn

#endif  // XRNOMA_ADAM_HPP_
