#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbae/tensor.hpp"

namespace mbae {

// SGD or bias-corrected Adam over a fixed parameter set. step() consumes the
// accumulated gradients and zeroes them. Adam moment buffers are sized on the
// first step and must see the same parameter layout ever after.
class Optimizer {
 public:
  enum class Kind { kSgd, kAdam };

  static Optimizer sgd(double learning_rate);
  static Optimizer adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                        double epsilon = 1e-8);

  void step(const std::vector<Tensor*>& params);

  Kind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }
  std::uint64_t step_count() const { return step_count_; }

  // Checkpoint support: moments flattened in parameter order (m then v),
  // plus the step counter. init_buffers must run before load_state when the
  // optimizer has not stepped yet.
  void init_buffers(const std::vector<Tensor*>& params) { ensure_buffers(params); }
  std::vector<double> flatten_state() const;
  void load_state(std::span<const double> flat, std::uint64_t step_count);

 private:
  Optimizer(Kind kind, double lr, double b1, double b2, double eps)
      : kind_(kind), learning_rate_(lr), beta1_(b1), beta2_(b2), epsilon_(eps) {}

  void ensure_buffers(const std::vector<Tensor*>& params);

  Kind kind_;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::uint64_t step_count_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace mbae
