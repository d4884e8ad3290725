#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "mbae/tensor.hpp"

namespace mbae {

// Define-by-run recording of one forward computation. Intermediate tensors
// live on the tape (deque keeps references stable); leaf tensors (network
// parameters, the inputs a caller wants gradients for) are owned by the
// caller and referenced by the recorded backward rules. One tape supports
// one backward sweep; rebuild per forward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor& make(std::size_t rows, std::size_t cols) {
    return nodes_.emplace_back(rows, cols);
  }

  // Rule runs during the reverse sweep; it must only accumulate (+=) into
  // the grad buffers of its op's inputs.
  void record(std::function<void()> rule) { rules_.push_back(std::move(rule)); }

  // Reverse sweep in strict reverse recording order. Consumes the tape.
  void run_backward();

  bool consumed() const { return consumed_; }
  std::size_t op_count() const { return rules_.size(); }

 private:
  std::deque<Tensor> nodes_;
  std::vector<std::function<void()>> rules_;
  bool consumed_ = false;
};

// Seeds `output.grad += seed_grad` and runs the sweep. `output` must have
// been produced by a forward pass recorded on `tape`.
void backward(Tape& tape, Tensor& output, const Tensor& seed_grad);

}  // namespace mbae
