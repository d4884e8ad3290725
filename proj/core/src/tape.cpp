#include "mbae/tape.hpp"

#include "mbae/errors.hpp"

namespace mbae {

void Tape::run_backward() {
  if (consumed_) {
    throw UsageError("tape already consumed by a previous backward sweep");
  }
  consumed_ = true;
  for (auto it = rules_.rbegin(); it != rules_.rend(); ++it) {
    (*it)();
  }
}

void backward(Tape& tape, Tensor& output, const Tensor& seed_grad) {
  if (!output.same_shape(seed_grad)) {
    throw ConfigError("seed gradient shape does not match output shape");
  }
  auto g = output.grad();
  auto s = seed_grad.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] += s[i];
  }
  tape.run_backward();
  output.require_finite_grad("backward seed");
}

}  // namespace mbae
