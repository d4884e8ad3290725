#include "mbae/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbae/errors.hpp"

namespace mbae {

Optimizer Optimizer::sgd(double learning_rate) {
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  return Optimizer(Kind::kSgd, learning_rate, 0.0, 0.0, 0.0);
}

Optimizer Optimizer::adam(double learning_rate, double beta1, double beta2, double epsilon) {
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  return Optimizer(Kind::kAdam, learning_rate, beta1, beta2, epsilon);
}

void Optimizer::ensure_buffers(const std::vector<Tensor*>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i]->size(), 0.0);
      v_[i].assign(params[i]->size(), 0.0);
    }
    return;
  }
  if (m_.size() != params.size()) {
    throw UsageError("optimizer was stepped with a different parameter set");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (m_[i].size() != params[i]->size()) {
      throw UsageError("optimizer moment size mismatch on parameter " + std::to_string(i));
    }
  }
}

void Optimizer::step(const std::vector<Tensor*>& params) {
  for (const Tensor* p : params) p->require_finite_grad("optimizer step");
  ++step_count_;

  if (kind_ == Kind::kSgd) {
    for (Tensor* p : params) {
      auto values = p->values();
      auto grad = p->grad();
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] -= learning_rate_ * grad[i];
      }
      p->zero_grad();
    }
    return;
  }

  ensure_buffers(params);
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i]->values();
    auto grad = params[i]->grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grad[j];
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
      const double m_hat = m[j] / bias1;
      const double v_hat = v[j] / bias2;
      values[j] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
    params[i]->zero_grad();
  }
}

std::vector<double> Optimizer::flatten_state() const {
  std::vector<double> flat;
  for (const auto& m : m_) flat.insert(flat.end(), m.begin(), m.end());
  for (const auto& v : v_) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

void Optimizer::load_state(std::span<const double> flat, std::uint64_t step_count) {
  if (flat.empty() && step_count == 0) {
    for (auto& m : m_) std::fill(m.begin(), m.end(), 0.0);
    for (auto& v : v_) std::fill(v.begin(), v.end(), 0.0);
    step_count_ = 0;
    return;
  }
  std::size_t total = 0;
  for (const auto& m : m_) total += m.size();
  for (const auto& v : v_) total += v.size();
  if (total != flat.size()) {
    throw IoError("optimizer state blob size mismatch");
  }
  std::size_t pos = 0;
  for (auto& m : m_) {
    for (double& x : m) x = flat[pos++];
  }
  for (auto& v : v_) {
    for (double& x : v) x = flat[pos++];
  }
  step_count_ = step_count;
}

}  // namespace mbae
