#include "mbae/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mbae/errors.hpp"

namespace mbae {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)), grad_(rows * cols, 0.0) {
  if (values_.size() != rows * cols) {
    throw ConfigError("tensor value count " + std::to_string(values_.size()) +
                      " does not match shape " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

Tensor Tensor::row(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor(1, n, std::move(v));
}

Tensor Tensor::row(std::span<const double> v) {
  return Tensor(1, v.size(), std::vector<double>(v.begin(), v.end()));
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void Tensor::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

namespace {
bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}
}  // namespace

void Tensor::require_finite_values(const char* what) const {
  if (!all_finite(values_)) {
    throw NumericError(std::string("non-finite values in ") + what);
  }
}

void Tensor::require_finite_grad(const char* what) const {
  if (!all_finite(grad_)) {
    throw NumericError(std::string("non-finite gradient in ") + what);
  }
}

}  // namespace mbae
