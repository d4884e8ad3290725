#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mbae {

// Row-major 2-D array of doubles with a gradient buffer of the same size.
// Everything the networks touch is 2-D: activations are (batch, features),
// weights are (in, out), biases and single observations are (1, n).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0), grad_(rows * cols, 0.0) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor row(std::vector<double> v);
  static Tensor row(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& grad_at(std::size_t r, std::size_t c) { return grad_[r * cols_ + c]; }
  double grad_at(std::size_t r, std::size_t c) const { return grad_[r * cols_ + c]; }

  void fill(double v);
  void zero_grad();
  bool same_shape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  // Throw NumericError naming `what` if any value / grad entry is NaN or Inf.
  void require_finite_values(const char* what) const;
  void require_finite_grad(const char* what) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<double> grad_;
};

}  // namespace mbae
