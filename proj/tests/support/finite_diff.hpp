#pragma once

// Independent gradient oracle: central finite differences over a black-box
// scalar function. Used to check every analytic gradient in the library;
// deliberately knows nothing about the tape machinery.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mbae::testing {

using ScalarFn = std::function<double(std::span<const double>)>;

// d f / d x_i via (f(x+h e_i) - f(x-h e_i)) / 2h for every coordinate.
inline std::vector<double> finite_difference_gradient(const ScalarFn& f,
                                                      std::span<const double> x,
                                                      double h = 1e-5) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(point.size(), 0.0);
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// abs/rel tolerance check used across all gradient suites:
// |a - b| <= atol + rtol * max(|a|, |b|).
inline bool close(double a, double b, double rtol = 1e-4, double atol = 1e-7) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

inline bool all_close(std::span<const double> a, std::span<const double> b,
                      double rtol = 1e-4, double atol = 1e-7) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i], b[i], rtol, atol)) return false;
  }
  return true;
}

}  // namespace mbae::testing
