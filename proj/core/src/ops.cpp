#include "mbae/ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mbae/errors.hpp"

namespace mbae::ops {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ConfigError(std::string(op) + ": operand shapes differ (" +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Tensor& dense(Tape& tape, Tensor& x, Tensor& w, Tensor& b) {
  const std::size_t batch = x.rows();
  const std::size_t in = x.cols();
  const std::size_t out = w.cols();
  if (w.rows() != in) {
    throw ConfigError("dense: input width " + std::to_string(in) +
                      " does not match weight rows " + std::to_string(w.rows()));
  }
  if (b.rows() != 1 || b.cols() != out) {
    throw ConfigError("dense: bias must be (1," + std::to_string(out) + ")");
  }

  Tensor& y = tape.make(batch, out);
  const double* xv = x.values().data();
  const double* wv = w.values().data();
  const double* bv = b.values().data();
  double* yv = y.values().data();
  for (std::size_t r = 0; r < batch; ++r) {
    double* yrow = yv + r * out;
    for (std::size_t j = 0; j < out; ++j) yrow[j] = bv[j];
    const double* xrow = xv + r * in;
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xrow[k];
      if (xk == 0.0) continue;
      const double* wrow = wv + k * out;
      for (std::size_t j = 0; j < out; ++j) yrow[j] += xk * wrow[j];
    }
  }
  y.require_finite_values("dense output");

  tape.record([&x, &w, &b, &y, batch, in, out]() {
    const double* gy = y.grad().data();
    const double* xv = x.values().data();
    const double* wv = w.values().data();
    double* gx = x.grad().data();
    double* gw = w.grad().data();
    double* gb = b.grad().data();
    for (std::size_t r = 0; r < batch; ++r) {
      const double* gyrow = gy + r * out;
      const double* xrow = xv + r * in;
      double* gxrow = gx + r * in;
      for (std::size_t j = 0; j < out; ++j) gb[j] += gyrow[j];
      for (std::size_t k = 0; k < in; ++k) {
        const double* wrow = wv + k * out;
        double acc = 0.0;
        for (std::size_t j = 0; j < out; ++j) acc += gyrow[j] * wrow[j];
        gxrow[k] += acc;
        const double xk = xrow[k];
        if (xk != 0.0) {
          double* gwrow = gw + k * out;
          for (std::size_t j = 0; j < out; ++j) gwrow[j] += xk * gyrow[j];
        }
      }
    }
  });
  return y;
}

Tensor& relu(Tape& tape, Tensor& x) {
  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  y.require_finite_values("relu output");
  tape.record([&x, &y]() {
    auto xv = x.values();
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < xv.size(); ++i) {
      if (xv[i] > 0.0) gx[i] += gy[i];
    }
  });
  return y;
}

Tensor& tanh_act(Tape& tape, Tensor& x) {
  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = std::tanh(xv[i]);
  y.require_finite_values("tanh output");
  tape.record([&x, &y]() {
    auto yv = y.values();
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < yv.size(); ++i) gx[i] += (1.0 - yv[i] * yv[i]) * gy[i];
  });
  return y;
}

Tensor& sigmoid(Tape& tape, Tensor& x) {
  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = 1.0 / (1.0 + std::exp(-xv[i]));
  y.require_finite_values("sigmoid output");
  tape.record([&x, &y]() {
    auto yv = y.values();
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < yv.size(); ++i) gx[i] += yv[i] * (1.0 - yv[i]) * gy[i];
  });
  return y;
}

Tensor& dropout(Tape& tape, Tensor& x, double rate, bool train, Rng* rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0,1), got " + std::to_string(rate));
  }
  if (!train || rate == 0.0) {
    Tensor& y = tape.make(x.rows(), x.cols());
    auto xv = x.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = xv[i];
    tape.record([&x, &y]() {
      auto gy = y.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    });
    return y;
  }
  if (rng == nullptr) {
    throw UsageError("dropout in train mode needs a random source");
  }

  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  const double keep = 1.0 - rate;
  const double inv_keep = 1.0 / keep;
  std::vector<double> mask(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    mask[i] = rng->uniform() < keep ? inv_keep : 0.0;
    yv[i] = xv[i] * mask[i];
  }
  y.require_finite_values("dropout output");
  tape.record([&x, &y, mask = std::move(mask)]() {
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * mask[i];
  });
  return y;
}

Tensor& concat_cols(Tape& tape, Tensor& a, Tensor& b) {
  if (a.rows() != b.rows()) {
    throw ConfigError("concat: row counts differ");
  }
  const std::size_t rows = a.rows();
  const std::size_t ca = a.cols();
  const std::size_t cb = b.cols();
  Tensor& y = tape.make(rows, ca + cb);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < ca; ++j) y.at(r, j) = a.at(r, j);
    for (std::size_t j = 0; j < cb; ++j) y.at(r, ca + j) = b.at(r, j);
  }
  tape.record([&a, &b, &y, rows, ca, cb]() {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < ca; ++j) a.grad_at(r, j) += y.grad_at(r, j);
      for (std::size_t j = 0; j < cb; ++j) b.grad_at(r, j) += y.grad_at(r, ca + j);
    }
  });
  return y;
}

Tensor& add(Tape& tape, Tensor& a, Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor& y = tape.make(a.rows(), a.cols());
  auto av = a.values();
  auto bv = b.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] + bv[i];
  y.require_finite_values("add output");
  tape.record([&a, &b, &y]() {
    auto gy = y.grad();
    auto ga = a.grad();
    auto gb = b.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += gy[i];
      gb[i] += gy[i];
    }
  });
  return y;
}

Tensor& sub(Tape& tape, Tensor& a, Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor& y = tape.make(a.rows(), a.cols());
  auto av = a.values();
  auto bv = b.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] - bv[i];
  y.require_finite_values("sub output");
  tape.record([&a, &b, &y]() {
    auto gy = y.grad();
    auto ga = a.grad();
    auto gb = b.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += gy[i];
      gb[i] -= gy[i];
    }
  });
  return y;
}

Tensor& mul(Tape& tape, Tensor& a, Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor& y = tape.make(a.rows(), a.cols());
  auto av = a.values();
  auto bv = b.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] * bv[i];
  y.require_finite_values("mul output");
  tape.record([&a, &b, &y]() {
    auto av = a.values();
    auto bv = b.values();
    auto gy = y.grad();
    auto ga = a.grad();
    auto gb = b.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += bv[i] * gy[i];
      gb[i] += av[i] * gy[i];
    }
  });
  return y;
}

Tensor& scale(Tape& tape, Tensor& x, double c) {
  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = c * xv[i];
  y.require_finite_values("scale output");
  tape.record([&x, &y, c]() {
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += c * gy[i];
  });
  return y;
}

Tensor& square(Tape& tape, Tensor& x) {
  Tensor& y = tape.make(x.rows(), x.cols());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = xv[i] * xv[i];
  y.require_finite_values("square output");
  tape.record([&x, &y]() {
    auto xv = x.values();
    auto gy = y.grad();
    auto gx = x.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += 2.0 * xv[i] * gy[i];
  });
  return y;
}

Tensor& sum_all(Tape& tape, Tensor& x) {
  Tensor& y = tape.make(1, 1);
  double s = 0.0;
  for (double v : x.values()) s += v;
  y.values()[0] = s;
  y.require_finite_values("sum output");
  tape.record([&x, &y]() {
    const double g = y.grad()[0];
    auto gx = x.grad();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
  return y;
}

Tensor& mean_all(Tape& tape, Tensor& x) {
  if (x.size() == 0) {
    throw ConfigError("mean over empty tensor");
  }
  Tensor& y = tape.make(1, 1);
  double s = 0.0;
  for (double v : x.values()) s += v;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  y.values()[0] = s * inv_n;
  y.require_finite_values("mean output");
  tape.record([&x, &y, inv_n]() {
    const double g = y.grad()[0] * inv_n;
    auto gx = x.grad();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
  return y;
}

}  // namespace mbae::ops
