#include "mbae/network.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

bool has_weights(LayerKind kind) {
  return kind == LayerKind::kDense || kind == LayerKind::kConcatSkip;
}

}  // namespace

Network::Network(std::size_t input_width, std::vector<LayerSpec> layers, Rng& init_rng)
    : input_width_(input_width), layers_(std::move(layers)) {
  if (input_width_ == 0) {
    throw ConfigError("network input width must be positive");
  }
  if (layers_.empty()) {
    throw ConfigError("network needs at least one layer");
  }
  if (layers_.back().kind != LayerKind::kDense) {
    throw ConfigError("network must end in a dense layer");
  }

  std::size_t width = input_width_;
  for (const LayerSpec& spec : layers_) {
    switch (spec.kind) {
      case LayerKind::kDense:
      case LayerKind::kConcatSkip: {
        if (spec.width == 0) {
          throw ConfigError("dense/concat-skip layer width must be positive");
        }
        const std::size_t fan_in = width;
        const std::size_t fan_out = spec.width;
        Tensor w(fan_in, fan_out);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : w.values()) v = init_rng.uniform(-bound, bound);
        weights_.push_back(std::move(w));
        biases_.emplace_back(1, fan_out);
        width = spec.kind == LayerKind::kDense ? fan_out : width + fan_out;
        break;
      }
      case LayerKind::kDropout:
        if (spec.dropout_rate < 0.0 || spec.dropout_rate >= 1.0) {
          throw ConfigError("dropout rate must be in [0,1)");
        }
        break;
      case LayerKind::kRelu:
      case LayerKind::kTanh:
        break;
    }
  }
  output_width_ = width;
}

Tensor& Network::forward(Tape& tape, Tensor& input, bool train, Rng* rng) {
  if (input.cols() != input_width_) {
    throw ConfigError("network expects input width " + std::to_string(input_width_) +
                      ", got " + std::to_string(input.cols()));
  }
  input.require_finite_values("network input");

  Tensor* cur = &input;
  std::size_t param_idx = 0;
  for (const LayerSpec& spec : layers_) {
    switch (spec.kind) {
      case LayerKind::kDense:
        cur = &ops::dense(tape, *cur, weights_[param_idx], biases_[param_idx]);
        ++param_idx;
        break;
      case LayerKind::kConcatSkip: {
        Tensor& branch = ops::dense(tape, *cur, weights_[param_idx], biases_[param_idx]);
        ++param_idx;
        cur = &ops::concat_cols(tape, *cur, branch);
        break;
      }
      case LayerKind::kRelu:
        cur = &ops::relu(tape, *cur);
        break;
      case LayerKind::kTanh:
        cur = &ops::tanh_act(tape, *cur);
        break;
      case LayerKind::kDropout:
        cur = &ops::dropout(tape, *cur, spec.dropout_rate, train, rng);
        break;
    }
  }
  return *cur;
}

std::vector<double> Network::eval(std::span<const double> input) {
  Tape tape;
  Tensor in = Tensor::row(input);
  Tensor& out = forward(tape, in);
  return std::vector<double>(out.values().begin(), out.values().end());
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> params;
  params.reserve(2 * weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    params.push_back(&weights_[i]);
    params.push_back(&biases_[i]);
  }
  return params;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& w : weights_) n += w.size();
  for (const Tensor& b : biases_) n += b.size();
  return n;
}

std::vector<double> Network::flatten_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    flat.insert(flat.end(), weights_[i].values().begin(), weights_[i].values().end());
    flat.insert(flat.end(), biases_[i].values().begin(), biases_[i].values().end());
  }
  return flat;
}

void Network::load_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw IoError("parameter blob size " + std::to_string(flat.size()) +
                  " does not match network parameter count " +
                  std::to_string(parameter_count()));
  }
  std::size_t pos = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    auto wv = weights_[i].values();
    for (std::size_t j = 0; j < wv.size(); ++j) wv[j] = flat[pos++];
    auto bv = biases_[i].values();
    for (std::size_t j = 0; j < bv.size(); ++j) bv[j] = flat[pos++];
  }
}

Tensor grad_wrt_input(Network& net, const Tensor& input, const Tensor& seed_grad) {
  Tape tape;
  Tensor in(input.rows(), input.cols(),
            std::vector<double>(input.values().begin(), input.values().end()));
  Tensor& out = net.forward(tape, in);
  backward(tape, out, seed_grad);
  in.require_finite_grad("input gradient");
  Tensor result(in.rows(), in.cols(),
                std::vector<double>(in.grad().begin(), in.grad().end()));
  // Parameter grads picked up during the sweep are not this call's output.
  for (Tensor* p : net.parameters()) p->zero_grad();
  return result;
}

}  // namespace mbae
