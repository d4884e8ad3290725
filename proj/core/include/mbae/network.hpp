#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mbae/ops.hpp"
#include "mbae/rng.hpp"
#include "mbae/tape.hpp"
#include "mbae/tensor.hpp"

namespace mbae {

enum class LayerKind { kDense, kRelu, kTanh, kDropout, kConcatSkip };

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t width = 0;       // dense / concat-skip output width
  double dropout_rate = 0.0;   // dropout only

  static LayerSpec dense(std::size_t width) { return {LayerKind::kDense, width, 0.0}; }
  static LayerSpec relu() { return {LayerKind::kRelu, 0, 0.0}; }
  static LayerSpec tanh() { return {LayerKind::kTanh, 0, 0.0}; }
  static LayerSpec dropout(double rate) { return {LayerKind::kDropout, 0, rate}; }
  // output = concat(input, dense(input)); width is the dense part's width.
  static LayerSpec concat_skip(std::size_t width) { return {LayerKind::kConcatSkip, width, 0.0}; }
};

// Eval-mode differentiable vector function that records onto a caller's tape.
// Lets the action-gradient chain run over hand-set functions in tests as well
// as real networks.
class DifferentiableMap {
 public:
  virtual ~DifferentiableMap() = default;
  virtual std::size_t in_width() const = 0;
  virtual std::size_t out_width() const = 0;
  virtual Tensor& apply(Tape& tape, Tensor& input) = 0;
  // Discard parameter gradients a backward sweep may have left behind.
  virtual void zero_param_grads() {}
};

// Feed-forward network over an ordered LayerSpec list. The list must be
// non-empty and end in a dense layer; dense and concat-skip layers own
// Glorot-initialized weights and zero biases.
class Network {
 public:
  Network(std::size_t input_width, std::vector<LayerSpec> layers, Rng& init_rng);

  // Records onto `tape`; `rng` is required when train==true and the network
  // has a dropout layer with a positive rate. Eval mode is deterministic.
  Tensor& forward(Tape& tape, Tensor& input, bool train = false, Rng* rng = nullptr);

  // Convenience for single-row eval forwards.
  std::vector<double> eval(std::span<const double> input);

  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return output_width_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  // Weights and biases interleaved in layer order: w0, b0, w1, b1, ...
  std::vector<Tensor*> parameters();
  std::size_t parameter_count() const;

  // Flat copies for checkpointing.
  std::vector<double> flatten_parameters() const;
  void load_parameters(std::span<const double> flat);

 private:
  std::size_t input_width_;
  std::size_t output_width_;
  std::vector<LayerSpec> layers_;
  std::vector<Tensor> weights_;  // parallel to dense/concat-skip layers
  std::vector<Tensor> biases_;
};

// Adapter exposing a network's eval forward as a DifferentiableMap.
class NetworkMap final : public DifferentiableMap {
 public:
  explicit NetworkMap(Network& net) : net_(&net) {}
  std::size_t in_width() const override { return net_->input_width(); }
  std::size_t out_width() const override { return net_->output_width(); }
  Tensor& apply(Tape& tape, Tensor& input) override {
    return net_->forward(tape, input, /*train=*/false, nullptr);
  }
  void zero_param_grads() override {
    for (Tensor* p : net_->parameters()) p->zero_grad();
  }

 private:
  Network* net_;
};

// d(seed_grad . output)/d(input), eval mode, parameters untouched afterwards.
Tensor grad_wrt_input(Network& net, const Tensor& input, const Tensor& seed_grad);

}  // namespace mbae
