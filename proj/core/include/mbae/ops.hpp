#pragma once

#include "mbae/rng.hpp"
#include "mbae/tape.hpp"
#include "mbae/tensor.hpp"

namespace mbae::ops {

// Every op writes its result into a tape-owned tensor, records a backward
// rule, and verifies the freshly written values are finite. Input tensors may
// be tape nodes or caller-owned leaves; gradients accumulate into both.

// y = x * w + b with x (B,in), w (in,out), b (1,out) broadcast over rows.
Tensor& dense(Tape& tape, Tensor& x, Tensor& w, Tensor& b);

Tensor& relu(Tape& tape, Tensor& x);
Tensor& tanh_act(Tape& tape, Tensor& x);
Tensor& sigmoid(Tape& tape, Tensor& x);

// Inverted dropout: train mode zeroes entries with probability `rate` and
// scales survivors by 1/(1-rate); eval mode is the identity.
Tensor& dropout(Tape& tape, Tensor& x, double rate, bool train, Rng* rng);

// (B, ca) ++ (B, cb) -> (B, ca+cb); backward splits the gradient exactly.
Tensor& concat_cols(Tape& tape, Tensor& a, Tensor& b);

Tensor& add(Tape& tape, Tensor& a, Tensor& b);
Tensor& sub(Tape& tape, Tensor& a, Tensor& b);
Tensor& mul(Tape& tape, Tensor& a, Tensor& b);
Tensor& scale(Tape& tape, Tensor& x, double c);
Tensor& square(Tape& tape, Tensor& x);

// Reductions to a (1,1) scalar node.
Tensor& sum_all(Tape& tape, Tensor& x);
Tensor& mean_all(Tape& tape, Tensor& x);

}  // namespace mbae::ops
