#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

/// Two-layer perceptron: out = W2 * tanh(W1 * x + b1) + b2.
/// The hidden activation is always tanh and the output layer is linear;
/// every learned scoring function in the model is an instance of this.
struct Mlp {
  DenseMatrix w1;          // hidden x in
  std::vector<double> b1;  // hidden
  DenseMatrix w2;          // out x hidden
  std::vector<double> b2;  // out

  std::size_t in_dim() const { return w1.cols(); }
  std::size_t hidden_dim() const { return w1.rows(); }
  std::size_t out_dim() const { return w2.rows(); }

  std::vector<double> forward(const std::vector<double>& x) const {
    if (x.size() != in_dim())
      throw DimMismatch("Mlp::forward: input of " + std::to_string(x.size()) +
                        ", expected " + std::to_string(in_dim()));
    std::vector<double> h = matvec(w1, x);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::tanh(h[i] + b1[i]);
    std::vector<double> out = matvec(w2, h);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b2[i];
    return out;
  }

  /// Forward pass for networks with a single output unit.
  double scalar(const std::vector<double>& x) const {
    if (out_dim() != 1)
      throw DimMismatch("Mlp::scalar: network has " +
                        std::to_string(out_dim()) + " outputs");
    return forward(x)[0];
  }
};

/// Glorot-initialized weights, zero biases.
inline Mlp make_mlp(std::size_t in, std::size_t hidden, std::size_t out,
                    Rng& rng) {
  Mlp mlp;
  mlp.w1 = glorot(hidden, in, rng);
  mlp.b1.assign(hidden, 0.0);
  mlp.w2 = glorot(out, hidden, rng);
  mlp.b2.assign(out, 0.0);
  return mlp;
}

}  // namespace mhgrn
