#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "ycsae/core.hpp"

namespace ycsae {

/// Flat parameter vector of one rule's fully connected MLP:
/// l input nodes, H hidden nodes, l+1 output nodes (the last output is the
/// match node), every node with a bias and a sigmoid transfer function.
///
/// Parameter layout, total length (l+1)*H + (H+1)*(l+1):
///   for each hidden node j in [0,H):    l input weights, then the bias
///   for each output node k in [0,l]:    H hidden weights, then the bias
/// Output nodes 0..l-1 reconstruct the input; node l is the match node.
struct NetworkGenome {
  std::size_t input_width = 0;   // l
  std::size_t hidden_width = 0;  // H
  std::vector<double> params;

  static std::size_t param_count(std::size_t l, std::size_t h) {
    return (l + 1) * h + (h + 1) * (l + 1);
  }

  // offset of hidden node j's weight block
  std::size_t layer1_offset(std::size_t j) const { return j * (input_width + 1); }
  // offset of output node k's weight block; k == input_width is the match node
  std::size_t layer2_offset(std::size_t k) const {
    return (input_width + 1) * hidden_width + k * (hidden_width + 1);
  }
};

struct ForwardResult {
  std::vector<double> reconstruction;  // length l, each in (0,1)
  double match_activation = 0.0;       // in (0,1)
  std::vector<double> hidden;          // length H, each in (0,1)
};

namespace detail {

inline void check_input(const NetworkGenome& g, std::span<const double> x) {
  if (x.size() != g.input_width) {
    throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                " does not match network input width " +
                                std::to_string(g.input_width));
  }
}

// Layer-1 pass shared by forward() and encode().
inline void hidden_into(const NetworkGenome& g, std::span<const double> x,
                        std::vector<double>& hidden) {
  const std::size_t l = g.input_width;
  hidden.resize(g.hidden_width);
  const double* p = g.params.data();
  for (std::size_t j = 0; j < g.hidden_width; ++j) {
    double z = p[l];  // bias
    for (std::size_t i = 0; i < l; ++i) z += p[i] * x[i];
    hidden[j] = sigmoid(z);
    p += l + 1;
  }
}

inline double output_node(const NetworkGenome& g, const std::vector<double>& hidden,
                          std::size_t k) {
  const double* p = g.params.data() + g.layer2_offset(k);
  double z = p[g.hidden_width];  // bias
  for (std::size_t j = 0; j < g.hidden_width; ++j) z += p[j] * hidden[j];
  return sigmoid(z);
}

}  // namespace detail

/// Every parameter drawn uniformly from [-w0, +w0].
inline NetworkGenome random_genome(std::size_t l, std::size_t h, double w0, Rng& rng) {
  if (l == 0 || h == 0) {
    throw std::invalid_argument("network needs at least one input and one hidden node");
  }
  if (!(w0 > 0.0)) {
    throw std::invalid_argument("w0 must be > 0");
  }
  NetworkGenome g{l, h, {}};
  g.params.resize(NetworkGenome::param_count(l, h));
  std::uniform_real_distribution<double> dist(-w0, w0);
  for (double& p : g.params) p = dist(rng);
  return g;
}

/// Full forward pass into a caller-owned result (no allocation once sized).
inline void forward_into(const NetworkGenome& g, std::span<const double> x,
                         ForwardResult& out) {
  detail::check_input(g, x);
  detail::hidden_into(g, x, out.hidden);
  out.reconstruction.resize(g.input_width);
  for (std::size_t k = 0; k < g.input_width; ++k) {
    out.reconstruction[k] = detail::output_node(g, out.hidden, k);
  }
  out.match_activation = detail::output_node(g, out.hidden, g.input_width);
}

inline ForwardResult forward(const NetworkGenome& g, std::span<const double> x) {
  ForwardResult r;
  forward_into(g, x, r);
  return r;
}

/// Match-node activation only; `hidden` is a reusable scratch buffer.
inline double match_activation(const NetworkGenome& g, std::span<const double> x,
                               std::vector<double>& hidden) {
  detail::check_input(g, x);
  detail::hidden_into(g, x, hidden);
  return detail::output_node(g, hidden, g.input_width);
}

/// The hidden-layer activations: the learned low-dimensional encoding of x.
/// Identical to forward(g, x).hidden by construction.
inline std::vector<double> encode(const NetworkGenome& g, std::span<const double> x) {
  detail::check_input(g, x);
  std::vector<double> hidden;
  detail::hidden_into(g, x, hidden);
  return hidden;
}

/// Each parameter independently, with probability mu, gets +/- u added,
/// u uniform from (0, m0], sign equiprobable. Architecture unchanged.
inline NetworkGenome mutate(const NetworkGenome& g, double mu, double m0, Rng& rng) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in [0,1]");
  if (!(m0 > 0.0)) throw std::invalid_argument("m0 must be > 0");
  NetworkGenome out = g;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& p : out.params) {
    if (unit(rng) < mu) {
      const double u = m0 - unit(rng) * m0;  // (0, m0]
      p += unit(rng) < 0.5 ? u : -u;
    }
  }
  return out;
}

}  // namespace ycsae
