#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "ycsae/core.hpp"

namespace ycsae {

struct LearningParams {
  double beta = 0.2;      // Widrow-Hoff learning rate, (0,1]
  double v = 50.0;        // fitness exponent, > 0
  double theta_ga = 25.0; // EA period threshold in cycles, >= 0
  double mu = 0.05;       // per-gene mutation probability, [0,1]
  double m0 = 0.1;        // mutation half-range, > 0

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
    if (!(v > 0.0)) throw std::invalid_argument("v must be > 0");
    if (!(theta_ga >= 0.0)) throw std::invalid_argument("theta-ga must be >= 0");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in [0,1]");
    if (!(m0 > 0.0)) throw std::invalid_argument("m0 must be > 0");
  }
};

/// Root of the summed squared per-node error between an input and its
/// reconstruction. The match node is not part of either vector.
inline double reconstruction_error(std::span<const double> x,
                                   std::span<const double> recon) {
  if (x.size() != recon.size()) {
    throw std::invalid_argument("reconstruction length " + std::to_string(recon.size()) +
                                " does not match input length " + std::to_string(x.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - recon[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Widrow-Hoff step of the matching-error estimate toward a fresh signal.
inline double update_error(double eps, double signal, double beta) {
  return eps + beta * (signal - eps);
}

/// Widrow-Hoff step of the niche-size estimate toward the current |[M]|.
inline double update_niche(double sigma, double match_size, double beta) {
  return sigma + beta * (match_size - sigma);
}

/// Inverse-error fitness 1 / (eps^v + 1), in (0,1]. When eps^v overflows
/// to infinity the result is 0.
inline double fitness(double eps, double v) {
  return 1.0 / (std::pow(eps, v) + 1.0);
}

/// Index i with probability w_i / sum(w); uniform when all weights are zero.
inline std::size_t roulette(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("roulette: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("roulette: weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) {
    return std::uniform_int_distribution<std::size_t>(0, weights.size() - 1)(rng);
  }
  const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (target < cumulative) return i;
  }
  return last_positive;  // roundoff left target at the very end of the wheel
}

}  // namespace ycsae
