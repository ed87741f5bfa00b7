#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ycsae {

// One RNG stream per training run / concurrent context.
using Rng = std::mt19937_64;

// Binary pattern presented to the networks as reals 0.0/1.0.
using Pattern = std::vector<double>;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Unreadable, unwritable or malformed files. The CLI maps this to exit
// code 2; validation failures (std::invalid_argument) map to exit code 1.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ycsae
