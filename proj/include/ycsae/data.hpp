#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "ycsae/core.hpp"

namespace ycsae {

/// Synthetic noisy-binary source: a base pattern of all 0s or all 1s
/// (equiprobable) with independent per-bit flips.
struct DatasetSpec {
  std::size_t pattern_length = 11;
  double noise_rate = 0.1;

  void validate() const {
    if (pattern_length == 0) throw std::invalid_argument("length must be >= 1");
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
      throw std::invalid_argument("noise must be in [0,1]");
    }
  }
};

inline void sample_pattern_into(const DatasetSpec& spec, Rng& rng, Pattern& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base = unit(rng) < 0.5 ? 0.0 : 1.0;
  out.resize(spec.pattern_length);
  for (double& bit : out) {
    bit = unit(rng) < spec.noise_rate ? 1.0 - base : base;
  }
}

inline Pattern sample_pattern(const DatasetSpec& spec, Rng& rng) {
  Pattern p;
  sample_pattern_into(spec, rng, p);
  return p;
}

/// Text dataset: one pattern per line, characters '0'/'1', uniform length.
inline std::vector<Pattern> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path + ": cannot open for reading");
  std::vector<Pattern> patterns;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;  // trailing newline
    if (width == 0) {
      width = line.size();
      if (width == 0) {
        throw FileError(path + ": line 1: empty pattern");
      }
    } else if (line.size() != width) {
      throw FileError(path + ": line " + std::to_string(line_no) + ": length " +
                      std::to_string(line.size()) + " differs from first line's " +
                      std::to_string(width));
    }
    Pattern p(width);
    for (std::size_t i = 0; i < width; ++i) {
      if (line[i] == '0') {
        p[i] = 0.0;
      } else if (line[i] == '1') {
        p[i] = 1.0;
      } else {
        throw FileError(path + ": line " + std::to_string(line_no) +
                        ": invalid character '" + line[i] + "'");
      }
    }
    patterns.push_back(std::move(p));
  }
  if (patterns.empty()) throw FileError(path + ": empty dataset");
  return patterns;
}

inline void write_dataset(std::ostream& out, const std::vector<Pattern>& patterns) {
  for (const Pattern& p : patterns) {
    for (double bit : p) out.put(bit == 0.0 ? '0' : '1');
    out.put('\n');
  }
}

inline void save_dataset(const std::string& path, const std::vector<Pattern>& patterns) {
  std::ofstream out(path);
  if (!out) throw FileError(path + ": cannot open for writing");
  write_dataset(out, patterns);
  if (!out) throw FileError(path + ": write failed");
}

}  // namespace ycsae
