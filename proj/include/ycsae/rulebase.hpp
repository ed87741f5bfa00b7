#pragma once

#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

#include "ycsae/genome.hpp"
#include "ycsae/learning.hpp"

namespace ycsae {

/// One classifier: an MLP autoencoder plus its bookkeeping scalars.
struct Rule {
  NetworkGenome genome;
  double error = 0.0;              // matching-error estimate, eps
  double niche = 0.0;              // match-set-size estimate, sigma
  std::uint64_t ga_timestamp = 0;  // last system cycle the EA saw this rule
  std::uint64_t id = 0;            // stable within a run, never reused
};

/// Fixed-capacity population. Stays at exactly N rules after init_rulebase;
/// every insertion is one-out-one-in.
struct Rulebase {
  std::vector<Rule> rules;
  std::uint64_t next_id = 0;

  std::size_t size() const { return rules.size(); }
  std::uint64_t allocate_id() { return next_id++; }
};

/// Indices of the rules whose match node fired on `input`.
struct MatchSet {
  std::vector<std::size_t> members;
  Pattern input;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

/// N rules with uniform random genomes, error eps0, niche sigma0, timestamp 0.
inline Rulebase init_rulebase(std::size_t n, std::size_t l, std::size_t h, double w0,
                              double eps0, double sigma0, Rng& rng) {
  if (n == 0) throw std::invalid_argument("pop-size must be >= 1");
  Rulebase rb;
  rb.rules.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rb.rules.push_back(Rule{random_genome(l, h, w0, rng), eps0, sigma0, 0, rb.allocate_id()});
  }
  return rb;
}

/// Members are exactly the rules with match activation strictly above 0.5;
/// an activation of exactly 0.5 does not match.
inline MatchSet build_match_set(const Rulebase& rb, std::span<const double> x) {
  MatchSet ms;
  ms.input.assign(x.begin(), x.end());
  std::vector<double> hidden;
  for (std::size_t i = 0; i < rb.rules.size(); ++i) {
    if (match_activation(rb.rules[i].genome, x, hidden) > 0.5) {
      ms.members.push_back(i);
    }
  }
  return ms;
}

/// Removes one rule chosen by roulette over the niche-size estimates and
/// inserts `newcomer` in its place. All sigma zero falls back to a uniform
/// pick. Returns the replaced slot.
inline std::size_t replace_by_niche(Rulebase& rb, Rule newcomer, Rng& rng) {
  std::vector<double> sigmas(rb.rules.size());
  for (std::size_t i = 0; i < rb.rules.size(); ++i) sigmas[i] = rb.rules[i].niche;
  const std::size_t victim = roulette(sigmas, rng);
  rb.rules[victim] = std::move(newcomer);
  return victim;
}

/// Guaranteed matcher used when random draws keep missing: the match node
/// ignores the hidden layer and its bias drives the activation to
/// sigmoid(1) ~ 0.731 > 0.5 for every input.
inline NetworkGenome fallback_matcher_genome(std::size_t l, std::size_t h, double w0,
                                             Rng& rng) {
  NetworkGenome g = random_genome(l, h, w0, rng);
  double* match = g.params.data() + g.layer2_offset(l);
  for (std::size_t j = 0; j < h; ++j) match[j] = 0.0;
  match[h] = 1.0;
  return g;
}

inline constexpr int kCoverAttemptLimit = 10000;

/// Draws random networks until one matches x (at most kCoverAttemptLimit
/// tries, then the deterministic fallback), gives it fresh estimates and the
/// current timestamp, and inserts it by niche-size roulette.
/// Call only when the match set on x is empty. Returns the new rule's id.
inline std::uint64_t cover(Rulebase& rb, std::span<const double> x, std::uint64_t t,
                           double eps0, double sigma0, double w0, Rng& rng) {
  const std::size_t l = rb.rules.front().genome.input_width;
  const std::size_t h = rb.rules.front().genome.hidden_width;
  NetworkGenome g;
  std::vector<double> hidden;
  bool found = false;
  for (int attempt = 0; attempt < kCoverAttemptLimit; ++attempt) {
    g = random_genome(l, h, w0, rng);
    if (match_activation(g, x, hidden) > 0.5) {
      found = true;
      break;
    }
  }
  if (!found) g = fallback_matcher_genome(l, h, w0, rng);
  Rule rule{std::move(g), eps0, sigma0, t, rb.allocate_id()};
  const std::uint64_t id = rule.id;
  replace_by_niche(rb, std::move(rule), rng);
  return id;
}

}  // namespace ycsae
