#pragma once

#include <array>
#include <cstdint>

#include "ycsae/learning.hpp"
#include "ycsae/rulebase.hpp"

namespace ycsae {

/// Widrow-Hoff updates for every member of the current match set: first the
/// matching-error estimate against this presentation's reconstruction error,
/// then the niche-size estimate against |[M]|. Returns the mean of the
/// per-member reconstruction-error signals (the per-presentation signal used
/// by the metrics).
inline double update_match_set(Rulebase& rb, const MatchSet& ms, double beta) {
  ForwardResult fwd;
  double signal_sum = 0.0;
  for (std::size_t idx : ms.members) {
    Rule& rule = rb.rules[idx];
    forward_into(rule.genome, ms.input, fwd);
    const double signal = reconstruction_error(ms.input, fwd.reconstruction);
    rule.error = update_error(rule.error, signal, beta);
    rule.niche = update_niche(rule.niche, static_cast<double>(ms.size()), beta);
    signal_sum += signal;
  }
  return ms.empty() ? 0.0 : signal_sum / static_cast<double>(ms.size());
}

/// True when the members' mean cycles since their last EA exceeds theta_ga
/// (strictly). Call with a non-empty match set.
inline bool ea_should_fire(const Rulebase& rb, const MatchSet& ms, std::uint64_t t,
                           double theta_ga) {
  double ts_sum = 0.0;
  for (std::size_t idx : ms.members) {
    ts_sum += static_cast<double>(rb.rules[idx].ga_timestamp);
  }
  const double mean_elapsed =
      static_cast<double>(t) - ts_sum / static_cast<double>(ms.size());
  return mean_elapsed > theta_ga;
}

/// Whether offspring start from the parent's error/niche estimates or from
/// the fresh eps0/sigma0 values.
enum class OffspringInit { inherit, reset };

/// One niche EA event: stamps every member with t, roulette-selects two
/// parents (independently, with replacement) by inverse-error fitness,
/// mutates a clone of each, and inserts both offspring by niche-size
/// roulette. Population size is unchanged.
inline void run_ea(Rulebase& rb, const MatchSet& ms, std::uint64_t t,
                   const LearningParams& params, Rng& rng,
                   OffspringInit init = OffspringInit::inherit, double eps0 = 0.0,
                   double sigma0 = 0.0) {
  std::vector<double> fit(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Rule& rule = rb.rules[ms.members[i]];
    rule.ga_timestamp = t;
    fit[i] = fitness(rule.error, params.v);
  }

  // Both parents are snapshot before any replacement can evict them.
  const std::array<std::size_t, 2> parents = {ms.members[roulette(fit, rng)],
                                              ms.members[roulette(fit, rng)]};
  std::array<Rule, 2> offspring;
  for (std::size_t i = 0; i < 2; ++i) {
    const Rule& parent = rb.rules[parents[i]];
    offspring[i].genome = mutate(parent.genome, params.mu, params.m0, rng);
    offspring[i].error = init == OffspringInit::inherit ? parent.error : eps0;
    offspring[i].niche = init == OffspringInit::inherit ? parent.niche : sigma0;
    offspring[i].ga_timestamp = t;
  }
  for (Rule& child : offspring) {
    child.id = rb.allocate_id();
    replace_by_niche(rb, std::move(child), rng);
  }
}

}  // namespace ycsae
