#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "ycsae/ea.hpp"

using namespace ycsae;

namespace {

NetworkGenome zero_genome(std::size_t l, std::size_t h) {
  NetworkGenome g{l, h, {}};
  g.params.assign(NetworkGenome::param_count(l, h), 0.0);
  return g;
}

NetworkGenome match_bias_genome(std::size_t l, std::size_t h, double bias) {
  NetworkGenome g = zero_genome(l, h);
  g.params[g.layer2_offset(l) + h] = bias;
  return g;
}

MatchSet match_all(const Rulebase& rb, Pattern x) {
  MatchSet ms;
  ms.input = std::move(x);
  for (std::size_t i = 0; i < rb.size(); ++i) ms.members.push_back(i);
  return ms;
}

}  // namespace

TEST_CASE("update_match_set applies both Widrow-Hoff updates to members only") {
  const std::size_t l = 2, h = 1;
  Rulebase rb;
  rb.rules.push_back(Rule{match_bias_genome(l, h, 2.0), 1.0, 4.0, 0, 0});
  rb.rules.push_back(Rule{match_bias_genome(l, h, 2.0), 2.0, 8.0, 0, 1});
  rb.rules.push_back(Rule{zero_genome(l, h), 3.0, 16.0, 0, 2});  // non-member
  rb.next_id = 3;

  const Pattern x = {1.0, 0.0};
  MatchSet ms = build_match_set(rb, x);
  REQUIRE(ms.members == std::vector<std::size_t>{0, 1});

  // zero weights into the reconstruction nodes: recon is all 0.5, so the
  // signal is sqrt(0.25 + 0.25) for every member
  const double signal = std::sqrt(0.5);
  const double mean = update_match_set(rb, ms, 0.2);
  CHECK(std::abs(mean - signal) <= 1e-12);

  CHECK(rb.rules[0].error == update_error(1.0, signal, 0.2));
  CHECK(rb.rules[1].error == update_error(2.0, signal, 0.2));
  CHECK(rb.rules[0].niche == update_niche(4.0, 2.0, 0.2));  // |[M]| = 2
  CHECK(rb.rules[1].niche == update_niche(8.0, 2.0, 0.2));
  CHECK(rb.rules[2].error == 3.0);
  CHECK(rb.rules[2].niche == 16.0);
}

TEST_CASE("repeated presentations converge eps geometrically") {
  // |eps_t - s| = (1-beta)^t |eps_0 - s|, checked to 1e-9 for t <= 100
  const double beta = 0.2, s = 0.7071067811865476, eps0 = 5.5;
  double eps = eps0;
  for (int t = 1; t <= 100; ++t) {
    eps = update_error(eps, s, beta);
    const double predicted = std::pow(1.0 - beta, t) * std::abs(eps0 - s);
    CHECK(std::abs(std::abs(eps - s) - predicted) <= 1e-9);
  }
}

TEST_CASE("ea_should_fire uses the strict mean-elapsed threshold") {
  const std::size_t l = 2, h = 1;
  Rulebase rb;
  rb.rules.push_back(Rule{zero_genome(l, h), 1, 1, 100, 0});
  rb.rules.push_back(Rule{zero_genome(l, h), 1, 1, 100, 1});
  rb.next_id = 2;
  MatchSet ms = match_all(rb, {1, 0});

  CHECK_FALSE(ea_should_fire(rb, ms, 100, 25.0));  // elapsed 0
  CHECK_FALSE(ea_should_fire(rb, ms, 125, 25.0));  // exactly theta: "over" is strict
  CHECK(ea_should_fire(rb, ms, 126, 25.0));

  // single member, timestamp t-26, theta 25 -> 26 > 25
  Rulebase one;
  one.rules.push_back(Rule{zero_genome(l, h), 1, 1, 74, 0});
  one.next_id = 1;
  MatchSet single = match_all(one, {1, 0});
  CHECK(ea_should_fire(one, single, 100, 25.0));

  // theta 0 fires whenever any member has an older stamp
  CHECK(ea_should_fire(one, single, 75, 0.0));
  CHECK_FALSE(ea_should_fire(one, single, 74, 0.0));
}

TEST_CASE("run_ea stamps members, clones a singleton parent, keeps size") {
  const std::size_t l = 3, h = 2, n = 12;
  Rng init_rng(3);
  Rulebase rb = init_rulebase(n, l, h, 1.0, 2.0, 6.0, init_rng);
  // make rule 4 the only member
  MatchSet ms;
  ms.input = {1, 0, 1};
  ms.members = {4};
  const NetworkGenome parent_genome = rb.rules[4].genome;
  const double parent_error = rb.rules[4].error;
  const double parent_niche = rb.rules[4].niche;

  LearningParams params;
  params.mu = 0.0;  // offspring are exact clones
  Rng rng(4);
  run_ea(rb, ms, 77, params, rng);

  CHECK(rb.size() == n);
  CHECK(rb.rules[4].ga_timestamp == 77);
  // both offspring are identical clones of the singleton parent
  int clones = 0;
  for (const Rule& r : rb.rules) {
    if (r.id >= n) {
      ++clones;
      CHECK(r.genome.params == parent_genome.params);
      CHECK(r.error == parent_error);
      CHECK(r.niche == parent_niche);
      CHECK(r.ga_timestamp == 77);
    }
  }
  CHECK(clones == 2);
}

TEST_CASE("run_ea adds exactly two offspring per invocation") {
  const std::size_t n = 30;
  Rng init_rng(5);
  Rulebase rb = init_rulebase(n, 4, 2, 1.0, 2.0, 6.0, init_rng);
  MatchSet ms;
  ms.input = {1, 0, 1, 1};
  ms.members = {0, 3, 7, 9};
  LearningParams params;
  Rng rng(6);

  std::set<std::uint64_t> before;
  for (const Rule& r : rb.rules) before.insert(r.id);
  run_ea(rb, ms, 50, params, rng);
  std::set<std::uint64_t> after;
  for (const Rule& r : rb.rules) after.insert(r.id);

  CHECK(rb.size() == n);
  std::vector<std::uint64_t> added;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(added));
  // the second offspring can evict the first, so 1 or 2 newcomers survive,
  // and the net population change is always zero
  CHECK(added.size() >= 1);
  CHECK(added.size() <= 2);
  for (std::uint64_t id : added) CHECK(id >= n);
}

TEST_CASE("run_ea selects the near-zero-error parent almost surely") {
  // eps {0, 10} at v = 50: fitness {1, ~1e-50}; with mu=0 every offspring
  // should clone the zero-error parent.
  const std::size_t l = 2, h = 1;
  Rulebase rb;
  rb.rules.push_back(Rule{match_bias_genome(l, h, 1.0), 0.0, 3.0, 0, 0});
  rb.rules.push_back(Rule{match_bias_genome(l, h, 0.5), 10.0, 3.0, 0, 1});
  rb.next_id = 2;
  const NetworkGenome good = rb.rules[0].genome;

  LearningParams params;
  params.mu = 0.0;
  params.v = 50.0;
  Rng rng(7);
  int good_clones = 0, total_offspring = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rulebase copy = rb;
    MatchSet ms;
    ms.input = {1, 1};
    ms.members = {0, 1};
    run_ea(copy, ms, 10, params, rng);
    for (const Rule& r : copy.rules) {
      if (r.id >= 2) {
        ++total_offspring;
        if (r.genome.params == good.params) ++good_clones;
      }
    }
  }
  CHECK(total_offspring > 0);
  CHECK(good_clones == total_offspring);
}

TEST_CASE("run_ea can reset offspring estimates when configured") {
  Rng init_rng(8);
  Rulebase rb = init_rulebase(10, 3, 2, 1.0, 9.0, 90.0, init_rng);
  for (Rule& r : rb.rules) {
    r.error = 0.25;
    r.niche = 4.0;
  }
  MatchSet ms;
  ms.input = {1, 1, 0};
  ms.members = {2, 5};
  LearningParams params;
  params.mu = 0.0;
  Rng rng(9);
  run_ea(rb, ms, 33, params, rng, OffspringInit::reset, 1.5, 5.0);
  int fresh = 0;
  for (const Rule& r : rb.rules) {
    if (r.id >= 10) {
      ++fresh;
      CHECK(r.error == 1.5);
      CHECK(r.niche == 5.0);
    }
  }
  CHECK(fresh >= 1);
}
