#include <stdexcept>

#include "bgt/dominance.hpp"
#include "bgt/game.hpp"
#include "bgt/nash.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bgt;

namespace {

Game prisoners() {
  // cooperate/defect; defect strictly dominant for both
  return oracle::make_game("pd", {{3, 0}, {5, 1}}, {{3, 5}, {0, 1}});
}

Game matching_pennies() {
  return oracle::make_game("mp", {{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
}

Game battle() {
  return oracle::make_game("bos", {{2, 0}, {0, 1}}, {{1, 0}, {0, 2}});
}

}  // namespace

TEST_CASE("expected utility is the payoff-weighted opponent mix") {
  Game g = oracle::make_game("g", {{1, 3}, {2, 4}}, {{0, 0}, {0, 0}});
  std::vector<double> opp{0.5, 0.5};
  CHECK(expected_utility(g, 0, 0, opp) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(expected_utility(g, 0, 1, opp) == doctest::Approx(3.0).epsilon(1e-12));

  Game mp = matching_pennies();
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 2; ++a)
      CHECK(expected_utility(mp, p, a, opp) ==
            doctest::Approx(oracle::eu(mp, p, a, opp)).epsilon(1e-12));
}

TEST_CASE("expected_utilities matches the per-action loop") {
  Game g = oracle::make_game("g", {{10, -4, 7}, {0, 2, 5}}, {{1, 2, 3}, {4, 5, 6}});
  std::vector<double> opp{0.2, 0.3, 0.5};
  std::vector<double> u = expected_utilities(g, 0, opp);
  std::vector<double> want = oracle::all_eu(g, 0, opp);
  REQUIRE(u.size() == want.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(u[i] == doctest::Approx(want[i]).epsilon(1e-12));

  std::vector<double> own{0.4, 0.6};
  u = expected_utilities(g, 1, own);
  want = oracle::all_eu(g, 1, own);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(u[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("best response sets, including ties") {
  Game g = prisoners();
  std::vector<double> opp{0.5, 0.5};
  CHECK(best_response_set(g, 0, opp) == std::vector<int>{1});

  Game tied = oracle::make_game("t", {{1, 0}, {0, 1}, {0, 0}}, {{0, 0}, {0, 0}, {0, 0}});
  CHECK(best_response_set(tied, 0, opp) == std::vector<int>{0, 1});
}

TEST_CASE("uniform helpers produce valid distributions") {
  ActionDistribution u = uniform_distribution(3);
  CHECK(is_distribution(u));
  CHECK(u[0] == doctest::Approx(1.0 / 3));

  StrategyProfile p = uniform_profile(oracle::make_game("g", {{0, 0, 0}, {0, 0, 0}},
                                                        {{0, 0, 0}, {0, 0, 0}}));
  CHECK(p.strategies[0].size() == 2);
  CHECK(p.strategies[1].size() == 3);
  CHECK_FALSE(is_distribution(std::vector<double>{0.5, 0.6}));
  CHECK_FALSE(is_distribution(std::vector<double>{1.2, -0.2}));
}

TEST_CASE("normalize_payoffs converts points to expected cents") {
  Game g = prisoners();
  g.unit_factor = 2.0;  // two cents per point
  Game n = normalize_payoffs(g);
  CHECK(n.unit_factor == 1.0);
  CHECK(n.payoff(0, 1, 0) == doctest::Approx(10.0));
  CHECK(n.payoff(1, 0, 1) == doctest::Approx(10.0));
  // already normalized games pass through unchanged
  Game n2 = normalize_payoffs(n);
  CHECK(n2.payoffs[0] == n.payoffs[0]);
}

TEST_CASE("validate rejects malformed games") {
  Game g = prisoners();
  g.payoffs[0].pop_back();
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  Game h = prisoners();
  h.actions[1].clear();
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("profile regret is zero at equilibrium and positive off it") {
  Game mp = matching_pennies();
  StrategyProfile eq{{ActionDistribution{0.5, 0.5}, ActionDistribution{0.5, 0.5}}};
  CHECK(profile_regret(mp, eq) == doctest::Approx(0.0).epsilon(1e-12));

  Game pd = prisoners();
  StrategyProfile coop{{ActionDistribution{1.0, 0.0}, ActionDistribution{1.0, 0.0}}};
  CHECK(profile_regret(pd, coop) == doctest::Approx(2.0));  // defect gains 5 - 3
}

TEST_CASE("dominance: strict one-round and chained removal") {
  DominanceClassification pd = classify_dominance(prisoners());
  CHECK(pd.solvable_strict);
  CHECK(pd.solvable_weak);
  CHECK(pd.rounds_strict == 1);
  CHECK(pd.rounds_weak == 1);

  // sweep 1 drops row 1 and col 1, sweep 2 col 2, sweep 3 row 2
  Game chain = oracle::make_game("chain",
                                 {{10, 4, 6}, {9, 3, 5}, {8, 2, 12}},
                                 {{5, 1, 2}, {6, 2, 8}, {7, 4, 3}});
  DominanceClassification c = classify_dominance(chain);
  CHECK(c.solvable_strict);
  CHECK(c.rounds_strict == 3);
}

TEST_CASE("dominance: weak-only solvability is tracked separately") {
  Game g = oracle::make_game("w", {{2, 2}, {2, 1}}, {{1, 2}, {1, 1}});
  DominanceClassification d = classify_dominance(g);
  CHECK(d.solvable_weak);
  CHECK(d.rounds_weak == 1);
  CHECK_FALSE(d.solvable_strict);
}

TEST_CASE("dominance: cyclic games are not solvable") {
  DominanceClassification d = classify_dominance(matching_pennies());
  CHECK_FALSE(d.solvable_strict);
  CHECK_FALSE(d.solvable_weak);
  CHECK_FALSE(d.rounds_strict.has_value());
  CHECK_FALSE(d.rounds_weak.has_value());
}

TEST_CASE("dominance: a 1x1 game counts as one round") {
  Game g = oracle::make_game("one", {{7.0}}, {{7.0}});
  DominanceClassification d = classify_dominance(g);
  CHECK(d.solvable_strict);
  CHECK(d.rounds_strict == 1);
}

TEST_CASE("nash: strictly dominant profile is the unique pure equilibrium") {
  EquilibriumSet e = enumerate_nash(prisoners());
  REQUIRE(e.equilibria.size() == 1);
  CHECK(e.structure == EquilibriumStructure::SinglePure);
  CHECK_FALSE(e.degenerate);
  CHECK(is_pure(e.equilibria[0].strategies[0]));
  CHECK(e.equilibria[0].strategies[0][1] == doctest::Approx(1.0));
  CHECK(e.equilibria[0].strategies[1][1] == doctest::Approx(1.0));
}

TEST_CASE("nash: matching pennies has the single mixed equilibrium") {
  Game g = oracle::make_game("mpw", {{3, -1}, {-1, 1}}, {{-3, 1}, {1, -1}});
  EquilibriumSet e = enumerate_nash(g);
  REQUIRE(e.equilibria.size() == 1);
  CHECK(e.structure == EquilibriumStructure::SingleMixed);
  CHECK_FALSE(e.degenerate);
  // row mixes to make the column indifferent: -3p + (1-p) = p - (1-p)
  CHECK(e.equilibria[0].strategies[0][0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(e.equilibria[0].strategies[1][0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(profile_regret(g, e.equilibria[0]) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("nash: coordination game lists pure and mixed extreme points") {
  EquilibriumSet e = enumerate_nash(battle());
  CHECK(e.equilibria.size() == 3);
  CHECK(e.structure == EquilibriumStructure::Multiple);
  CHECK_FALSE(e.degenerate);
  int pure = 0, mixed = 0;
  for (const StrategyProfile& s : e.equilibria) {
    if (is_pure(s.strategies[0]) && is_pure(s.strategies[1])) ++pure;
    else ++mixed;
    CHECK(profile_regret(battle(), s) == doctest::Approx(0.0).epsilon(1e-8));
  }
  CHECK(pure == 2);
  CHECK(mixed == 1);
}

TEST_CASE("nash: duplicated row makes the game degenerate") {
  // rock-paper-scissors with a second copy of rock
  Game g = oracle::make_game("rpsw",
                             {{0, -1, 1}, {0, -1, 1}, {1, 0, -1}, {-1, 1, 0}},
                             {{0, 1, -1}, {0, 1, -1}, {-1, 0, 1}, {1, -1, 0}});
  EquilibriumSet e = enumerate_nash(g);
  CHECK(e.degenerate);
  CHECK_FALSE(e.equilibria.empty());
}

TEST_CASE("nash: every reported profile has near-zero regret") {
  std::vector<Game> pool = {
      prisoners(), matching_pennies(), battle(),
      oracle::make_sym("rps", {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}),
      oracle::make_sym("coord", {{10, 0, 0}, {0, 20, 0}, {0, 0, 30}})};
  for (const Game& g : pool) {
    EquilibriumSet e = enumerate_nash(g);
    for (const StrategyProfile& s : e.equilibria) {
      CHECK(is_distribution(s.strategies[0]));
      CHECK(is_distribution(s.strategies[1]));
      CHECK(profile_regret(g, s) <= 1e-7);
    }
  }
}

TEST_CASE("nash: enumeration refuses oversized games") {
  Game g;
  g.id = "big";
  for (int i = 0; i < 21; ++i) {
    g.actions[0].push_back("r" + std::to_string(i));
    g.actions[1].push_back("c" + std::to_string(i));
  }
  g.payoffs[0].assign(441, 0.0);
  g.payoffs[1].assign(441, 0.0);
  CHECK_THROWS_AS(enumerate_nash(g), std::invalid_argument);
}
