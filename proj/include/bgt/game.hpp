#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bgt {

// Probability distribution over one player's actions.
using ActionDistribution = std::vector<double>;

// One mixed strategy per player; index 0 is the row player.
struct StrategyProfile {
  std::array<ActionDistribution, 2> strategies;
};

// Two-player one-shot game in normal form. Payoff matrices are stored
// row-major with shape |A0| x |A1| for both players: payoff(p, i, j) is
// player p's payoff when the row player picks action i and the column
// player picks action j.
struct Game {
  std::string id;
  std::array<std::vector<std::string>, 2> actions;
  std::array<std::vector<double>, 2> payoffs;
  double unit_factor = 1.0;  // cents per raw payoff point

  int num_actions(int player) const { return (int)actions[player].size(); }

  double payoff(int player, int row_action, int col_action) const {
    return payoffs[player][(std::size_t)row_action * actions[1].size() + col_action];
  }

  // Basic shape/validity check; throws std::invalid_argument.
  void validate() const;
};

bool is_distribution(std::span<const double> p, double tol = 1e-9);

ActionDistribution uniform_distribution(int n);

StrategyProfile uniform_profile(const Game& g);

// Expected payoff of `action` for `player` against an opponent mixed strategy.
double expected_utility(const Game& g, int player, int action,
                        std::span<const double> opponent);

// Expected payoff of every action, in action order.
std::vector<double> expected_utilities(const Game& g, int player,
                                       std::span<const double> opponent);

// Indices of utility-maximizing actions, ascending; ties within `tie_tol`.
std::vector<int> best_response_set(const Game& g, int player,
                                   std::span<const double> opponent,
                                   double tie_tol = 1e-9);

// Returns a copy with payoffs scaled into expected cents and unit_factor 1.
Game normalize_payoffs(const Game& g);

// Largest one-step payoff improvement any player can gain by deviating.
double profile_regret(const Game& g, const StrategyProfile& s);

}  // namespace bgt
