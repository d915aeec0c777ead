#include "bgt/game.hpp"

#include <cmath>
#include <stdexcept>

namespace bgt {

void Game::validate() const {
  if (actions[0].empty() || actions[1].empty())
    throw std::invalid_argument("game '" + id + "': each player needs at least one action");
  std::size_t cells = actions[0].size() * actions[1].size();
  for (int p = 0; p < 2; ++p) {
    if (payoffs[p].size() != cells)
      throw std::invalid_argument("game '" + id + "': payoff matrix shape mismatch");
    for (double v : payoffs[p])
      if (!std::isfinite(v))
        throw std::invalid_argument("game '" + id + "': non-finite payoff");
  }
  if (!(unit_factor > 0.0) || !std::isfinite(unit_factor))
    throw std::invalid_argument("game '" + id + "': unit_factor must be positive");
}

bool is_distribution(std::span<const double> p, double tol) {
  if (p.empty()) return false;
  double s = 0.0;
  for (double x : p) {
    if (!(x >= -tol) || !std::isfinite(x)) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

ActionDistribution uniform_distribution(int n) {
  return ActionDistribution((std::size_t)n, 1.0 / n);
}

StrategyProfile uniform_profile(const Game& g) {
  return {{uniform_distribution(g.num_actions(0)), uniform_distribution(g.num_actions(1))}};
}

static void check_opponent(const Game& g, int player, std::span<const double> opp) {
  if (player != 0 && player != 1) throw std::invalid_argument("player must be 0 or 1");
  if ((int)opp.size() != g.num_actions(1 - player))
    throw std::invalid_argument("opponent distribution has wrong length");
  if (!is_distribution(opp))
    throw std::invalid_argument("opponent strategy is not a distribution");
}

double expected_utility(const Game& g, int player, int action,
                        std::span<const double> opp) {
  check_opponent(g, player, opp);
  if (action < 0 || action >= g.num_actions(player))
    throw std::invalid_argument("action index out of range");
  double s = 0.0;
  for (std::size_t j = 0; j < opp.size(); ++j) {
    double u = player == 0 ? g.payoff(0, action, (int)j) : g.payoff(1, (int)j, action);
    s += opp[j] * u;
  }
  return s;
}

std::vector<double> expected_utilities(const Game& g, int player,
                                       std::span<const double> opp) {
  check_opponent(g, player, opp);
  std::vector<double> out((std::size_t)g.num_actions(player));
  for (int a = 0; a < g.num_actions(player); ++a) {
    double s = 0.0;
    for (std::size_t j = 0; j < opp.size(); ++j) {
      double u = player == 0 ? g.payoff(0, a, (int)j) : g.payoff(1, (int)j, a);
      s += opp[j] * u;
    }
    out[(std::size_t)a] = s;
  }
  return out;
}

std::vector<int> best_response_set(const Game& g, int player,
                                   std::span<const double> opp, double tie_tol) {
  std::vector<double> u = expected_utilities(g, player, opp);
  double best = *std::max_element(u.begin(), u.end());
  std::vector<int> out;
  for (int a = 0; a < (int)u.size(); ++a)
    if (u[(std::size_t)a] >= best - tie_tol) out.push_back(a);
  return out;
}

Game normalize_payoffs(const Game& g) {
  g.validate();
  Game out = g;
  for (int p = 0; p < 2; ++p)
    for (double& v : out.payoffs[p]) v *= g.unit_factor;
  out.unit_factor = 1.0;
  return out;
}

double profile_regret(const Game& g, const StrategyProfile& s) {
  double worst = 0.0;
  for (int p = 0; p < 2; ++p) {
    std::vector<double> u = expected_utilities(g, p, s.strategies[(std::size_t)(1 - p)]);
    double have = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a) have += s.strategies[(std::size_t)p][a] * u[a];
    double best = *std::max_element(u.begin(), u.end());
    worst = std::max(worst, best - have);
  }
  return worst;
}

}  // namespace bgt
