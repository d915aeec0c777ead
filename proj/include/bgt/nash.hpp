#pragma once

#include "bgt/game.hpp"

namespace bgt {

enum class EquilibriumStructure { SinglePure, SingleMixed, Multiple };

// Extreme Nash equilibria from support enumeration over equal-size support
// pairs (indifference system + feasibility checks per pair). Degenerate games
// report whatever extreme points were found with `degenerate` set: the flag
// trips on an off-support tie with the equilibrium value or on an even count
// of equilibria. Numerically singular support systems are skipped and counted.
struct EquilibriumSet {
  std::vector<StrategyProfile> equilibria;
  EquilibriumStructure structure = EquilibriumStructure::SinglePure;
  bool degenerate = false;
  int singular_skips = 0;
};

// Precondition: |A0| * |A1| <= 400. Throws std::invalid_argument otherwise.
EquilibriumSet enumerate_nash(const Game& g);

bool is_pure(const ActionDistribution& d, double tol = 1e-9);

}  // namespace bgt
