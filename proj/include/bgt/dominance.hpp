#pragma once

#include "bgt/game.hpp"

namespace bgt {

// Result of iterated removal of pure-strategy-dominated actions. Each sweep
// removes every currently dominated action of both players at once; rounds
// counts sweeps that removed something (a game that starts 1x1 counts as 1).
struct DominanceClassification {
  bool solvable_strict = false;
  bool solvable_weak = false;
  std::optional<int> rounds_strict;  // set iff solvable
  std::optional<int> rounds_weak;
};

DominanceClassification classify_dominance(const Game& g);

}  // namespace bgt
