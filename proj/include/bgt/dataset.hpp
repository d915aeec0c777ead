#pragma once

#include <string>
#include <vector>

#include "bgt/game.hpp"

namespace bgt {

// One aggregated observation row: `count` plays of `action` in `game_id` by
// players in seat `player_role` (1 = row, 2 = column).
struct Observation {
  std::string game_id;
  int player_role = 1;
  int action = 0;
  int count = 1;
};

// Games (payoffs already normalized into cents) plus aggregated observations.
struct Dataset {
  std::string source;
  std::vector<Game> games;
  std::vector<Observation> observations;

  const Game* find_game(const std::string& id) const;
  long long total_count() const;

  // Re-aggregates duplicate (game, role, action) rows in place.
  void aggregate();

  // Checks observations reference known games/actions; throws on violation.
  void validate() const;
};

}  // namespace bgt
