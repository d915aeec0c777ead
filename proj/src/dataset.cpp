#include "bgt/dataset.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace bgt {

const Game* Dataset::find_game(const std::string& id) const {
  for (const Game& g : games)
    if (g.id == id) return &g;
  return nullptr;
}

long long Dataset::total_count() const {
  long long n = 0;
  for (const Observation& o : observations) n += o.count;
  return n;
}

void Dataset::aggregate() {
  std::map<std::tuple<std::string, int, int>, int> agg;
  for (const Observation& o : observations)
    agg[{o.game_id, o.player_role, o.action}] += o.count;
  observations.clear();
  for (const auto& [key, count] : agg)
    observations.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
}

void Dataset::validate() const {
  for (const Game& g : games) g.validate();
  for (const Observation& o : observations) {
    const Game* g = find_game(o.game_id);
    if (!g) throw std::invalid_argument("observation references unknown game '" + o.game_id + "'");
    if (o.player_role != 1 && o.player_role != 2)
      throw std::invalid_argument("player_role must be 1 or 2");
    if (o.action < 0 || o.action >= g->num_actions(o.player_role - 1))
      throw std::invalid_argument("action index out of range for game '" + o.game_id + "'");
    if (o.count < 1) throw std::invalid_argument("observation count must be >= 1");
  }
}

}  // namespace bgt
