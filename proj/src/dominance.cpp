#include "bgt/dominance.hpp"

namespace bgt {
namespace {

// a dominated by b against every surviving pure opponent action.
bool dominated_by(const Game& g, int player, int a, int b,
                  const std::vector<int>& opp_alive, bool strict) {
  bool some_strict = false;
  for (int j : opp_alive) {
    double ua = player == 0 ? g.payoff(0, a, j) : g.payoff(1, j, a);
    double ub = player == 0 ? g.payoff(0, b, j) : g.payoff(1, j, b);
    if (ub < ua) return false;
    if (strict && !(ub > ua)) return false;
    if (ub > ua) some_strict = true;
  }
  return strict || some_strict;
}

struct RemovalResult {
  bool solvable;
  int rounds;
};

RemovalResult iterate(const Game& g, bool strict) {
  std::array<std::vector<int>, 2> alive;
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < g.num_actions(p); ++a) alive[p].push_back(a);

  int rounds = 0;
  for (;;) {
    std::array<std::vector<int>, 2> keep;
    bool removed = false;
    for (int p = 0; p < 2; ++p) {
      for (int a : alive[p]) {
        bool dom = false;
        for (int b : alive[p]) {
          if (b == a) continue;
          if (dominated_by(g, p, a, b, alive[1 - p], strict)) {
            dom = true;
            break;
          }
        }
        if (dom)
          removed = true;
        else
          keep[p].push_back(a);
      }
    }
    if (!removed) break;
    ++rounds;
    alive = keep;
  }
  bool solved = alive[0].size() == 1 && alive[1].size() == 1;
  if (solved && rounds == 0) rounds = 1;  // already 1x1 at the start
  return {solved, rounds};
}

}  // namespace

DominanceClassification classify_dominance(const Game& g) {
  g.validate();
  DominanceClassification out;
  RemovalResult s = iterate(g, true);
  RemovalResult w = iterate(g, false);
  out.solvable_strict = s.solvable;
  out.solvable_weak = w.solvable;
  if (s.solvable) out.rounds_strict = s.rounds;
  if (w.solvable) out.rounds_weak = w.rounds;
  return out;
}

}  // namespace bgt
