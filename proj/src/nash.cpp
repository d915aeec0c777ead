#include "bgt/nash.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace bgt {
namespace {

constexpr double kFeasTol = 1e-9;

// All k-subsets of {0..n-1}, lexicographic.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

// Solve for `mover`'s opponent mix over opp_support making mover indifferent
// across own_support. Returns full-length distribution and the value, or
// nullopt if singular/infeasible. sets *singular on a rank-deficient system.
std::optional<std::pair<ActionDistribution, double>> indifference_mix(
    const Game& g, int mover, const std::vector<int>& own_support,
    const std::vector<int>& opp_support, bool* singular) {
  int k = (int)own_support.size();
  // unknowns: k weights + the common value v
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    int a = own_support[(std::size_t)r];
    for (int c = 0; c < k; ++c) {
      int j = opp_support[(std::size_t)c];
      A(r, c) = mover == 0 ? g.payoff(0, a, j) : g.payoff(1, j, a);
    }
    A(r, k) = -1.0;
  }
  for (int c = 0; c < k; ++c) A(k, c) = 1.0;
  b(k) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) {
    *singular = true;
    return std::nullopt;
  }
  Eigen::VectorXd x = lu.solve(b);
  ActionDistribution mix((std::size_t)g.num_actions(1 - mover), 0.0);
  for (int c = 0; c < k; ++c) {
    double w = x(c);
    if (w < -kFeasTol) return std::nullopt;
    mix[(std::size_t)opp_support[(std::size_t)c]] = std::max(w, 0.0);
  }
  double s = 0.0;
  for (double w : mix) s += w;
  for (double& w : mix) w /= s;
  return std::make_pair(mix, x(k));
}

bool same_profile(const StrategyProfile& a, const StrategyProfile& b) {
  for (int p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < a.strategies[(std::size_t)p].size(); ++i)
      if (std::abs(a.strategies[(std::size_t)p][i] - b.strategies[(std::size_t)p][i]) > 1e-7)
        return false;
  return true;
}

}  // namespace

bool is_pure(const ActionDistribution& d, double tol) {
  for (double x : d)
    if (x > tol && x < 1.0 - tol) return false;
  return true;
}

EquilibriumSet enumerate_nash(const Game& g) {
  g.validate();
  if (g.num_actions(0) * g.num_actions(1) > 400)
    throw std::invalid_argument("enumerate_nash: game larger than the 400-cell guard");

  EquilibriumSet out;
  int n0 = g.num_actions(0), n1 = g.num_actions(1);
  bool off_support_tie = false;

  for (int k = 1; k <= std::min(n0, n1); ++k) {
    for (const auto& s0 : subsets(n0, k)) {
      for (const auto& s1 : subsets(n1, k)) {
        bool singular = false;
        // row player's indifference pins the column mix and vice versa
        auto y = indifference_mix(g, 0, s0, s1, &singular);
        auto x = indifference_mix(g, 1, s1, s0, &singular);
        if (singular) ++out.singular_skips;
        if (!y || !x) continue;

        StrategyProfile prof{{x->first, y->first}};
        bool feasible = true, tie = false;
        for (int p = 0; p < 2 && feasible; ++p) {
          std::vector<double> u =
              expected_utilities(g, p, prof.strategies[(std::size_t)(1 - p)]);
          double v = p == 0 ? y->second : x->second;
          const auto& sup = p == 0 ? s0 : s1;
          for (int a = 0; a < (int)u.size(); ++a) {
            bool in_sup = std::find(sup.begin(), sup.end(), a) != sup.end();
            if (!in_sup) {
              if (u[(std::size_t)a] > v + kFeasTol) feasible = false;
              else if (u[(std::size_t)a] > v - kFeasTol) tie = true;
            }
          }
        }
        if (!feasible) continue;
        if (tie) off_support_tie = true;

        bool dup = false;
        for (const auto& q : out.equilibria)
          if (same_profile(q, prof)) { dup = true; break; }
        if (!dup) out.equilibria.push_back(std::move(prof));
      }
    }
  }

  if (out.equilibria.empty())
    throw std::runtime_error("enumerate_nash: no equilibrium found for game '" + g.id +
                             "' (degenerate beyond equal-support enumeration)");

  out.degenerate = off_support_tie || out.equilibria.size() % 2 == 0;
  if (out.equilibria.size() > 1)
    out.structure = EquilibriumStructure::Multiple;
  else
    out.structure = is_pure(out.equilibria[0].strategies[0]) &&
                            is_pure(out.equilibria[0].strategies[1])
                        ? EquilibriumStructure::SinglePure
                        : EquilibriumStructure::SingleMixed;
  return out;
}

}  // namespace bgt
