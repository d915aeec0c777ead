#pragma once

// Independent reference implementations for tests. Everything here is written
// as straight-line loops against the Game payoff table so that agreement with
// the library is a real check, not a tautology.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bgt/dataset.hpp"
#include "bgt/game.hpp"
#include "bgt/models.hpp"

namespace oracle {

inline bgt::Game make_game(const std::string& id,
                           const std::vector<std::vector<double>>& row_payoffs,
                           const std::vector<std::vector<double>>& col_payoffs) {
  bgt::Game g;
  g.id = id;
  std::size_t nr = row_payoffs.size(), nc = row_payoffs[0].size();
  for (std::size_t i = 0; i < nr; ++i) g.actions[0].push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < nc; ++j) g.actions[1].push_back("c" + std::to_string(j));
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      g.payoffs[0].push_back(row_payoffs[i][j]);
      g.payoffs[1].push_back(col_payoffs[i][j]);
    }
  g.validate();
  return g;
}

// Symmetric game from the row player's matrix.
inline bgt::Game make_sym(const std::string& id,
                          const std::vector<std::vector<double>>& m) {
  std::vector<std::vector<double>> t(m[0].size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
  return make_game(id, m, t);
}

inline double eu(const bgt::Game& g, int player, int action,
                 const std::vector<double>& opp) {
  double s = 0.0;
  for (int b = 0; b < g.num_actions(1 - player); ++b)
    s += opp[(std::size_t)b] *
         (player == 0 ? g.payoff(0, action, b) : g.payoff(1, b, action));
  return s;
}

inline std::vector<double> all_eu(const bgt::Game& g, int player,
                                  const std::vector<double>& opp) {
  std::vector<double> u((std::size_t)g.num_actions(player));
  for (int a = 0; a < g.num_actions(player); ++a) u[(std::size_t)a] = eu(g, player, a, opp);
  return u;
}

inline std::vector<int> best_set(const bgt::Game& g, int player,
                                 const std::vector<double>& opp, double tol = 1e-9) {
  std::vector<double> u = all_eu(g, player, opp);
  double m = *std::max_element(u.begin(), u.end());
  std::vector<int> out;
  for (int a = 0; a < (int)u.size(); ++a)
    if (u[(std::size_t)a] >= m - tol) out.push_back(a);
  return out;
}

inline std::vector<double> logit(const bgt::Game& g, int player,
                                 const std::vector<double>& opp, double lambda) {
  std::vector<double> u = all_eu(g, player, opp);
  double m = *std::max_element(u.begin(), u.end());
  std::vector<double> p(u.size());
  double z = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) z += (p[a] = std::exp(lambda * (u[a] - m)));
  for (double& x : p) x /= z;
  return p;
}

// Higher levels believe lower levels best respond without error, so beliefs
// run over noise-free iterative best-response sets; the error rate only
// perturbs a level's own play.
inline std::vector<double> lk(const bgt::Game& g, int player, double a1, double a2,
                              double e1, double e2) {
  auto uniform_over = [&](int p, const std::vector<int>& set) {
    std::vector<double> d((std::size_t)g.num_actions(p), 0.0);
    for (int a : set) d[(std::size_t)a] = 1.0 / set.size();
    return d;
  };
  std::array<std::vector<int>, 2> ibr1, ibr2;
  for (int p = 0; p < 2; ++p) {
    int no = g.num_actions(1 - p);
    ibr1[(std::size_t)p] = best_set(g, p, std::vector<double>((std::size_t)no, 1.0 / no));
  }
  for (int p = 0; p < 2; ++p)
    ibr2[(std::size_t)p] = best_set(g, p, uniform_over(1 - p, ibr1[(std::size_t)(1 - p)]));

  auto level = [&](const std::vector<int>& set, double eps) {
    int n = g.num_actions(player);
    if ((int)set.size() == n) return std::vector<double>((std::size_t)n, 1.0 / n);
    std::vector<double> d((std::size_t)n, eps / (n - (int)set.size()));
    for (int a : set) d[(std::size_t)a] = (1.0 - eps) / set.size();
    return d;
  };
  std::vector<double> l1 = level(ibr1[(std::size_t)player], e1);
  std::vector<double> l2 = level(ibr2[(std::size_t)player], e2);
  int n = g.num_actions(player);
  std::vector<double> p((std::size_t)n);
  for (int a = 0; a < n; ++a)
    p[(std::size_t)a] = (1.0 - a1 - a2) / n + a1 * l1[(std::size_t)a] +
                        a2 * l2[(std::size_t)a];
  return p;
}

// Poisson masses for levels 0..L with L the smallest level whose cumulative
// mass reaches 1 - 1e-6 (capped at 20), renormalized.
inline std::vector<double> poisson_levels(double tau) {
  std::vector<double> f;
  double cum = 0.0;
  for (int m = 0; m <= 20; ++m) {
    double lf = 0.0;
    for (int i = 2; i <= m; ++i) lf += std::log((double)i);
    double pm = tau <= 0.0 ? (m == 0 ? 1.0 : 0.0)
                           : std::exp(-tau + m * std::log(tau) - lf);
    f.push_back(pm);
    cum += pm;
    if (cum >= 1.0 - 1e-6) break;
  }
  for (double& x : f) x /= cum;
  return f;
}

inline std::vector<double> pch(const bgt::Game& g, int player, double tau) {
  std::vector<double> f = poisson_levels(tau);
  // f-weighted mixture of levels 0..m per seat; after the loop it is the
  // aggregate play distribution up to normalization.
  std::vector<std::vector<double>> below(2);
  for (int p = 0; p < 2; ++p)
    below[(std::size_t)p].assign((std::size_t)g.num_actions(p),
                                 f[0] / g.num_actions(p));
  for (std::size_t m = 1; m < f.size(); ++m) {
    std::vector<std::vector<double>> lv(2);
    for (int p = 0; p < 2; ++p) {
      std::vector<double> opp = below[(std::size_t)(1 - p)];
      double tot = std::accumulate(opp.begin(), opp.end(), 0.0);
      for (double& x : opp) x /= tot;
      std::vector<int> bs = best_set(g, p, opp);
      lv[(std::size_t)p].assign((std::size_t)g.num_actions(p), 0.0);
      for (int a : bs) lv[(std::size_t)p][(std::size_t)a] = 1.0 / bs.size();
    }
    for (int p = 0; p < 2; ++p)
      for (std::size_t a = 0; a < below[(std::size_t)p].size(); ++a)
        below[(std::size_t)p][a] += f[m] * lv[(std::size_t)p][a];
  }
  std::vector<double> out = below[(std::size_t)player];
  double tot = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= tot;
  return out;
}

inline std::vector<double> qlk(const bgt::Game& g, int player, double a1, double a2,
                               double l1, double l2, double l12) {
  int n = g.num_actions(player), no = g.num_actions(1 - player);
  std::vector<double> unif_own((std::size_t)n, 1.0 / n);
  std::vector<double> unif_opp((std::size_t)no, 1.0 / no);
  std::vector<double> lv1 = logit(g, player, unif_opp, l1);
  std::vector<double> lv1_imagined = logit(g, 1 - player, unif_own, l12);
  std::vector<double> lv2 = logit(g, player, lv1_imagined, l2);
  std::vector<double> p((std::size_t)n);
  for (int a = 0; a < n; ++a)
    p[(std::size_t)a] = (1.0 - a1 - a2) / n + a1 * lv1[(std::size_t)a] +
                        a2 * lv2[(std::size_t)a];
  return p;
}

// Quantal cognitive hierarchy over Poisson levels with a level-0 spike; every
// level >= 1 logit-responds at `lambda` to the renormalized mixture below it.
inline std::vector<double> spike_qch(const bgt::Game& g, int player, double tau,
                                     double eps, double lambda) {
  std::vector<double> f = poisson_levels(tau);
  for (double& x : f) x *= (1.0 - eps);
  f[0] += eps;
  std::vector<std::vector<double>> below(2), out(2);
  for (int p = 0; p < 2; ++p) {
    int np = g.num_actions(p);
    below[(std::size_t)p].assign((std::size_t)np, f[0] / np);
    out[(std::size_t)p].assign((std::size_t)np, f[0] / np);
  }
  for (std::size_t m = 1; m < f.size(); ++m) {
    std::vector<std::vector<double>> lv(2);
    for (int p = 0; p < 2; ++p) {
      std::vector<double> opp = below[(std::size_t)(1 - p)];
      double tot = std::accumulate(opp.begin(), opp.end(), 0.0);
      for (double& x : opp) x /= tot;
      lv[(std::size_t)p] = logit(g, p, opp, lambda);
    }
    for (int p = 0; p < 2; ++p)
      for (std::size_t a = 0; a < lv[(std::size_t)p].size(); ++a) {
        below[(std::size_t)p][a] += f[m] * lv[(std::size_t)p][a];
        out[(std::size_t)p][a] += f[m] * lv[(std::size_t)p][a];
      }
  }
  std::vector<double> r = out[(std::size_t)player];
  double tot = std::accumulate(r.begin(), r.end(), 0.0);
  for (double& x : r) x /= tot;
  return r;
}

// Level masses with the level-0 spike applied before truncation: the window
// ends at the first level whose spiked cumulative reaches 1 - 1e-6 (cap 20),
// then the retained masses are renormalized.
inline std::vector<double> spiked_levels(double tau, double eps) {
  std::vector<double> f;
  double pm = std::exp(-tau);
  double cum = 0.0;
  for (int m = 0; m <= 20; ++m) {
    if (m > 0) pm *= tau / m;
    double fm = (1.0 - eps) * pm + (m == 0 ? eps : 0.0);
    f.push_back(fm);
    cum += fm;
    if (cum >= 1.0 - 1e-6) break;
  }
  if (cum <= 0.0) {
    f.back() = 1.0;
    return f;
  }
  for (double& x : f) x /= cum;
  return f;
}

// Reference evaluator for the whole quantal level-hierarchy grid. Every level
// above 0 logit-responds to what it believes the opponent plays: the previous
// level alone (Lk beliefs) or the renormalized mass-weighted mixture of all
// lower levels (CH beliefs). When precision beliefs are general, the lambda a
// simulated level uses is looked up by its nesting path; when accurate, the
// true lambda of that level.
class VariantRef {
 public:
  VariantRef(const bgt::Game& g, const bgt::ModelSpec& spec,
             const std::vector<double>& theta)
      : g_(g), ch_(spec.beliefs == bgt::PopulationBeliefs::Ch),
        accurate_(spec.precision_beliefs == bgt::PrecisionBeliefs::Accurate) {
    std::vector<bgt::ParamDef> schema = bgt::param_schema(spec);
    for (std::size_t i = 0; i < schema.size(); ++i) params_[schema[i].name] = theta[i];
    if (spec.level_dist == bgt::LevelDistKind::Tabular) {
      double rest = 1.0;
      f_.push_back(0.0);
      for (int k = 1; k <= spec.max_level; ++k) {
        double a = std::max(0.0, theta[(std::size_t)k - 1]);
        f_.push_back(a);
        rest -= a;
      }
      f_[0] = std::max(0.0, rest);
    } else {
      double eps = spec.level_dist == bgt::LevelDistKind::SpikePoisson
                       ? params_.at("eps")
                       : 0.0;
      f_ = spiked_levels(params_.at("tau"), eps);
    }
  }

  std::vector<double> play(int player) {
    std::vector<double> out((std::size_t)g_.num_actions(player), 0.0);
    for (int k = 0; k < (int)f_.size(); ++k) {
      std::vector<double> pk = level_play(player, k, {});
      for (std::size_t a = 0; a < out.size(); ++a) out[a] += f_[(std::size_t)k] * pk[a];
    }
    return out;
  }

 private:
  double true_lambda(int k) const {
    auto it = params_.find("lambda");
    return it != params_.end() ? it->second
                               : params_.at("lambda" + std::to_string(k));
  }

  // viewers lists the chain of simulating levels, innermost first; empty for
  // a level playing for real.
  std::vector<double> level_play(int player, int k, std::vector<int> viewers) {
    int n = g_.num_actions(player);
    if (k == 0) return std::vector<double>((std::size_t)n, 1.0 / n);
    double lam;
    if (viewers.empty() || accurate_) {
      lam = true_lambda(k);
    } else {
      std::string key = "lambda" + std::to_string(k) + "(";
      for (std::size_t i = 0; i < viewers.size(); ++i) {
        if (i > 0) key += ",";
        key += std::to_string(viewers[(std::size_t)i]);
      }
      key += ")";
      lam = params_.at(key);
    }
    std::vector<int> inner{k};
    inner.insert(inner.end(), viewers.begin(), viewers.end());
    std::vector<double> opp;
    if (!ch_) {
      opp = level_play(1 - player, k - 1, inner);
    } else {
      double below = 0.0;
      for (int j = 0; j < k; ++j) below += f_[(std::size_t)j];
      opp.assign((std::size_t)g_.num_actions(1 - player), 0.0);
      for (int j = 0; j < k; ++j) {
        double w = below > 0.0 ? f_[(std::size_t)j] / below : 1.0 / k;
        std::vector<double> pj = level_play(1 - player, j, inner);
        for (std::size_t a = 0; a < opp.size(); ++a) opp[a] += w * pj[a];
      }
    }
    return logit(g_, player, opp, lam);
  }

  const bgt::Game& g_;
  bool ch_, accurate_;
  std::map<std::string, double> params_;
  std::vector<double> f_;
};

inline std::vector<double> variant_play(const bgt::Game& g,
                                        const bgt::ModelSpec& spec,
                                        const std::vector<double>& theta,
                                        int player) {
  return VariantRef(g, spec, theta).play(player);
}

// Principal-branch logit equilibrium by continuation in lambda with a damped
// fixed-point iteration at each step; intermediate steps only track the
// branch, the final step iterates down to machine precision.
inline std::array<std::vector<double>, 2> qre_fixed_point(const bgt::Game& g,
                                                          double lambda) {
  std::array<std::vector<double>, 2> s;
  for (int p = 0; p < 2; ++p)
    s[(std::size_t)p].assign((std::size_t)g.num_actions(p),
                             1.0 / g.num_actions(p));
  const int steps = 50;
  for (int i = 1; i <= steps; ++i) {
    double lam = lambda * i / steps;
    double tol = i == steps ? 5e-14 : 1e-8;
    double damp = 0.3;
    for (int attempt = 0; attempt < 6; ++attempt) {
      std::array<std::vector<double>, 2> x = s;
      bool done = false;
      for (long it = 0; it < 500000 && !done; ++it) {
        double diff = 0.0;
        std::array<std::vector<double>, 2> q;
        for (int p = 0; p < 2; ++p) q[(std::size_t)p] = logit(g, p, x[(std::size_t)(1 - p)], lam);
        for (int p = 0; p < 2; ++p)
          for (std::size_t a = 0; a < x[(std::size_t)p].size(); ++a) {
            diff = std::max(diff, std::abs(q[(std::size_t)p][a] - x[(std::size_t)p][a]));
            x[(std::size_t)p][a] =
                (1.0 - damp) * x[(std::size_t)p][a] + damp * q[(std::size_t)p][a];
          }
        done = diff < tol;
      }
      if (done) {
        s = x;
        break;
      }
      damp *= 0.5;
    }
  }
  return s;
}

// Equal-support enumeration of Nash equilibria with plain Gaussian
// elimination; supports whose indifference system is rank-deficient are
// skipped, profiles deduplicated at 1e-7.
namespace detail {

inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double>& b) {
  int n = (int)b.size();
  double scale = 0.0;
  for (auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[(std::size_t)r][(std::size_t)c]) > std::abs(a[(std::size_t)piv][(std::size_t)c])) piv = r;
    if (std::abs(a[(std::size_t)piv][(std::size_t)c]) <= 1e-10 * scale) return false;
    std::swap(a[(std::size_t)c], a[(std::size_t)piv]);
    std::swap(b[(std::size_t)c], b[(std::size_t)piv]);
    for (int r = c + 1; r < n; ++r) {
      double m = a[(std::size_t)r][(std::size_t)c] / a[(std::size_t)c][(std::size_t)c];
      for (int k = c; k < n; ++k) a[(std::size_t)r][(std::size_t)k] -= m * a[(std::size_t)c][(std::size_t)k];
      b[(std::size_t)r] -= m * b[(std::size_t)c];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[(std::size_t)r];
    for (int k = r + 1; k < n; ++k) s -= a[(std::size_t)r][(std::size_t)k] * b[(std::size_t)k];
    b[(std::size_t)r] = s / a[(std::size_t)r][(std::size_t)r];
  }
  return true;
}

inline void subsets_of(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int from) {
    if ((int)cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (int i = from; i <= n - (k - (int)cur.size()); ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace detail

// Each equilibrium as {row mix, column mix}.
inline std::vector<std::array<std::vector<double>, 2>> nash_equilibria(
    const bgt::Game& g) {
  int n0 = g.num_actions(0), n1 = g.num_actions(1);
  std::vector<std::array<std::vector<double>, 2>> found;

  // opponent mix over opp_sup making `mover` indifferent across own_sup
  auto indiff = [&](int mover, const std::vector<int>& own_sup,
                    const std::vector<int>& opp_sup)
      -> std::optional<std::vector<double>> {
    int k = (int)own_sup.size();
    std::vector<std::vector<double>> a((std::size_t)k + 1,
                                       std::vector<double>((std::size_t)k + 1, 0.0));
    std::vector<double> b((std::size_t)k + 1, 0.0);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c)
        a[(std::size_t)r][(std::size_t)c] =
            mover == 0 ? g.payoff(0, own_sup[(std::size_t)r], opp_sup[(std::size_t)c])
                       : g.payoff(1, opp_sup[(std::size_t)c], own_sup[(std::size_t)r]);
      a[(std::size_t)r][(std::size_t)k] = -1.0;
    }
    for (int c = 0; c < k; ++c) a[(std::size_t)k][(std::size_t)c] = 1.0;
    b[(std::size_t)k] = 1.0;
    if (!detail::solve_linear(a, b)) return std::nullopt;
    std::vector<double> full((std::size_t)g.num_actions(1 - mover), 0.0);
    double tot = 0.0;
    for (int c = 0; c < k; ++c) {
      if (b[(std::size_t)c] < -1e-9) return std::nullopt;
      double w = std::max(b[(std::size_t)c], 0.0);
      full[(std::size_t)opp_sup[(std::size_t)c]] = w;
      tot += w;
    }
    for (double& w : full) w /= tot;
    full.push_back(b[(std::size_t)k]);  // carry the indifference value
    return full;
  };

  for (int k = 1; k <= std::min(n0, n1); ++k) {
    std::vector<std::vector<int>> s0s, s1s;
    detail::subsets_of(n0, k, s0s);
    detail::subsets_of(n1, k, s1s);
    for (const auto& s0 : s0s)
      for (const auto& s1 : s1s) {
        auto y = indiff(0, s0, s1);
        auto x = indiff(1, s1, s0);
        if (!y || !x) continue;
        double v0 = y->back(), v1 = x->back();
        y->pop_back();
        x->pop_back();
        std::array<std::vector<double>, 2> prof{*x, *y};
        bool ok = true;
        for (int p = 0; p < 2 && ok; ++p) {
          std::vector<double> u = all_eu(g, p, prof[(std::size_t)(1 - p)]);
          double v = p == 0 ? v0 : v1;
          const auto& sup = p == 0 ? s0 : s1;
          for (int a = 0; a < (int)u.size(); ++a)
            if (std::find(sup.begin(), sup.end(), a) == sup.end() &&
                u[(std::size_t)a] > v + 1e-9)
              ok = false;
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& q : found) {
          double d = 0.0;
          for (int p = 0; p < 2; ++p)
            for (std::size_t i = 0; i < q[(std::size_t)p].size(); ++i)
              d = std::max(d, std::abs(q[(std::size_t)p][i] - prof[(std::size_t)p][i]));
          if (d <= 1e-7) {
            dup = true;
            break;
          }
        }
        if (!dup) found.push_back(std::move(prof));
      }
  }
  return found;
}

// Equilibrium-averaged play mixed with uniform noise.
inline std::vector<double> nee_play(const bgt::Game& g, int player, double eps) {
  auto eqs = nash_equilibria(g);
  int n = g.num_actions(player);
  std::vector<double> avg((std::size_t)n, 0.0);
  for (const auto& e : eqs)
    for (int a = 0; a < n; ++a) avg[(std::size_t)a] += e[(std::size_t)player][(std::size_t)a] / eqs.size();
  for (int a = 0; a < n; ++a)
    avg[(std::size_t)a] = (1.0 - eps) * avg[(std::size_t)a] + eps / n;
  return avg;
}

// Log-likelihood of a dataset under an arbitrary per-seat predictor.
inline double ll(const bgt::Dataset& data,
                 const std::function<std::vector<double>(const bgt::Game&, int)>& pred) {
  double s = 0.0;
  for (const bgt::Observation& o : data.observations) {
    const bgt::Game* g = data.find_game(o.game_id);
    std::vector<double> p = pred(*g, o.player_role - 1);
    s += o.count * std::log(std::max(p[(std::size_t)o.action], 1e-300));
  }
  return s;
}

inline double grid_argmax(const std::function<double(double)>& f, double lo,
                          double hi, double step) {
  double best_x = lo, best_v = f(lo);
  for (double x = lo + step; x <= hi + 1e-12; x += step) {
    double v = f(x);
    if (v > best_v) { best_v = v; best_x = x; }
  }
  return best_x;
}

}  // namespace oracle
