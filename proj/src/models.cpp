#include "bgt/models.hpp"

#include <cmath>
#include <stdexcept>

#include "bgt/mathutil.hpp"
#include "bgt/qre.hpp"

namespace bgt {
namespace {

ActionDistribution qbr(const Game& g, int player, std::span<const double> opp,
                       double lambda) {
  std::vector<double> u = expected_utilities(g, player, opp);
  return scaled_softmax(u, lambda);
}

ActionDistribution uniform_over(int n, const std::vector<int>& members) {
  ActionDistribution d((std::size_t)n, 0.0);
  for (int a : members) d[(std::size_t)a] = 1.0 / members.size();
  return d;
}

// Mixes the first w.size() parts; callers may pass extra trailing parts
// that carry no weight.
ActionDistribution mix(const std::vector<ActionDistribution>& parts,
                       std::span<const double> w) {
  ActionDistribution out(parts[0].size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += w[k] * parts[k][a];
  return out;
}

// Evaluates one VariantGrid/SpikePoisson parameter vector on one game.
class VariantEval {
 public:
  VariantEval(const Game& g, const ModelSpec& spec, std::span<const double> theta)
      : g_(g), spec_(spec) {
    std::size_t idx = 0;
    if (spec.level_dist == LevelDistKind::Tabular) {
      double rest = 1.0;
      f_.push_back(0.0);
      for (int k = 1; k <= spec.max_level; ++k) {
        double a = std::max(0.0, theta[idx++]);
        f_.push_back(a);
        rest -= a;
      }
      f_[0] = std::max(0.0, rest);
    } else {
      double tau = theta[idx++];
      double eps = spec.level_dist == LevelDistKind::SpikePoisson ? theta[idx++] : 0.0;
      f_ = truncated_level_masses(tau, eps);
    }
    levels_ = (int)f_.size() - 1;
    if (spec.precisions == Precisions::Homogeneous) {
      lambda_.assign((std::size_t)levels_ + 1, theta[idx++]);
    } else {
      lambda_.push_back(0.0);
      for (int k = 1; k <= levels_; ++k) lambda_.push_back(theta[idx++]);
    }
    if (spec.precision_beliefs == PrecisionBeliefs::General) {
      const auto schema = param_schema(spec);
      for (; idx < schema.size(); ++idx) belief_[schema[idx].name] = theta[idx];
    }
    cum_.resize(f_.size());
    double c = 0.0;
    for (std::size_t k = 0; k < f_.size(); ++k) {
      cum_[k] = c;  // mass strictly below level k
      c += f_[k];
    }
  }

  ActionDistribution predict(int player) {
    if (spec_.precision_beliefs == PrecisionBeliefs::Accurate) fill_actual();
    std::vector<ActionDistribution> parts;
    for (int k = 0; k <= levels_; ++k) parts.push_back(real_level(player, k));
    return mix(parts, f_);
  }

 private:
  // Mixture an agent reasoning at level k ascribes to the opponent: levels
  // below k reweighted by f. A zero cumulative mass degenerates to equal
  // weights over the lower levels.
  ActionDistribution lower_mixture(int player, int k,
                                   const std::vector<ActionDistribution>& lower) {
    std::vector<double> w((std::size_t)k);
    if (cum_[(std::size_t)k] > 0.0) {
      for (int j = 0; j < k; ++j) w[(std::size_t)j] = f_[(std::size_t)j] / cum_[(std::size_t)k];
    } else {
      for (int j = 0; j < k; ++j) w[(std::size_t)j] = 1.0 / k;
    }
    (void)player;
    return mix(lower, w);
  }

  void fill_actual() {
    for (int p = 0; p < 2; ++p)
      actual_[p] = {uniform_distribution(g_.num_actions(p))};
    for (int k = 1; k <= levels_; ++k) {
      for (int p = 0; p < 2; ++p) {
        ActionDistribution opp =
            spec_.beliefs == PopulationBeliefs::Lk
                ? actual_[1 - p][(std::size_t)k - 1]
                : lower_mixture(1 - p, k, actual_[1 - p]);
        actual_[p].push_back(qbr(g_, p, opp, lambda_[(std::size_t)k]));
      }
    }
  }

  ActionDistribution real_level(int player, int k) {
    if (spec_.precision_beliefs == PrecisionBeliefs::Accurate)
      return actual_[player][(std::size_t)k];
    if (k == 0) return uniform_distribution(g_.num_actions(player));
    std::vector<int> chain{k};
    return qbr(g_, player, opponent_view(player, k, chain), lambda_[(std::size_t)k]);
  }

  // What the believer at the end of `chain`, reasoning at level k, expects
  // the opponent to play.
  ActionDistribution opponent_view(int player, int k, std::vector<int>& chain) {
    if (spec_.beliefs == PopulationBeliefs::Lk)
      return believed(1 - player, k - 1, chain);
    std::vector<ActionDistribution> lower;
    for (int j = 0; j < k; ++j) lower.push_back(believed(1 - player, j, chain));
    return lower_mixture(1 - player, k, lower);
  }

  ActionDistribution believed(int player, int j, std::vector<int>& chain) {
    if (j == 0) return uniform_distribution(g_.num_actions(player));
    std::string key = "lambda" + std::to_string(j) + "(";
    for (std::size_t i = chain.size(); i-- > 0;) {
      key += std::to_string(chain[i]);
      if (i > 0) key += ",";
    }
    key += ")";
    double lam = belief_.at(key);
    chain.push_back(j);
    ActionDistribution opp = opponent_view(player, j, chain);
    chain.pop_back();
    return qbr(g_, player, opp, lam);
  }

  const Game& g_;
  const ModelSpec& spec_;
  std::vector<double> f_, cum_, lambda_;
  std::map<std::string, double> belief_;
  std::array<std::vector<ActionDistribution>, 2> actual_;
  int levels_ = 0;
};

}  // namespace

std::vector<double> truncated_level_masses(double tau, double spike_eps) {
  std::vector<double> f;
  double cum = 0.0;
  for (int m = 0; m <= 20; ++m) {
    double base = poisson_pmf(m, tau);
    double fm = m == 0 ? spike_eps + (1.0 - spike_eps) * base : (1.0 - spike_eps) * base;
    f.push_back(fm);
    cum += fm;
    if (cum >= 1.0 - 1e-6) break;
  }
  if (cum <= 0.0) {
    // Every retained Poisson term underflowed (huge tau, no spike). The
    // window-conditional limit is a point mass at the top level.
    f.assign(f.size(), 0.0);
    f.back() = 1.0;
    return f;
  }
  for (double& x : f) x /= cum;
  return f;
}

ActionDistribution predict_lk(const Game& g, int player, double alpha1,
                              double alpha2, double eps1, double eps2) {
  g.validate();
  std::array<std::array<std::vector<int>, 2>, 3> ibr;
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < g.num_actions(p); ++a) ibr[0][(std::size_t)p].push_back(a);
  for (int k = 1; k <= 2; ++k)
    for (int p = 0; p < 2; ++p) {
      ActionDistribution opp = uniform_over(g.num_actions(1 - p), ibr[(std::size_t)k - 1][(std::size_t)(1 - p)]);
      ibr[(std::size_t)k][(std::size_t)p] = best_response_set(g, p, opp);
    }

  int n = g.num_actions(player);
  auto level_dist = [&](int k, double eps) {
    const std::vector<int>& s = ibr[(std::size_t)k][(std::size_t)player];
    if ((int)s.size() == n) return uniform_distribution(n);
    ActionDistribution d((std::size_t)n, eps / (n - (int)s.size()));
    for (int a : s) d[(std::size_t)a] = (1.0 - eps) / s.size();
    return d;
  };

  ActionDistribution u = uniform_distribution(n);
  ActionDistribution p1 = level_dist(1, eps1), p2 = level_dist(2, eps2);
  double a0 = 1.0 - alpha1 - alpha2;
  ActionDistribution out((std::size_t)n);
  for (int a = 0; a < n; ++a)
    out[(std::size_t)a] = a0 * u[(std::size_t)a] + alpha1 * p1[(std::size_t)a] + alpha2 * p2[(std::size_t)a];
  return out;
}

ActionDistribution predict_poisson_ch(const Game& g, int player, double tau) {
  g.validate();
  if (tau < 0.0) throw std::invalid_argument("predict_poisson_ch: tau must be >= 0");
  std::vector<double> f = truncated_level_masses(tau, 0.0);
  int levels = (int)f.size() - 1;

  std::array<std::vector<ActionDistribution>, 2> pi;
  for (int p = 0; p < 2; ++p) pi[p] = {uniform_distribution(g.num_actions(p))};
  double cum = f[0];
  for (int m = 1; m <= levels; ++m) {
    for (int p = 0; p < 2; ++p) {
      ActionDistribution t(pi[1 - p][0].size(), 0.0);
      for (int j = 0; j < m; ++j) {
        double w = cum > 0.0 ? f[(std::size_t)j] / cum : 1.0 / m;
        for (std::size_t a = 0; a < t.size(); ++a)
          t[a] += w * pi[1 - p][(std::size_t)j][a];
      }
      std::vector<int> br = best_response_set(g, p, t);
      pi[p].push_back(uniform_over(g.num_actions(p), br));
    }
    cum += f[(std::size_t)m];
  }

  ActionDistribution out((std::size_t)g.num_actions(player), 0.0);
  for (int m = 0; m <= levels; ++m)
    for (std::size_t a = 0; a < out.size(); ++a)
      out[a] += f[(std::size_t)m] * pi[player][(std::size_t)m][a];
  return out;
}

ActionDistribution predict_qlk(const Game& g, int player, double alpha1,
                               double alpha2, double lambda1, double lambda2,
                               double lambda12) {
  g.validate();
  int n = g.num_actions(player);
  ActionDistribution u = uniform_distribution(n);
  ActionDistribution p1 = qbr(g, player, uniform_distribution(g.num_actions(1 - player)), lambda1);
  ActionDistribution imagined =
      qbr(g, 1 - player, uniform_distribution(n), lambda12);
  ActionDistribution p2 = qbr(g, player, imagined, lambda2);
  double a0 = 1.0 - alpha1 - alpha2;
  ActionDistribution out((std::size_t)n);
  for (int a = 0; a < n; ++a)
    out[(std::size_t)a] = a0 * u[(std::size_t)a] + alpha1 * p1[(std::size_t)a] + alpha2 * p2[(std::size_t)a];
  return out;
}

ActionDistribution predict_spike_poisson_qch(const Game& g, int player,
                                             double tau, double eps,
                                             double lambda) {
  ModelSpec s = spec_from_name("ah-QCH-sp");
  double theta[3] = {tau, eps, lambda};
  return predict_variant(g, player, s, theta);
}

ActionDistribution predict_nee(const Game& g, int player, double eps,
                               std::optional<int> eq_index,
                               const EquilibriumSet& eqs) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("predict_nee: eps in [0,1]");
  int n = g.num_actions(player);
  ActionDistribution out((std::size_t)n, 0.0);
  if (eq_index) {
    if (*eq_index < 0 || *eq_index >= (int)eqs.equilibria.size())
      throw std::out_of_range("predict_nee: equilibrium index out of range");
    const ActionDistribution& e = eqs.equilibria[(std::size_t)*eq_index].strategies[(std::size_t)player];
    for (int a = 0; a < n; ++a) out[(std::size_t)a] = (1.0 - eps) * e[(std::size_t)a] + eps / n;
    return out;
  }
  for (const StrategyProfile& e : eqs.equilibria)
    for (int a = 0; a < n; ++a)
      out[(std::size_t)a] += e.strategies[(std::size_t)player][(std::size_t)a] / eqs.equilibria.size();
  for (int a = 0; a < n; ++a) out[(std::size_t)a] = (1.0 - eps) * out[(std::size_t)a] + eps / n;
  return out;
}

ActionDistribution predict_variant(const Game& g, int player,
                                   const ModelSpec& spec,
                                   std::span<const double> theta) {
  g.validate();
  spec.validate();
  if (theta.size() != param_schema(spec).size())
    throw std::invalid_argument("predict_variant: theta length mismatch");
  VariantEval eval(g, spec, theta);
  return eval.predict(player);
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)), params_(param_schema(spec_)) {}

void Model::validate_theta(std::span<const double> theta) const {
  if (theta.size() != params_.size())
    throw std::invalid_argument(name() + ": expected " + std::to_string(params_.size()) +
                                " parameters, got " + std::to_string(theta.size()));
  double prop_sum = 0.0;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    double v = theta[i];
    if (!std::isfinite(v)) throw std::invalid_argument(name() + ": non-finite " + params_[i].name);
    switch (params_[i].kind) {
      case ParamKind::Proportion:
        if (v < -1e-12) throw std::invalid_argument(name() + ": negative " + params_[i].name);
        prop_sum += v;
        break;
      case ParamKind::Precision:
      case ParamKind::PoissonMean:
        if (v < 0.0) throw std::invalid_argument(name() + ": negative " + params_[i].name);
        break;
      case ParamKind::Rate:
        if (v < 0.0 || v > 1.0)
          throw std::invalid_argument(name() + ": " + params_[i].name + " outside [0,1]");
        break;
    }
  }
  if (prop_sum > 1.0 + 1e-9)
    throw std::invalid_argument(name() + ": level proportions sum over 1");
}

void Model::bind(const std::vector<const Game*>& games) {
  if (spec_.family != Family::Nee) return;
  for (const Game* g : games)
    if (!eq_cache_.count(g->id)) eq_cache_.emplace(g->id, enumerate_nash(*g));
}

ActionDistribution Model::predict(const Game& g, int player,
                                  std::span<const double> theta) const {
  validate_theta(theta);
  switch (spec_.family) {
    case Family::Uniform:
      return uniform_distribution(g.num_actions(player));
    case Family::Qre:
      return solve_qre(g, theta[0]).strategies[(std::size_t)player];
    case Family::Lk:
      return predict_lk(g, player, theta[0], theta[1], theta[2], theta[3]);
    case Family::PoissonCh:
      return predict_poisson_ch(g, player, theta[0]);
    case Family::QLk:
      return predict_qlk(g, player, theta[0], theta[1], theta[2], theta[3], theta[4]);
    case Family::VariantGrid:
    case Family::SpikePoissonQch:
      return predict_variant(g, player, spec_, theta);
    case Family::Nee: {
      auto it = eq_cache_.find(g.id);
      if (it != eq_cache_.end()) return predict_nee(g, player, theta[0], std::nullopt, it->second);
      return predict_nee(g, player, theta[0], std::nullopt, enumerate_nash(g));
    }
  }
  throw std::logic_error("unknown family");
}

}  // namespace bgt
