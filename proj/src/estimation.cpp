#include "bgt/estimation.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "bgt/nelder_mead.hpp"
#include "bgt/posterior.hpp"
#include "bgt/rng.hpp"

namespace bgt {
namespace {

constexpr double kProbFloor = 1e-300;
constexpr std::uint64_t kFitTag = 0xf17, kShuffleTag = 0x5f1e, kCvFitTag = 0xcf17,
                        kNeeTag = 0x4ee;

struct Unit {
  int game_idx;
  int role;  // 0 = row, 1 = column
  int action;
};

// Per (game, role) action counts; the unit of likelihood evaluation.
struct CountTable {
  const Dataset* data = nullptr;
  std::vector<std::array<std::vector<double>, 2>> counts;

  explicit CountTable(const Dataset& d) : data(&d) {
    counts.resize(d.games.size());
    for (std::size_t gi = 0; gi < d.games.size(); ++gi)
      for (int p = 0; p < 2; ++p)
        counts[gi][(std::size_t)p].assign((std::size_t)d.games[gi].num_actions(p), 0.0);
  }

  void add(const Unit& u, double c) {
    counts[(std::size_t)u.game_idx][(std::size_t)u.role][(std::size_t)u.action] += c;
  }

  double ll(const Model& model, std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t gi = 0; gi < counts.size(); ++gi) {
      for (int p = 0; p < 2; ++p) {
        const std::vector<double>& c = counts[gi][(std::size_t)p];
        double csum = std::accumulate(c.begin(), c.end(), 0.0);
        if (csum == 0.0) continue;
        ActionDistribution pred = model.predict(data->games[gi], p, theta);
        for (std::size_t a = 0; a < c.size(); ++a)
          if (c[a] > 0.0) total += c[a] * std::log(std::max(pred[a], kProbFloor));
      }
    }
    return total;
  }
};

std::vector<Unit> expand_units(const Dataset& d) {
  std::vector<Unit> units;
  for (const Observation& o : d.observations) {
    int gi = -1;
    for (std::size_t i = 0; i < d.games.size(); ++i)
      if (d.games[i].id == o.game_id) { gi = (int)i; break; }
    for (int k = 0; k < o.count; ++k) units.push_back({gi, o.player_role - 1, o.action});
  }
  return units;
}

// Fold of each position in a permuted list of n items, sizes within 1.
std::vector<int> fold_slices(int n, int folds) {
  std::vector<int> f((std::size_t)n);
  for (int i = 0; i < folds; ++i) {
    long long lo = (long long)i * n / folds, hi = (long long)(i + 1) * n / folds;
    for (long long j = lo; j < hi; ++j) f[(std::size_t)j] = i;
  }
  return f;
}

// Per-unit fold ids for one round, honoring the fold unit.
std::vector<int> assign_folds(const Dataset& d, const std::vector<Unit>& units,
                              const CvPlan& plan, int round) {
  std::mt19937_64 rng = substream(plan.seed, {kShuffleTag, (std::uint64_t)round});
  if (plan.unit == FoldUnit::Observation) {
    std::vector<int> perm((std::size_t)units.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> slice = fold_slices((int)units.size(), plan.folds);
    std::vector<int> fold(units.size());
    for (std::size_t pos = 0; pos < perm.size(); ++pos) fold[(std::size_t)perm[pos]] = slice[pos];
    return fold;
  }
  std::vector<int> gperm((std::size_t)d.games.size());
  std::iota(gperm.begin(), gperm.end(), 0);
  std::shuffle(gperm.begin(), gperm.end(), rng);
  std::vector<int> slice = fold_slices((int)d.games.size(), plan.folds);
  std::vector<int> game_fold(d.games.size());
  for (std::size_t pos = 0; pos < gperm.size(); ++pos) game_fold[(std::size_t)gperm[pos]] = slice[pos];
  std::vector<int> fold(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) fold[i] = game_fold[(std::size_t)units[i].game_idx];
  return fold;
}

FitResult fit_impl(const Model& model, const CountTable& table, const FitOptions& opt,
                   ExecPolicy policy) {
  const std::vector<ParamDef>& schema = model.params();
  FitResult out;
  out.theta.names.reserve(schema.size());
  for (const ParamDef& p : schema) out.theta.names.push_back(p.name);

  if (schema.empty()) {
    out.train_ll = table.ll(model, {});
    out.converged = true;
    return out;
  }

  auto objective = [&](const std::vector<double>& z) {
    std::vector<double> theta = to_constrained(schema, z);
    double v;
    try {
      v = -table.ll(model, theta);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  int n_starts = opt.restarts + (int)opt.extra_starts.size();
  if (n_starts < 1) throw std::invalid_argument("fit_mle: needs at least one start");
  std::vector<NelderMeadResult> runs((std::size_t)n_starts);

  NelderMeadOptions nm;
  nm.diam_tol = opt.diam_tol;
  nm.max_evals = opt.max_evals;

  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::Parallel)
  for (int r = 0; r < n_starts; ++r) {
    try {
      std::vector<double> start;
      if (r < opt.restarts) {
        std::mt19937_64 rng = substream(opt.seed, {kFitTag, (std::uint64_t)r});
        start = to_unconstrained(schema, sample_prior(schema, rng));
      } else {
        start = to_unconstrained(schema, opt.extra_starts[(std::size_t)(r - opt.restarts)]);
      }
      runs[(std::size_t)r] = nelder_mead(objective, std::move(start), nm);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  int best = 0;
  for (int r = 1; r < n_starts; ++r)
    if (runs[(std::size_t)r].value < runs[(std::size_t)best].value) best = r;

  out.theta.values = to_constrained(schema, runs[(std::size_t)best].x);
  out.train_ll = -runs[(std::size_t)best].value;
  out.restarts_used = opt.restarts;
  out.converged = runs[(std::size_t)best].converged;
  return out;
}

CvScore finalize_score(std::vector<double> round_means, const CvPlan& plan,
                       const Dataset& data) {
  CvScore s;
  s.round_means = std::move(round_means);
  s.mean = std::accumulate(s.round_means.begin(), s.round_means.end(), 0.0) /
           s.round_means.size();
  s.ci_half_width = t_ci_half_width(s.round_means);
  s.rounds = plan.rounds;
  s.folds = plan.folds;
  s.unit = plan.unit;
  s.seed = plan.seed;
  s.ln_ratio_vs_uniform = s.mean * plan.folds - uniform_log_likelihood(data);
  s.log10_ratio_vs_uniform = s.ln_ratio_vs_uniform / std::log(10.0);
  return s;
}

void check_plan(const Dataset& data, const std::vector<Unit>& units, const CvPlan& plan) {
  if (plan.rounds < 1 || plan.folds < 2)
    throw std::invalid_argument("cross-validation needs rounds >= 1 and folds >= 2");
  if (plan.unit == FoldUnit::Observation && (int)units.size() < plan.folds)
    throw std::invalid_argument("dataset has fewer observations than folds");
  if (plan.unit == FoldUnit::Game && (int)data.games.size() < plan.folds)
    throw std::invalid_argument("dataset has fewer games than folds");
}

}  // namespace

double ParameterVector::get(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw std::out_of_range("no parameter named " + name);
}

double log_likelihood(const Model& model, std::span<const double> theta,
                      const Dataset& data) {
  data.validate();
  model.validate_theta(theta);
  Model bound = model;
  std::vector<const Game*> gp;
  for (const Game& g : data.games) gp.push_back(&g);
  bound.bind(gp);
  CountTable table(data);
  for (const Unit& u : expand_units(data)) table.add(u, 1.0);
  return table.ll(bound, theta);
}

double uniform_log_likelihood(const Dataset& data) {
  double total = 0.0;
  for (const Observation& o : data.observations) {
    const Game* g = data.find_game(o.game_id);
    total += o.count * std::log(1.0 / g->num_actions(o.player_role - 1));
  }
  return total;
}

FitResult fit_mle(const Model& model, const Dataset& data, const FitOptions& opt,
                  ExecPolicy policy) {
  data.validate();
  Model bound = model;
  std::vector<const Game*> gp;
  for (const Game& g : data.games) gp.push_back(&g);
  bound.bind(gp);
  CountTable table(data);
  for (const Unit& u : expand_units(data)) table.add(u, 1.0);
  return fit_impl(bound, table, opt, policy);
}

CvScore cross_validate(const Model& model, const Dataset& data, const CvPlan& plan,
                       const FitOptions& fit, ExecPolicy policy) {
  data.validate();
  std::vector<Unit> units = expand_units(data);
  check_plan(data, units, plan);

  Model bound = model;
  std::vector<const Game*> gp;
  for (const Game& g : data.games) gp.push_back(&g);
  bound.bind(gp);

  int items = plan.rounds * plan.folds;
  std::vector<double> fold_ll((std::size_t)items, 0.0);

  // fold assignments are cheap; precompute per round to keep items independent
  std::vector<std::vector<int>> folds_by_round((std::size_t)plan.rounds);
  for (int r = 0; r < plan.rounds; ++r) folds_by_round[(std::size_t)r] = assign_folds(data, units, plan, r);

  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::Parallel)
  for (int item = 0; item < items; ++item) {
    try {
      int r = item / plan.folds, f = item % plan.folds;
      const std::vector<int>& fold = folds_by_round[(std::size_t)r];
      CountTable train(data), test(data);
      for (std::size_t i = 0; i < units.size(); ++i)
        (fold[i] == f ? test : train).add(units[i], 1.0);
      FitOptions o = fit;
      o.seed = derive_seed(plan.seed, {kCvFitTag, (std::uint64_t)r, (std::uint64_t)f});
      FitResult res = fit_impl(bound, train, o, ExecPolicy::Serial);
      fold_ll[(std::size_t)item] = test.ll(bound, res.theta.values);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  std::vector<double> round_means((std::size_t)plan.rounds, 0.0);
  for (int r = 0; r < plan.rounds; ++r) {
    double s = 0.0;
    for (int f = 0; f < plan.folds; ++f) s += fold_ll[(std::size_t)(r * plan.folds + f)];
    round_means[(std::size_t)r] = s / plan.folds;
  }
  return finalize_score(std::move(round_means), plan, data);
}

double likelihood_ratio_vs_uniform(const CvScore& score, const Dataset& data) {
  return (score.mean * score.folds - uniform_log_likelihood(data)) / std::log(10.0);
}

double t_ci_half_width(std::span<const double> xs, double level) {
  if (xs.size() < 2) return 0.0;
  double n = (double)xs.size();
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  if (sd == 0.0) return 0.0;
  boost::math::students_t dist(n - 1.0);
  double t = boost::math::quantile(dist, 1.0 - (1.0 - level) / 2.0);
  return t * sd / std::sqrt(n);
}

NeeBounds nee_bounds(const Dataset& data, const CvPlan& plan, const FitOptions& fit,
                     std::optional<double> fixed_eps, ExecPolicy policy) {
  data.validate();
  std::vector<Unit> units = expand_units(data);
  check_plan(data, units, plan);

  std::vector<EquilibriumSet> eqs;
  for (const Game& g : data.games) eqs.push_back(enumerate_nash(g));

  // per-game, per-equilibrium log-likelihood of a count table at eps
  auto game_eq_ll = [&](const CountTable& t, std::size_t gi, const StrategyProfile& e,
                        double eps) {
    double ll = 0.0;
    for (int p = 0; p < 2; ++p) {
      const std::vector<double>& c = t.counts[gi][(std::size_t)p];
      int n = data.games[gi].num_actions(p);
      for (std::size_t a = 0; a < c.size(); ++a)
        if (c[a] > 0.0)
          ll += c[a] * std::log(std::max(
                           (1.0 - eps) * e.strategies[(std::size_t)p][a] + eps / n, kProbFloor));
    }
    return ll;
  };
  auto average_objective = [&](const CountTable& t, double eps) {
    double total = 0.0;
    for (std::size_t gi = 0; gi < data.games.size(); ++gi) {
      double m = 0.0;
      for (const StrategyProfile& e : eqs[gi].equilibria) m += game_eq_ll(t, gi, e, eps);
      total += m / eqs[gi].equilibria.size();
    }
    return total;
  };

  int items = plan.rounds * plan.folds;
  std::vector<std::array<double, 3>> fold_scores((std::size_t)items);

  std::vector<std::vector<int>> folds_by_round((std::size_t)plan.rounds);
  for (int r = 0; r < plan.rounds; ++r) folds_by_round[(std::size_t)r] = assign_folds(data, units, plan, r);

  auto score_item = [&](int item) -> std::array<double, 3> {
    int r = item / plan.folds, f = item % plan.folds;
    const std::vector<int>& fold = folds_by_round[(std::size_t)r];
    CountTable train(data), test(data);
    for (std::size_t i = 0; i < units.size(); ++i)
      (fold[i] == f ? test : train).add(units[i], 1.0);

    double eps;
    if (fixed_eps) {
      eps = *fixed_eps;
    } else {
      auto neg = [&](const std::vector<double>& z) {
        double e = 1.0 / (1.0 + std::exp(-z[0]));
        return -average_objective(train, e);
      };
      NelderMeadOptions nm;
      nm.max_evals = std::max(200, fit.max_evals / 10);
      double best_v = std::numeric_limits<double>::infinity();
      double best_z = 0.0;
      int starts = std::max(1, std::min(fit.restarts, 5));
      for (int s = 0; s < starts; ++s) {
        std::mt19937_64 rng =
            substream(plan.seed, {kNeeTag, (std::uint64_t)r, (std::uint64_t)f, (std::uint64_t)s});
        double e0 = std::clamp(uniform01(rng), 1e-6, 1.0 - 1e-6);
        NelderMeadResult nr = nelder_mead(neg, {std::log(e0 / (1.0 - e0))}, nm);
        if (nr.value < best_v) {
          best_v = nr.value;
          best_z = nr.x[0];
        }
      }
      eps = 1.0 / (1.0 + std::exp(-best_z));
    }

    double best = 0.0, worst = 0.0, avg = 0.0;
    for (std::size_t gi = 0; gi < data.games.size(); ++gi) {
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      double sum = 0.0;
      bool any = false;
      for (int p = 0; p < 2 && !any; ++p)
        for (double c : test.counts[gi][(std::size_t)p])
          if (c > 0.0) any = true;
      if (!any) continue;
      for (const StrategyProfile& e : eqs[gi].equilibria) {
        double ll = game_eq_ll(test, gi, e, eps);
        hi = std::max(hi, ll);
        lo = std::min(lo, ll);
        sum += ll;
      }
      best += hi;
      worst += lo;
      avg += sum / eqs[gi].equilibria.size();
    }
    return {best, worst, avg};
  };

  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::Parallel)
  for (int item = 0; item < items; ++item) {
    try {
      fold_scores[(std::size_t)item] = score_item(item);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  NeeBounds out;
  for (int which = 0; which < 3; ++which) {
    std::vector<double> round_means((std::size_t)plan.rounds, 0.0);
    for (int r = 0; r < plan.rounds; ++r) {
      double s = 0.0;
      for (int f = 0; f < plan.folds; ++f)
        s += fold_scores[(std::size_t)(r * plan.folds + f)][(std::size_t)which];
      round_means[(std::size_t)r] = s / plan.folds;
    }
    CvScore sc = finalize_score(std::move(round_means), plan, data);
    (which == 0 ? out.best : which == 1 ? out.worst : out.average) = sc;
  }
  return out;
}

std::vector<double> to_unconstrained(const std::vector<ParamDef>& schema,
                                     std::span<const double> theta) {
  std::vector<double> z(theta.begin(), theta.end());
  double prop_sum = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].kind == ParamKind::Proportion) prop_sum += theta[i];
  double a0 = std::max(1.0 - prop_sum, 1e-12);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double v = theta[i];
    switch (schema[i].kind) {
      case ParamKind::Proportion:
        z[i] = std::log(std::max(v, 1e-12) / a0);
        break;
      case ParamKind::Precision:
      case ParamKind::PoissonMean:
        z[i] = v > 30.0 ? v : std::log(std::expm1(std::max(v, 1e-12)));
        break;
      case ParamKind::Rate: {
        double c = std::clamp(v, 1e-12, 1.0 - 1e-12);
        z[i] = std::log(c / (1.0 - c));
        break;
      }
    }
  }
  return z;
}

std::vector<double> to_constrained(const std::vector<ParamDef>& schema,
                                   std::span<const double> z) {
  std::vector<double> theta(z.begin(), z.end());
  double m = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].kind == ParamKind::Proportion) m = std::max(m, z[i]);
  double denom = std::exp(-m);
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].kind == ParamKind::Proportion) denom += std::exp(z[i] - m);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    switch (schema[i].kind) {
      case ParamKind::Proportion:
        theta[i] = std::exp(z[i] - m) / denom;
        break;
      case ParamKind::Precision:
      case ParamKind::PoissonMean:
        theta[i] = z[i] > 30.0 ? z[i] : std::log1p(std::exp(z[i]));
        break;
      case ParamKind::Rate:
        theta[i] = 1.0 / (1.0 + std::exp(-z[i]));
        break;
    }
  }
  return theta;
}

}  // namespace bgt
