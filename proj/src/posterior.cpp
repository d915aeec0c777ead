#include "bgt/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include "bgt/mathutil.hpp"
#include "bgt/rng.hpp"

namespace bgt {
namespace {

constexpr double kProbFloor = 1e-300;
constexpr std::uint64_t kAisTag = 0xa15;
const double kInf = std::numeric_limits<double>::infinity();

// All Proportion entries in a schema form one simplex block with an implied
// remainder component (the mass of level 0).
std::vector<std::size_t> proportion_slots(const std::vector<ParamDef>& schema) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].kind == ParamKind::Proportion) idx.push_back(i);
  return idx;
}

// Aggregated action counts so one likelihood evaluation costs one predict()
// per (game, role) pair instead of one per observation row.
struct LikelihoodTable {
  const Dataset* data = nullptr;
  std::vector<std::array<std::vector<double>, 2>> counts;

  explicit LikelihoodTable(const Dataset& d) : data(&d) {
    counts.resize(d.games.size());
    for (std::size_t gi = 0; gi < d.games.size(); ++gi)
      for (int p = 0; p < 2; ++p)
        counts[gi][(std::size_t)p].assign((std::size_t)d.games[gi].num_actions(p), 0.0);
    for (const Observation& o : d.observations) {
      for (std::size_t gi = 0; gi < d.games.size(); ++gi)
        if (d.games[gi].id == o.game_id) {
          counts[gi][(std::size_t)(o.player_role - 1)][(std::size_t)o.action] += o.count;
          break;
        }
    }
  }

  double ll(const Model& model, std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t gi = 0; gi < counts.size(); ++gi) {
      for (int p = 0; p < 2; ++p) {
        const std::vector<double>& c = counts[gi][(std::size_t)p];
        if (std::accumulate(c.begin(), c.end(), 0.0) == 0.0) continue;
        ActionDistribution pred = model.predict(data->games[gi], p, theta);
        for (std::size_t a = 0; a < c.size(); ++a)
          if (c[a] > 0.0) total += c[a] * std::log(std::max(pred[a], kProbFloor));
      }
    }
    return total;
  }
};

Model bound_copy(const Model& model, const Dataset& data) {
  Model bound = model;
  std::vector<const Game*> gp;
  gp.reserve(data.games.size());
  for (const Game& g : data.games) gp.push_back(&g);
  bound.bind(gp);
  return bound;
}

double kish_ess(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double x : w) {
    s += x;
    s2 += x * x;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace

double log_prior(const std::vector<ParamDef>& schema, std::span<const double> theta,
                 const PriorSpec& prior) {
  std::vector<std::size_t> props = proportion_slots(schema);
  double total = 0.0;
  if (!props.empty()) {
    std::vector<double> x, alpha;
    double sum = 0.0;
    for (std::size_t i : props) {
      x.push_back(theta[i]);
      alpha.push_back(1.0);
      sum += theta[i];
    }
    if (sum > 1.0 + 1e-12) return -kInf;
    x.push_back(std::max(1.0 - sum, 0.0));
    alpha.push_back(1.0);
    total += log_dirichlet_pdf(x, alpha);
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double v = theta[i];
    switch (schema[i].kind) {
      case ParamKind::Proportion:
        break;
      case ParamKind::Precision:
        if (v < 0.0) return -kInf;
        total += std::log(2.0) + log_normal_pdf(v, 0.0, prior.precision_std);
        break;
      case ParamKind::PoissonMean:
        if (v < 0.0 || v > prior.poisson_mean_bound) return -kInf;
        total -= std::log(prior.poisson_mean_bound);
        break;
      case ParamKind::Rate:
        if (v < 0.0 || v > 1.0) return -kInf;
        break;
    }
  }
  return total;
}

std::vector<double> sample_prior(const std::vector<ParamDef>& schema,
                                 std::mt19937_64& rng, const PriorSpec& prior) {
  std::vector<double> theta(schema.size(), 0.0);
  std::vector<std::size_t> props = proportion_slots(schema);
  bool drew_simplex = false;
  std::normal_distribution<double> half(0.0, prior.precision_std);
  std::gamma_distribution<double> unit_gamma(1.0, 1.0);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    switch (schema[i].kind) {
      case ParamKind::Proportion: {
        if (drew_simplex) break;
        drew_simplex = true;
        std::vector<double> g(props.size() + 1);
        double sum = 0.0;
        for (double& x : g) {
          x = unit_gamma(rng);
          sum += x;
        }
        for (std::size_t k = 0; k < props.size(); ++k) theta[props[k]] = g[k] / sum;
        break;
      }
      case ParamKind::Precision:
        theta[i] = std::abs(half(rng));
        break;
      case ParamKind::PoissonMean:
        theta[i] = prior.poisson_mean_bound * uniform01(rng);
        break;
      case ParamKind::Rate:
        theta[i] = uniform01(rng);
        break;
    }
  }
  return theta;
}

std::vector<double> propose(const std::vector<ParamDef>& schema,
                            std::span<const double> cur, std::mt19937_64& rng,
                            const ProposalSpec& prop) {
  std::vector<double> next(cur.begin(), cur.end());
  std::vector<std::size_t> props = proportion_slots(schema);
  bool drew_simplex = false;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    switch (schema[i].kind) {
      case ParamKind::Proportion: {
        if (drew_simplex) break;
        drew_simplex = true;
        double sum = 0.0;
        for (std::size_t k : props) sum += cur[k];
        std::vector<double> conc;
        for (std::size_t k : props)
          conc.push_back(prop.dirichlet_scale * cur[k] + prop.concentration_floor);
        conc.push_back(prop.dirichlet_scale * std::max(1.0 - sum, 0.0) +
                       prop.concentration_floor);
        std::vector<double> g(conc.size());
        double gsum = 0.0;
        do {
          gsum = 0.0;
          for (std::size_t k = 0; k < conc.size(); ++k) {
            std::gamma_distribution<double> gd(conc[k], 1.0);
            g[k] = gd(rng);
            gsum += g[k];
          }
        } while (gsum <= 0.0);
        for (std::size_t k = 0; k < props.size(); ++k) next[props[k]] = g[k] / gsum;
        break;
      }
      case ParamKind::Precision:
      case ParamKind::PoissonMean: {
        std::normal_distribution<double> step(cur[i], prop.step_std);
        double x;
        do {
          x = step(rng);
        } while (x < 0.0);
        next[i] = x;
        break;
      }
      case ParamKind::Rate: {
        std::normal_distribution<double> step(cur[i], prop.step_std);
        double x;
        do {
          x = step(rng);
        } while (x < 0.0 || x > 1.0);
        next[i] = x;
        break;
      }
    }
  }
  return next;
}

double log_proposal_density(const std::vector<ParamDef>& schema,
                            std::span<const double> from, std::span<const double> to,
                            const ProposalSpec& prop) {
  std::vector<std::size_t> props = proportion_slots(schema);
  double total = 0.0;
  if (!props.empty()) {
    std::vector<double> x, alpha;
    double fsum = 0.0, tsum = 0.0;
    for (std::size_t k : props) {
      alpha.push_back(prop.dirichlet_scale * from[k] + prop.concentration_floor);
      x.push_back(to[k]);
      fsum += from[k];
      tsum += to[k];
    }
    alpha.push_back(prop.dirichlet_scale * std::max(1.0 - fsum, 0.0) +
                    prop.concentration_floor);
    x.push_back(std::max(1.0 - tsum, 0.0));
    total += log_dirichlet_pdf(x, alpha);
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    switch (schema[i].kind) {
      case ParamKind::Proportion:
        break;
      case ParamKind::Precision:
      case ParamKind::PoissonMean:
        total += log_trunc_normal_pdf(to[i], from[i], prop.step_std, 0.0, kInf);
        break;
      case ParamKind::Rate:
        total += log_trunc_normal_pdf(to[i], from[i], prop.step_std, 0.0, 1.0);
        break;
    }
  }
  return total;
}

AnnealingSchedule AnnealingSchedule::default_schedule() {
  AnnealingSchedule s;
  s.gammas.reserve(200);
  for (int j = 0; j < 40; ++j) s.gammas.push_back(0.01 * j / 39.0);
  for (int i = 1; i <= 160; ++i) s.gammas.push_back(0.01 * std::pow(100.0, i / 160.0));
  s.gammas.back() = 1.0;
  return s;
}

void AnnealingSchedule::validate() const {
  if (gammas.empty()) throw std::invalid_argument("annealing schedule is empty");
  if (gammas.front() < 0.0)
    throw std::invalid_argument("annealing schedule starts below zero");
  for (std::size_t j = 1; j < gammas.size(); ++j)
    if (gammas[j] < gammas[j - 1])
      throw std::invalid_argument("annealing schedule must be non-decreasing");
  if (gammas.back() != 1.0)
    throw std::invalid_argument("annealing schedule must end at exactly 1");
  if (metropolis_updates < 0)
    throw std::invalid_argument("metropolis_updates must be non-negative");
}

std::vector<double> PosteriorSampleSet::normalized_weights() const {
  std::vector<double> w(samples.size(), 0.0);
  if (samples.empty()) return w;
  double m = -kInf;
  for (const WeightedSample& s : samples)
    if (std::isfinite(s.log_weight)) m = std::max(m, s.log_weight);
  if (!std::isfinite(m))
    throw std::runtime_error("posterior sample set has no finite weights");
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double lw = samples[i].log_weight;
    w[i] = std::isfinite(lw) ? std::exp(lw - m) : 0.0;
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

PosteriorSampleSet ais_posterior(const Model& model, const Dataset& data,
                                 int n_samples, const AnnealingSchedule& schedule,
                                 std::uint64_t seed, const PriorSpec& prior,
                                 const ProposalSpec& prop, ExecPolicy policy) {
  if (n_samples < 1) throw std::invalid_argument("ais_posterior: n_samples must be >= 1");
  schedule.validate();
  data.validate();
  Model bound = bound_copy(model, data);
  LikelihoodTable table(data);
  const std::vector<ParamDef>& schema = bound.params();

  PosteriorSampleSet out;
  for (const ParamDef& p : schema) out.param_names.push_back(p.name);
  out.seed = seed;
  out.samples.resize((std::size_t)n_samples);
  std::vector<std::array<long long, 2>> tallies((std::size_t)n_samples, {0, 0});

  auto safe_ll = [&](std::span<const double> theta) -> double {
    try {
      return table.ll(bound, theta);
    } catch (const std::exception&) {
      return -kInf;
    }
  };

#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::Parallel)
  for (int c = 0; c < n_samples; ++c) {
    std::mt19937_64 rng = substream(seed, {kAisTag, (std::uint64_t)c});
    std::vector<double> cur = sample_prior(schema, rng, prior);
    double cur_ll = safe_ll(cur);
    double cur_lp = log_prior(schema, cur, prior);
    double logw = 0.0;
    long long accepts = 0, attempts = 0;

    for (std::size_t j = 1; j < schedule.gammas.size(); ++j) {
      double g = schedule.gammas[j];
      double dg = g - schedule.gammas[j - 1];
      if (dg > 0.0) logw += dg * cur_ll;
      for (int u = 0; u < schedule.metropolis_updates; ++u) {
        std::vector<double> cand = propose(schema, cur, rng, prop);
        double cand_ll = safe_ll(cand);
        double cand_lp = log_prior(schema, cand, prior);
        double la = g * (cand_ll - cur_ll) + (cand_lp - cur_lp) +
                    log_proposal_density(schema, cand, cur, prop) -
                    log_proposal_density(schema, cur, cand, prop);
        ++attempts;
        bool rescue = cur_ll == -kInf && cand_ll > -kInf && cand_lp > -kInf;
        if (rescue || std::log(uniform01(rng)) < la) {
          cur = std::move(cand);
          cur_ll = cand_ll;
          cur_lp = cand_lp;
          ++accepts;
        }
      }
    }
    out.samples[(std::size_t)c] = {std::move(cur), logw};
    tallies[(std::size_t)c] = {accepts, attempts};
  }

  long long accepts = 0, attempts = 0;
  for (const auto& t : tallies) {
    accepts += t[0];
    attempts += t[1];
  }
  out.acceptance_rate = attempts > 0 ? (double)accepts / (double)attempts : 0.0;
  out.ess = kish_ess(out.normalized_weights());  // throws if every weight vanished
  return out;
}

std::vector<std::pair<double, double>> grid_posterior_1d(const Model& model,
                                                         const Dataset& data, double lo,
                                                         double hi, double step,
                                                         ExecPolicy policy) {
  if (model.num_params() != 1)
    throw std::invalid_argument("grid_posterior_1d needs a one-parameter model");
  if (!(step > 0.0) || hi < lo)
    throw std::invalid_argument("grid_posterior_1d: bad grid bounds");
  data.validate();
  Model bound = bound_copy(model, data);
  LikelihoodTable table(data);

  int n = (int)std::floor((hi - lo) / step + 1e-9) + 1;
  std::vector<double> vals((std::size_t)n), ll((std::size_t)n);
  for (int i = 0; i < n; ++i) vals[(std::size_t)i] = lo + i * step;

  std::string error;
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::Parallel)
  for (int i = 0; i < n; ++i) {
    double theta[1] = {vals[(std::size_t)i]};
    try {
      ll[(std::size_t)i] = table.ll(bound, std::span<const double>(theta, 1));
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
      ll[(std::size_t)i] = -kInf;
    }
  }
  if (!error.empty())
    throw std::runtime_error("grid_posterior_1d: evaluation failed: " + error);

  double m = *std::max_element(ll.begin(), ll.end());
  if (!std::isfinite(m))
    throw std::runtime_error("grid_posterior_1d: likelihood vanished on entire grid");
  double total = 0.0;
  std::vector<std::pair<double, double>> out((std::size_t)n);
  for (int i = 0; i < n; ++i) {
    double p = std::exp(ll[(std::size_t)i] - m);
    out[(std::size_t)i] = {vals[(std::size_t)i], p};
    total += p;
  }
  for (auto& [v, p] : out) p /= total;
  return out;
}

PosteriorSampleSet sample_set_from_grid(
    const std::vector<std::pair<double, double>>& grid, const std::string& param_name) {
  PosteriorSampleSet out;
  out.param_names = {param_name};
  out.samples.reserve(grid.size());
  for (const auto& [v, p] : grid)
    out.samples.push_back({{v}, p > 0.0 ? std::log(p) : -kInf});
  out.acceptance_rate = 1.0;
  out.ess = kish_ess(out.normalized_weights());
  return out;
}

std::vector<CdfPoint> marginal_cdf(const PosteriorSampleSet& samples,
                                   const std::string& parameter) {
  std::size_t idx = samples.param_names.size();
  for (std::size_t i = 0; i < samples.param_names.size(); ++i)
    if (samples.param_names[i] == parameter) idx = i;
  if (idx == samples.param_names.size())
    throw std::out_of_range("no parameter named " + parameter);

  std::vector<double> w = samples.normalized_weights();
  std::vector<std::pair<double, double>> vw;
  for (std::size_t i = 0; i < samples.samples.size(); ++i)
    if (w[i] > 0.0) vw.push_back({samples.samples[i].theta[idx], w[i]});
  if (vw.empty()) throw std::runtime_error("marginal_cdf: no mass");
  std::sort(vw.begin(), vw.end());

  std::vector<CdfPoint> cdf;
  double cum = 0.0;
  for (const auto& [v, wt] : vw) {
    cum += wt;
    if (!cdf.empty() && cdf.back().value == v)
      cdf.back().cum = cum;
    else
      cdf.push_back({v, cum});
  }
  cdf.back().cum = 1.0;
  return cdf;
}

std::pair<double, double> credible_interval(const PosteriorSampleSet& samples,
                                            const std::string& parameter, double mass) {
  if (!(mass > 0.0) || mass > 1.0)
    throw std::invalid_argument("credible_interval: mass must be in (0, 1]");
  std::vector<CdfPoint> cdf = marginal_cdf(samples, parameter);
  double lo_t = (1.0 - mass) / 2.0, hi_t = 1.0 - lo_t;
  double lo = cdf.back().value, hi = cdf.back().value;
  for (const CdfPoint& p : cdf)
    if (p.cum >= lo_t - 1e-12) {
      lo = p.value;
      break;
    }
  for (const CdfPoint& p : cdf)
    if (p.cum >= hi_t - 1e-12) {
      hi = p.value;
      break;
    }
  return {lo, hi};
}

double cdf_sup_distance(const PosteriorSampleSet& a, const PosteriorSampleSet& b,
                        const std::string& parameter) {
  std::vector<CdfPoint> fa = marginal_cdf(a, parameter);
  std::vector<CdfPoint> fb = marginal_cdf(b, parameter);
  double sup = 0.0, ca = 0.0, cb = 0.0;
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < fb.size()) {
    double x;
    if (j >= fb.size() || (i < fa.size() && fa[i].value <= fb[j].value))
      x = fa[i].value;
    else
      x = fb[j].value;
    while (i < fa.size() && fa[i].value <= x) ca = fa[i++].cum;
    while (j < fb.size() && fb[j].value <= x) cb = fb[j++].cum;
    sup = std::max(sup, std::abs(ca - cb));
  }
  return sup;
}

}  // namespace bgt
