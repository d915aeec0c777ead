#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "bgt/dataset.hpp"
#include "bgt/estimation.hpp"
#include "bgt/models.hpp"

namespace bgt {

// Priors by parameter kind: Dirichlet(1,...,1) over the level simplex
// (including the implied level-0 mass), half-Gaussian(0, precision_std^2)
// for precisions, flat [0, poisson_mean_bound] for Poisson means (the same
// bounded window the default 1-D grid covers), flat [0,1] for rates.
struct PriorSpec {
  double precision_std = 2.0;
  double poisson_mean_bound = 10.0;
};

double log_prior(const std::vector<ParamDef>& schema, std::span<const double> theta,
                 const PriorSpec& prior = {});
std::vector<double> sample_prior(const std::vector<ParamDef>& schema,
                                 std::mt19937_64& rng, const PriorSpec& prior = {});

// Proposal: Dirichlet(dirichlet_scale * current + concentration_floor) for the
// proportion block, Gaussian steps truncated to the domain elsewhere.
struct ProposalSpec {
  double dirichlet_scale = 20.0;
  double step_std = 0.2;
  double concentration_floor = 0.01;
};

std::vector<double> propose(const std::vector<ParamDef>& schema,
                            std::span<const double> cur, std::mt19937_64& rng,
                            const ProposalSpec& prop = {});
double log_proposal_density(const std::vector<ParamDef>& schema,
                            std::span<const double> from, std::span<const double> to,
                            const ProposalSpec& prop = {});

// Tempering ladder: non-decreasing, last value exactly 1. The default is 200
// values: 40 uniform on [0, 0.01] then 160 geometric up to 1, with 5
// Metropolis updates per distribution.
struct AnnealingSchedule {
  std::vector<double> gammas;
  int metropolis_updates = 5;

  static AnnealingSchedule default_schedule();
  void validate() const;
};

struct WeightedSample {
  std::vector<double> theta;
  double log_weight = 0.0;
};

struct PosteriorSampleSet {
  std::vector<std::string> param_names;
  std::vector<WeightedSample> samples;
  double acceptance_rate = 0.0;  // Metropolis diagnostic
  double ess = 0.0;              // Kish effective sample size
  std::uint64_t seed = 0;

  std::vector<double> normalized_weights() const;
};

// Annealed importance sampling from the prior into likelihood * prior.
// Weights are accumulated in log space; each chain runs on its own seed
// stream, so results are deterministic in (seed, schedule) for any policy.
PosteriorSampleSet ais_posterior(const Model& model, const Dataset& data,
                                 int n_samples, const AnnealingSchedule& schedule,
                                 std::uint64_t seed, const PriorSpec& prior = {},
                                 const ProposalSpec& prop = {},
                                 ExecPolicy policy = ExecPolicy::Parallel);

// Flat-prior posterior of a single-parameter model evaluated on an inclusive
// grid; returns (value, normalized probability) pairs.
std::vector<std::pair<double, double>> grid_posterior_1d(
    const Model& model, const Dataset& data, double lo, double hi, double step,
    ExecPolicy policy = ExecPolicy::Parallel);

PosteriorSampleSet sample_set_from_grid(
    const std::vector<std::pair<double, double>>& grid, const std::string& param_name);

struct CdfPoint {
  double value = 0.0;
  double cum = 0.0;
};

// Weighted empirical CDF of one parameter's marginal.
std::vector<CdfPoint> marginal_cdf(const PosteriorSampleSet& samples,
                                   const std::string& parameter);

// Central credible interval from weighted quantiles at (1 -/+ mass)/2.
std::pair<double, double> credible_interval(const PosteriorSampleSet& samples,
                                            const std::string& parameter, double mass);

// Sup distance between the weighted CDFs of two sample sets for a parameter.
double cdf_sup_distance(const PosteriorSampleSet& a, const PosteriorSampleSet& b,
                        const std::string& parameter);

}  // namespace bgt
