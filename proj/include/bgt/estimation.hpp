#pragma once

#include <cstdint>
#include <optional>

#include "bgt/dataset.hpp"
#include "bgt/models.hpp"

namespace bgt {

enum class ExecPolicy { Serial, Parallel };

struct ParameterVector {
  std::vector<std::string> names;
  std::vector<double> values;

  double get(const std::string& name) const;
};

// Sum over observations of count * log predicted probability, probabilities
// floored at 1e-300.
double log_likelihood(const Model& model, std::span<const double> theta,
                      const Dataset& data);

double uniform_log_likelihood(const Dataset& data);

struct FitOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  int max_evals = 10000;
  double diam_tol = 1e-8;
  // Additional start points in constrained space (e.g. an embedded optimum of
  // a nested model); evaluated alongside the random restarts.
  std::vector<std::vector<double>> extra_starts;
};

struct FitResult {
  ParameterVector theta;
  double train_ll = 0.0;
  int restarts_used = 0;
  bool converged = false;
};

// Maximum likelihood via Nelder-Mead in an unconstrained reparameterization
// (softmax over the level simplex, softplus for precisions and Poisson means,
// logistic for rates), best over `restarts` prior-drawn starts. The returned
// training LL is never below any start's.
FitResult fit_mle(const Model& model, const Dataset& data, const FitOptions& opt,
                  ExecPolicy policy = ExecPolicy::Parallel);

enum class FoldUnit { Observation, Game };

struct CvPlan {
  int rounds = 10;
  int folds = 10;
  FoldUnit unit = FoldUnit::Observation;
  std::uint64_t seed = 0;
};

struct CvScore {
  std::vector<double> round_means;  // per round: mean over folds of held-out LL
  double mean = 0.0;
  double ci_half_width = 0.0;  // Student-t, dof = rounds - 1
  double log10_ratio_vs_uniform = 0.0;
  double ln_ratio_vs_uniform = 0.0;
  int rounds = 0, folds = 0;
  FoldUnit unit = FoldUnit::Observation;
  std::uint64_t seed = 0;
};

// Repeated k-fold cross-validation: per fold, fit on the rest and score the
// held-out part; per-round score is the mean over folds. Deterministic in
// (plan.seed, plan) regardless of policy.
CvScore cross_validate(const Model& model, const Dataset& data, const CvPlan& plan,
                       const FitOptions& fit = {}, ExecPolicy policy = ExecPolicy::Parallel);

// log10 of (cross-validated likelihood / uniform likelihood) on the dataset;
// consistent with score.mean * folds - uniform total.
double likelihood_ratio_vs_uniform(const CvScore& score, const Dataset& data);

// Two-sided Student-t half width at `level` for the mean of `xs`.
double t_ci_half_width(std::span<const double> xs, double level = 0.95);

struct NeeBounds {
  CvScore best, worst, average;
};

// Equilibrium-plus-noise bounds under the cross-validation plan. Epsilon is
// fit on each training set against the average-case objective (per game, the
// mean over equilibria of log-likelihood); per test fold the best/worst
// scores pick, per game, the equilibrium max/minimizing held-out LL, and the
// average score is the per-game mean. best >= average >= worst pointwise.
NeeBounds nee_bounds(const Dataset& data, const CvPlan& plan, const FitOptions& fit = {},
                     std::optional<double> fixed_eps = std::nullopt,
                     ExecPolicy policy = ExecPolicy::Parallel);

// Unconstrained reparameterization used by fit_mle.
std::vector<double> to_unconstrained(const std::vector<ParamDef>& schema,
                                     std::span<const double> theta);
std::vector<double> to_constrained(const std::vector<ParamDef>& schema,
                                   std::span<const double> z);

}  // namespace bgt
