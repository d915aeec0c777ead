#pragma once

#include "bgt/game.hpp"

namespace bgt {

struct QrePathPoint {
  double lambda = 0.0;
  StrategyProfile profile;
  double residual = 0.0;
};

// Max-norm distance between s and the logit best response to s at lambda.
double qre_residual(const Game& g, const StrategyProfile& s, double lambda);

// Logit equilibrium on the principal branch, tracked by continuation in
// lambda from the uniform fixed point at 0. Corrector: damped fixed-point
// iteration (damping 0.5) switching to Newton on the logit map once the
// residual drops below 1e-3; step starts at 0.01 and adapts by halving on
// failure / doubling on success. Converged residual <= 1e-8.
// Throws std::runtime_error with the last residual if the step underflows.
StrategyProfile solve_qre(const Game& g, double lambda);

// Converged points at steps+1 evenly spaced lambda values from 0 to
// lambda_max (collapsed to a single uniform point when lambda_max == 0).
std::vector<QrePathPoint> qre_path(const Game& g, double lambda_max, int steps);

}  // namespace bgt
