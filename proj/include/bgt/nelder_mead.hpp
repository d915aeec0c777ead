#pragma once

#include <functional>
#include <vector>

namespace bgt {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;  // simplex diameter fell below diam_tol
};

struct NelderMeadOptions {
  double diam_tol = 1e-8;
  int max_evals = 10000;
  double init_step = 0.5;
};

// Downhill simplex minimization; tracks the best point ever evaluated.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt = {});

}  // namespace bgt
