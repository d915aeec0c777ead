#include "bgt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace bgt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt) {
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::size_t n = x0.size();
  NelderMeadResult res;
  if (n == 0) {
    res.x = x0;
    res.value = f(x0);
    res.evals = 1;
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> v(n + 1, x0);
  std::vector<double> fv(n + 1);
  res.x = x0;
  res.value = std::numeric_limits<double>::infinity();

  auto eval = [&](const std::vector<double>& x) {
    double y = f(x);
    ++res.evals;
    if (y < res.value) {
      res.value = y;
      res.x = x;
    }
    return y;
  };

  for (std::size_t i = 1; i <= n; ++i) v[i][i - 1] += opt.init_step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(v[i]);

  while (res.evals < opt.max_evals) {
    std::vector<std::size_t> ord(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> sv(n + 1);
    std::vector<double> sf(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      sv[i] = v[ord[i]];
      sf[i] = fv[ord[i]];
    }
    v = std::move(sv);
    fv = std::move(sf);

    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d)
        diam = std::max(diam, std::abs(v[i][d] - v[0][d]));
    if (diam < opt.diam_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += v[i][d] / n;

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (centroid[d] - v[n][d]);
      return x;
    };

    std::vector<double> xr = blend(alpha);
    double fr = eval(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(gamma);
      double fe = eval(xe);
      if (fe < fr) {
        v[n] = xe;
        fv[n] = fe;
      } else {
        v[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      v[n] = xr;
      fv[n] = fr;
    } else {
      std::vector<double> xc = blend(fr < fv[n] ? rho : -rho);
      double fc = eval(xc);
      if (fc < std::min(fr, fv[n])) {
        v[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t d = 0; d < n; ++d) v[i][d] = v[0][d] + sigma * (v[i][d] - v[0][d]);
          fv[i] = eval(v[i]);
          if (res.evals >= opt.max_evals) break;
        }
      }
    }
  }
  return res;
}

}  // namespace bgt
