#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace bgt {

inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// softmax(scale * u), computed in log space.
inline std::vector<double> scaled_softmax(std::span<const double> u, double scale) {
  std::vector<double> z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = scale * u[i];
  double lse = log_sum_exp(z);
  for (double& x : z) x = std::exp(x - lse);
  return z;
}

inline double poisson_pmf(int m, double tau) {
  if (tau <= 0.0) return m == 0 ? 1.0 : 0.0;
  return std::exp(-tau + m * std::log(tau) - std::lgamma(m + 1.0));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double log_normal_pdf(double x, double mu, double sigma) {
  double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
}

// log density of a Gaussian centered at mu, truncated to [lo, hi].
inline double log_trunc_normal_pdf(double x, double mu, double sigma, double lo,
                                   double hi) {
  if (x < lo || x > hi) return -std::numeric_limits<double>::infinity();
  double z = normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
  return log_normal_pdf(x, mu, sigma) - std::log(z);
}

inline double log_dirichlet_pdf(std::span<const double> x,
                                std::span<const double> alpha) {
  double s = 0.0, lb = 0.0, asum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) return -std::numeric_limits<double>::infinity();
    if (alpha[i] != 1.0) {
      if (x[i] <= 0.0) return -std::numeric_limits<double>::infinity();
      s += (alpha[i] - 1.0) * std::log(x[i]);
    }
    lb += std::lgamma(alpha[i]);
    asum += alpha[i];
  }
  return s + std::lgamma(asum) - lb;
}

}  // namespace bgt
