#include "bgt/qre.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "bgt/mathutil.hpp"

namespace bgt {
namespace {

constexpr double kTol = 1e-8;
constexpr double kNewtonSwitch = 1e-3;

StrategyProfile qbr_profile(const Game& g, const StrategyProfile& s, double lambda) {
  StrategyProfile out;
  for (int p = 0; p < 2; ++p) {
    std::vector<double> u = expected_utilities(g, p, s.strategies[(std::size_t)(1 - p)]);
    out.strategies[(std::size_t)p] = scaled_softmax(u, lambda);
  }
  return out;
}

double dist(const StrategyProfile& a, const StrategyProfile& b) {
  double d = 0.0;
  for (int p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < a.strategies[(std::size_t)p].size(); ++i)
      d = std::max(d, std::abs(a.strategies[(std::size_t)p][i] - b.strategies[(std::size_t)p][i]));
  return d;
}

void clamp_renorm(ActionDistribution& d) {
  double s = 0.0;
  for (double& x : d) {
    if (!(x > 0.0)) x = 0.0;
    s += x;
  }
  if (s <= 0.0) {
    for (double& x : d) x = 1.0 / d.size();
    return;
  }
  for (double& x : d) x /= s;
}

// One Newton step on F(s) = s - QBR(s); returns false on a bad solve.
bool newton_step(const Game& g, StrategyProfile& s, double lambda) {
  int n0 = g.num_actions(0), n1 = g.num_actions(1);
  int n = n0 + n1;
  StrategyProfile q = qbr_profile(g, s, lambda);

  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  // d QBR0_a / d y_j = lambda q_a (U0[a][j] - sum_b q_b U0[b][j])
  for (int a = 0; a < n0; ++a) {
    for (int j = 0; j < n1; ++j) {
      double avg = 0.0;
      for (int b = 0; b < n0; ++b) avg += q.strategies[0][(std::size_t)b] * g.payoff(0, b, j);
      J(a, n0 + j) -= lambda * q.strategies[0][(std::size_t)a] * (g.payoff(0, a, j) - avg);
    }
  }
  for (int b = 0; b < n1; ++b) {
    for (int i = 0; i < n0; ++i) {
      double avg = 0.0;
      for (int c = 0; c < n1; ++c) avg += q.strategies[1][(std::size_t)c] * g.payoff(1, i, c);
      J(n0 + b, i) -= lambda * q.strategies[1][(std::size_t)b] * (g.payoff(1, i, b) - avg);
    }
  }

  Eigen::VectorXd f(n);
  for (int i = 0; i < n0; ++i) f(i) = s.strategies[0][(std::size_t)i] - q.strategies[0][(std::size_t)i];
  for (int j = 0; j < n1; ++j) f(n0 + j) = s.strategies[1][(std::size_t)j] - q.strategies[1][(std::size_t)j];

  Eigen::VectorXd delta = J.partialPivLu().solve(-f);
  if (!delta.allFinite() || delta.lpNorm<Eigen::Infinity>() > 1.0) return false;

  for (int i = 0; i < n0; ++i) s.strategies[0][(std::size_t)i] += delta(i);
  for (int j = 0; j < n1; ++j) s.strategies[1][(std::size_t)j] += delta(n0 + j);
  clamp_renorm(s.strategies[0]);
  clamp_renorm(s.strategies[1]);
  return true;
}

bool correct(const Game& g, StrategyProfile& s, double lambda) {
  double r = qre_residual(g, s, lambda);
  for (int it = 0; it < 500 && r >= kNewtonSwitch; ++it) {
    StrategyProfile q = qbr_profile(g, s, lambda);
    for (int p = 0; p < 2; ++p)
      for (std::size_t i = 0; i < s.strategies[(std::size_t)p].size(); ++i)
        s.strategies[(std::size_t)p][i] =
            0.5 * s.strategies[(std::size_t)p][i] + 0.5 * q.strategies[(std::size_t)p][i];
    double r2 = qre_residual(g, s, lambda);
    if (r2 > 10.0 * r + 1.0) return false;
    r = r2;
  }
  if (r >= kNewtonSwitch) return false;
  for (int it = 0; it < 50; ++it) {
    if (r <= kTol) return true;
    if (!newton_step(g, s, lambda)) {
      // fall back to one damped fixed-point step and keep trying
      StrategyProfile q = qbr_profile(g, s, lambda);
      for (int p = 0; p < 2; ++p)
        for (std::size_t i = 0; i < s.strategies[(std::size_t)p].size(); ++i)
          s.strategies[(std::size_t)p][i] =
              0.5 * s.strategies[(std::size_t)p][i] + 0.5 * q.strategies[(std::size_t)p][i];
    }
    r = qre_residual(g, s, lambda);
  }
  return r <= kTol;
}

StrategyProfile continue_to(const Game& g, double lambda, StrategyProfile s,
                            double from) {
  double cur = from;
  double step = 0.01;
  while (cur < lambda) {
    double trial = std::min(lambda, cur + step);
    StrategyProfile cand = s;
    if (correct(g, cand, trial)) {
      s = std::move(cand);
      cur = trial;
      step *= 2.0;
    } else {
      step *= 0.5;
      if (step < 1e-12 * std::max(1.0, lambda))
        throw std::runtime_error(
            "solve_qre: continuation stalled at lambda=" + std::to_string(cur) +
            " (last residual " + std::to_string(qre_residual(g, cand, trial)) + ")");
    }
  }
  return s;
}

}  // namespace

double qre_residual(const Game& g, const StrategyProfile& s, double lambda) {
  return dist(s, qbr_profile(g, s, lambda));
}

StrategyProfile solve_qre(const Game& g, double lambda) {
  g.validate();
  if (lambda < 0.0 || !std::isfinite(lambda))
    throw std::invalid_argument("solve_qre: lambda must be finite and >= 0");
  StrategyProfile s = uniform_profile(g);
  if (lambda == 0.0) return s;
  s = continue_to(g, lambda, std::move(s), 0.0);
  // polish toward machine precision, keeping only steps that shrink the
  // residual; the continuation already met the documented tolerance
  double r = qre_residual(g, s, lambda);
  for (int it = 0; it < 40 && r > 1e-14; ++it) {
    StrategyProfile cand = s;
    if (!newton_step(g, cand, lambda)) break;
    double r2 = qre_residual(g, cand, lambda);
    if (r2 >= r) break;
    s = std::move(cand);
    r = r2;
  }
  return s;
}

std::vector<QrePathPoint> qre_path(const Game& g, double lambda_max, int steps) {
  g.validate();
  if (steps < 1) throw std::invalid_argument("qre_path: steps must be >= 1");
  if (lambda_max < 0.0) throw std::invalid_argument("qre_path: lambda_max must be >= 0");

  std::vector<QrePathPoint> out;
  StrategyProfile s = uniform_profile(g);
  out.push_back({0.0, s, qre_residual(g, s, 0.0)});
  if (lambda_max == 0.0) return out;
  for (int k = 1; k <= steps; ++k) {
    double target = lambda_max * k / steps;
    s = continue_to(g, target, std::move(s), out.back().lambda);
    out.push_back({target, s, qre_residual(g, s, target)});
  }
  return out;
}

}  // namespace bgt
