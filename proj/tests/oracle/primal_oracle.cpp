#include "primal_oracle.hpp"

#include <cmath>
#include <limits>

namespace bobw::oracle {

namespace {

struct Terms {
  double value;
  double first;
  double second;
};

Terms terms(const RegularizerSpec& spec, double gamma, double x) {
  const double c = spec.c_log;
  const double lx = std::log(x);
  Terms t{-c * lx, -c / x, c / (x * x)};
  switch (spec.kind) {
    case RegularizerKind::kLogBarrier:
      t.value += -gamma * lx;
      t.first += -gamma / x;
      t.second += gamma / (x * x);
      break;
    case RegularizerKind::kTsallis: {
      const double b = spec.beta;
      const double xb = std::exp(b * lx);
      t.value += -gamma * xb / (1.0 - b);
      t.first += -gamma * b * xb / (x * (1.0 - b));
      t.second += gamma * b * xb / (x * x);
      break;
    }
    case RegularizerKind::kShannon:
      t.value += gamma * (x * lx - x);
      t.first += gamma * lx;
      t.second += gamma / x;
      break;
  }
  return t;
}

}  // namespace

double objective(const RegularizerSpec& spec, const Vector& gamma, const Vector& losses,
                 const Vector& p) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) return std::numeric_limits<double>::infinity();
    total += losses[i] * p[i] + terms(spec, gamma[i], p[i]).value;
  }
  return total;
}

OracleResult projected_newton_argmin(const RegularizerSpec& spec, const Vector& gamma,
                                     const Vector& losses) {
  const Eigen::Index k = losses.size();
  Vector p = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Vector g(k), h(k), d(k);
  OracleResult result;
  for (int it = 0; it < 20000; ++it) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Terms t = terms(spec, gamma[i], p[i]);
      g[i] = losses[i] + t.first;
      h[i] = t.second;
    }
    const double mu = (g.array() / h.array()).sum() / h.cwiseInverse().sum();
    d = -(g.array() - mu) / h.array();
    d.array() -= d.mean();  // keep the iterate on the simplex despite rounding
    const double decrement = (h.array() * d.array().square()).sum();
    result.iterations = it;
    if (decrement <= 1e-28 || d.cwiseAbs().maxCoeff() <= 1e-17) break;

    double step = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (d[i] < 0.0) step = std::min(step, -0.99 * p[i] / d[i]);
    }
    const double base = objective(spec, gamma, losses, p);
    const double slope = g.dot(d);
    if (decrement > 1e-12) {
      while (step > 1e-300 &&
             objective(spec, gamma, losses, p + step * d) > base + 1e-4 * step * slope) {
        step *= 0.5;
      }
    }
    p += step * d;
  }
  result.probs = p;
  result.objective = objective(spec, gamma, losses, p);
  return result;
}

double grid_argmin_two_arms(const RegularizerSpec& spec, const Vector& gamma,
                            const Vector& losses, double step) {
  double best = std::numeric_limits<double>::infinity();
  double best_p = 0.5;
  Vector p(2);
  const auto n = static_cast<long>(std::floor(1.0 / step));
  for (long j = 1; j < n; ++j) {
    p[0] = static_cast<double>(j) * step;
    p[1] = 1.0 - p[0];
    const double value = objective(spec, gamma, losses, p);
    if (value < best) {
      best = value;
      best_p = p[0];
    }
  }
  return best_p;
}

}  // namespace bobw::oracle
