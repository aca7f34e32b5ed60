#include "bmgame/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace bmgame {

PayoffBreakdown expected_utility(const NetworkGame& game, const Vector& p, int i) {
  if (i < 0 || i >= game.size()) throw ValidationError("player index out of range");
  const OutcomeMoments om = outcome_moments(game, p);
  const auto g = game.G().row(i).transpose();

  PayoffBreakdown b;
  const double gap = game.d()(i) + g.dot(om.mean) - om.mean(i);
  b.mean_term = -gap * gap;
  b.own_var = om.cov(i, i);
  b.cross_var = g.dot(om.cov * g);
  b.cov_bonus = 2.0 * g.dot(om.cov.col(i));
  b.total = b.mean_term - b.own_var - b.cross_var + b.cov_bonus;
  return b;
}

double realized_utility(const NetworkGame& game, const Vector& x, int i) {
  const double gap = game.d()(i) + game.G().row(i).dot(x) - x(i);
  return -gap * gap;
}

std::vector<Kink> payoff_kinks(const NetworkGame& game, const Vector& p, int i, double tol) {
  check_profile(game, p, tol);
  std::vector<int> order;
  for (int j = 0; j < game.size(); ++j) {
    if (j == i || game.coupling()(i, j) == 0.0 || p(j) <= game.p0() + tol) continue;
    order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) { return p(a) < p(b); });

  std::vector<Kink> kinks;
  for (int j : order) {
    const double drop = 2.0 * game.coupling()(i, j);
    if (!kinks.empty() && std::abs(p(j) - kinks.back().location) <= tol) {
      kinks.back().slope_drop += drop;
      kinks.back().players.push_back(j);
    } else {
      kinks.push_back({p(j), drop, {j}});
    }
  }
  return kinks;
}

double potential_value(const NetworkGame& game, const Vector& p) {
  if (!game.symmetric()) throw ValidationError("potential requires a symmetric G");
  const OutcomeMoments om = outcome_moments(game, p);
  const Vector& m = om.mean;
  double v = game.d().dot(m) - 0.5 * (m.squaredNorm() + om.cov.trace());
  const Matrix second = m * m.transpose() + om.cov;
  v += 0.5 * game.G().cwiseProduct(second).sum();
  return v;
}

double realized_potential(const NetworkGame& game, const Vector& x) {
  return game.d().dot(x) - 0.5 * x.squaredNorm() + 0.5 * x.dot(game.G() * x);
}

CovKernel CovKernel::polynomial_integral(int order) {
  if (order < 1 || order > 4) throw ValidationError("polynomial-integral order must be in 1..4");
  CovKernel k;
  k.kind = Kind::PolynomialIntegral;
  k.m = order;
  return k;
}

CovKernel CovKernel::squared_exponential(double length_scale) {
  if (!(length_scale > 0.0)) throw ValidationError("length scale must be positive");
  CovKernel k;
  k.kind = Kind::SquaredExponential;
  k.length_scale = length_scale;
  return k;
}

namespace {

// Integral over u in [0, min(p, q, 1)] of (p - u)^a (q - u)^a / a!, expanded
// as a polynomial in u.
double polynomial_integral_kernel(double p, double q, int m) {
  const double upper = std::min({p, q, 1.0});
  if (upper <= 0.0) return 0.0;
  const int a = m - 1;
  auto binom = [](int n, int r) {
    double c = 1.0;
    for (int t = 1; t <= r; ++t) c = c * (n - r + t) / t;
    return c;
  };
  // coefficients of (x - u)^a in powers of u
  auto expand = [&](double x) {
    std::vector<double> c(a + 1);
    for (int r = 0; r <= a; ++r) c[r] = binom(a, r) * std::pow(x, a - r) * ((r % 2) ? -1.0 : 1.0);
    return c;
  };
  const auto cp = expand(p);
  const auto cq = expand(q);
  double total = 0.0;
  for (int r = 0; r <= a; ++r)
    for (int s = 0; s <= a; ++s) total += cp[r] * cq[s] * std::pow(upper, r + s + 1) / (r + s + 1);
  double fact = 1.0;
  for (int t = 2; t <= a; ++t) fact *= t;
  return total / fact;
}

}  // namespace

double CovKernel::operator()(double p, double q) const {
  switch (kind) {
    case Kind::BrownianMin:
      return std::max(0.0, std::min(p, q));
    case Kind::PolynomialIntegral:
      return polynomial_integral_kernel(p, q, m);
    case Kind::SquaredExponential: {
      const double z = (p - q) / length_scale;
      return std::exp(-z * z);
    }
  }
  return 0.0;
}

IdCheckResult increasing_differences_check(const CovKernel& kernel, const std::vector<double>& grid,
                                           double tol) {
  std::vector<double> pts = grid;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto n = pts.size();

  IdCheckResult res;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t e = c + 1; e < n; ++e) {
          const double p = pts[a], pp = pts[b], q = pts[c], qq = pts[e];
          const double dd = kernel(pp, qq) - kernel(p, qq) - kernel(pp, q) + kernel(p, q);
          res.worst = std::min(res.worst, dd);
          if (dd < -tol && res.pass) {
            res.pass = false;
            res.witness = std::array<double, 4>{p, pp, q, qq};
          }
        }
      }
    }
  }
  return res;
}

}  // namespace bmgame
