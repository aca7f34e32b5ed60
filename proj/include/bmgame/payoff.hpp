#pragma once

#include "bmgame/game.hpp"

#include <array>
#include <optional>
#include <vector>

namespace bmgame {

/// Decomposition of U_i(p) = mean_term - own_var - cross_var + cov_bonus.
struct PayoffBreakdown {
  double mean_term = 0.0;  // -(d_i + sum_j g_ij E X_j - E X_i)^2
  double own_var = 0.0;    // Var(X_i)
  double cross_var = 0.0;  // Var(sum_j g_ij X_j)
  double cov_bonus = 0.0;  // 2 sum_j g_ij Cov(X_i, X_j)
  double total = 0.0;
};

/// Closed-form expected utility of player i at profile p.
PayoffBreakdown expected_utility(const NetworkGame& game, const Vector& p, int i);

/// u_i evaluated at a realized outcome vector x.
double realized_utility(const NetworkGame& game, const Vector& x, int i);

struct Kink {
  double location = 0.0;
  double slope_drop = 0.0;  // left derivative minus right derivative of U_i
  std::vector<int> players;
};

/// Kinks of p_i -> U_i(p_i, p_-i). Opponents sharing a policy are merged into
/// one kink with the summed slope drop. The own entry of p is ignored.
std::vector<Kink> payoff_kinks(const NetworkGame& game, const Vector& p, int i,
                               double tol = kDefaultTol);

/// V(p) = E(sum_i d_i X_i - X_i^2 / 2 + sum_j g_ij X_i X_j / 2).
/// 2V is an exact potential for the game. Requires symmetric G.
double potential_value(const NetworkGame& game, const Vector& p);

/// V integrand at a realized outcome vector.
double realized_potential(const NetworkGame& game, const Vector& x);

/// Covariance kernels c(p, q) on policy offsets from the status quo.
struct CovKernel {
  enum class Kind { BrownianMin, PolynomialIntegral, SquaredExponential };

  Kind kind = Kind::BrownianMin;
  int m = 1;                  // PolynomialIntegral order, 1..4
  double length_scale = 1.0;  // SquaredExponential

  static CovKernel brownian() { return {}; }
  static CovKernel polynomial_integral(int order);
  static CovKernel squared_exponential(double length_scale);

  double operator()(double p, double q) const;
};

struct IdCheckResult {
  bool pass = true;
  /// First violating quadruple (p, p', q, q') in lexicographic scan order.
  std::optional<std::array<double, 4>> witness;
  double worst = 0.0;  // smallest double difference seen
};

/// Checks c(p',q') - c(p,q') - c(p',q) + c(p,q) >= -tol for all grid
/// quadruples with p' > p, q' > q.
IdCheckResult increasing_differences_check(const CovKernel& kernel, const std::vector<double>& grid,
                                           double tol = kDefaultTol);

}  // namespace bmgame
