#pragma once

#include "bmgame/game.hpp"

#include <optional>
#include <vector>

namespace bmgame {

struct BestResponseResult {
  double policy = 0.0;
  double expected_outcome = 0.0;
  /// i-followership row consistent at the optimum (own entry zero).
  Vector regime;
  bool at_corner = false;
  /// First opponent whose policy coincides with the optimum, if any.
  std::optional<int> at_kink;
  /// Load sum_j c_ij f_ij carried by the regime row.
  double load = 0.0;
};

/// Marginal incentive phi_i = -mu_i (A_i - E X_i) + sigma_ii / 2 at own
/// policy `own`, with A_i = d_i + sum_j g_ij E X_j. The right derivative of
/// U_i in p_i is 2 (sum_{j: p_j > p_i} c_ij - phi_i).
double marginal_incentive(const NetworkGame& game, int i, const Vector& p, double own);

/// Exact best response of player i to the opponents in p (own entry ignored).
/// Scans the corner, the segments between consecutive distinct opponent
/// policies, and the kinks; returns the regime with the highest payoff.
BestResponseResult best_response(const NetworkGame& game, int i, const Vector& p,
                                 double tol = kDefaultTol);

/// Simultaneous best response of every player to p.
Vector best_response_map(const NetworkGame& game, const Vector& p, double tol = kDefaultTol);

/// Upper end of the search interval used by br_grid_oracle when no radius is
/// given: covers every best response of i to p.
double best_response_upper_bound(const NetworkGame& game, int i, const Vector& p);

/// Brute-force argmax of U_i over the grid p0 + t * step on [p0, p0 + radius]
/// (radius <= 0 selects best_response_upper_bound).
double br_grid_oracle(const NetworkGame& game, int i, const Vector& p, double step,
                      double radius = 0.0);

/// Slack of the best-response condition for a given i-followership row:
/// d_i + sum_j g_ij E X_j + k_ii - 2 sum_j g_ij k_ij f_ij - E X_i.
/// Zero at an interior best response, nonnegative at the corner.
double best_response_slack(const NetworkGame& game, int i, const Vector& p, const Vector& f_row);

}  // namespace bmgame
