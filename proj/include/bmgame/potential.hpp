#pragma once

#include "bmgame/game.hpp"

#include <optional>
#include <vector>

namespace bmgame {

struct PotentialResult {
  Vector profile;
  double value = 0.0;
  /// Skew-complementary, profile-consistent followership.
  Followership witness;
  /// y_i = -phi_i + sum_j c_ij f_ij: the one-sided derivative of V in p_i
  /// under the witness. Zero for interior players, <= 0 at the status quo.
  Vector certificate;
  std::vector<std::vector<int>> blocks;  // tie groups in increasing policy order
  bool corner_block = false;
};

/// Unique maximizer of the potential V by regime enumeration (n <= 5).
/// `order` permutes the player labels used to enumerate regimes; the result
/// does not depend on it. Requires symmetric G and positive definite I - G.
PotentialResult maximize_potential(const NetworkGame& game, const std::vector<int>& order = {},
                                   double tol = kDefaultTol);

/// Brute-force argmax of V over the grid p0 + t * step inside [lo, hi]^n,
/// default [p0, policy_upper_bound]. n <= 3.
Vector potential_grid_oracle(const NetworkGame& game, double step,
                             std::optional<Vector> lo = std::nullopt,
                             std::optional<Vector> hi = std::nullopt);

/// Splits sum_{i<j in T} c_ij over the ordered pairs of T so that player i
/// receives at most cap_i; returns F with f_ij + f_ji = 1 on T, or nothing if
/// no such orientation exists. Pairs with c_ij = 0 get f = 1/2.
std::optional<Matrix> orient_ties(const Matrix& c, const std::vector<int>& T, const Vector& cap,
                                  double tol);

}  // namespace bmgame
