#pragma once

#include "bmgame/game.hpp"
#include "bmgame/organization.hpp"

#include <random>
#include <vector>

namespace testsupport {

using bmgame::Matrix;
using bmgame::Vector;

struct InstanceOptions {
  int n = 2;
  bool symmetric = false;
  bool uniform_g = false;
  double max_row_sum = 0.6;
  bool strict_order = false;  // favorites spaced so the equilibrium is strictly ordered
};

/// Random main-model game with X0 large enough that every equilibrium is interior.
bmgame::NetworkGame random_game(std::mt19937_64& rng, const InstanceOptions& opts);

/// Random profile in [p0, p0 + span]^n.
Vector random_profile(std::mt19937_64& rng, const bmgame::NetworkGame& game, double span);

bmgame::NetworkGame pair_game();
bmgame::NetworkGame tied_pair_game();
bmgame::OrgSpec divisions_org(double sigma2 = 9.8);

// Independent oracles, written directly from the model definitions.

/// E[-(d_i + sum_j g_ij X_j - X_i)^2] as -(a'm + d_i)^2 - a' Cov a with a = g_i - e_i.
double oracle_utility(const bmgame::NetworkGame& game, const Vector& p, int i);

/// E[sum_i d_i X_i - X_i^2 / 2 + sum_{i != j} g_ij X_i X_j / 2] from first and second moments.
double oracle_potential(const bmgame::NetworkGame& game, const Vector& p);

/// Moments built entry by entry from the Brownian-motion definition.
void oracle_moments(const bmgame::NetworkGame& game, const Vector& p, Vector& mean, Matrix& cov);

/// Argmax of the oracle utility over p0 + t * step, t = 0..count.
double oracle_grid_best_response(const bmgame::NetworkGame& game, int i, Vector p, double step,
                                 double upper);

/// Two players, symmetric weight g, main model: unique-branch closed form
/// (follower = higher favorite), in expected outcomes.
Vector oracle_two_player_outcomes(double d1, double d2, double g, double k);

/// Euclidean distance from q to the convex hull of the given points
/// (Frank-Wolfe on the simplex weights; accurate to about 1e-6 relative).
double distance_to_hull(const std::vector<Vector>& points, const Vector& q);

}  // namespace testsupport
