#pragma once

#include "bmgame/game.hpp"
#include "bmgame/regime.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bmgame {

/// Per-player equilibrium condition, in outcome units. The load is
/// v_i = sum_j g_ij k_ij f_ij; an interior player needs
/// E X_i = d_i + sum_j g_ij E X_j + k_ii - 2 v_i with v_i in [load_min, load_max],
/// a player at the status quo needs the same with "<=" at some feasible v_i.
struct PlayerCheck {
  bool ok = true;
  bool corner = false;
  double required_load = 0.0;
  double load_min = 0.0;  // opponents strictly above
  double load_max = 0.0;  // plus tied opponents
  std::string violation;
};

struct Verdict {
  bool equilibrium = true;
  Followership witness;
  std::vector<PlayerCheck> players;
  std::string violation;  // first violated condition, empty if none
};

/// Checks the followership characterization at p. Tied opponents share one
/// uniform fraction; opponents tied at the status quo get f = 0.
Verdict verify_equilibrium(const NetworkGame& game, const Vector& p, double tol = kDefaultTol);

struct ExtremalOptions {
  double tol = 1e-12;  // stop when successive profiles differ by less
  int max_iter = 10000;
  double verify_tol = kDefaultTol;
};

struct ExtremalResult {
  Vector least;
  Vector greatest;
  int iterations_up = 0;
  int iterations_down = 0;
};

/// Least and greatest equilibria (policy order) by simultaneous best-response
/// iteration from the status quo and from policy_upper_bound.
ExtremalResult extremal_equilibria(const NetworkGame& game, const ExtremalOptions& opts = {});

/// A connected piece of the equilibrium set: the closure of one regime's
/// solution polytope. Dimension 0 is an isolated point, 1 a tie segment.
struct EquilibriumComponent {
  int dimension = 0;
  std::vector<Vector> vertices;  // policy profiles
  Regime regime;
  Followership witness;  // at the first vertex
  Vector outcome_lo;     // componentwise expected-outcome bounds
  Vector outcome_hi;
  std::vector<LinearRow> rows;  // in block offsets y = s - p0
  double p0 = 0.0;

  /// Policy profile at the vertex centroid.
  Vector centroid() const;
  bool contains(const Vector& p, double tol = kDefaultTol) const;
};

struct EquilibriumSet {
  std::vector<EquilibriumComponent> components;
  Vector least;
  Vector greatest;

  bool contains(const Vector& p, double tol = kDefaultTol) const;
  /// Isolated equilibria.
  std::vector<Vector> points() const;
};

/// All equilibria for n <= n_cap by scanning every ordered partition of the
/// players (with and without a status-quo block). Every vertex and centroid
/// is cross-checked with verify_equilibrium.
EquilibriumSet enumerate_equilibria(const NetworkGame& game, int n_cap = 5,
                                    double tol = kDefaultTol);

struct BenchmarkProfiles {
  Vector gamma0_outcomes;  // no uncertainty
  Vector gamma0_policies;
  Vector gamma1_outcomes;  // independent noise
  Vector gamma1_policies;
  bool gamma0_corner = false;  // closed form clipped at the status quo
  bool gamma1_corner = false;
  Vector gamma_least;  // correlated environment, policy order
  Vector gamma_greatest;
  bool gamma_unique = false;
  // two players with symmetric G only
  std::optional<double> D;
  std::optional<double> distance0;
  std::optional<double> distance1;
  std::optional<double> distance_star;  // when the equilibrium is unique
};

BenchmarkProfiles benchmark_profiles(const NetworkGame& game, double tol = kDefaultTol);

struct ConformityRow {
  int i = 0;  // lower policy
  int j = 0;  // higher policy
  double gap = 0.0;       // E X_i - E X_j
  double beta_gap = 0.0;  // beta_i - beta_j
  bool strict_ok = false;
  bool consecutive = false;
  std::optional<double> predicted;  // consecutive pairs: beta_gap - 2gk/(1+g)
  bool identity_ok = false;
};

struct ConformityTable {
  double g = 0.0;
  std::vector<ConformityRow> rows;
  bool all_strict = true;
  bool all_identity = true;
};

/// Equilibrium outcome gaps against centrality gaps. Requires a uniform g
/// and the main model; the identity is checked when all policies are
/// interior and strictly ordered.
ConformityTable conformity_gaps(const NetworkGame& game, const Vector& p, double tol = kDefaultTol);

/// For the d = 0 tie interval [u_i k, (2 - u_i) k]: true where the lower
/// outcome bound (2 - u_i) k increases in k, i.e. u_i < 2.
std::vector<bool> lower_bound_increasing_in_k(const NetworkGame& game);

}  // namespace bmgame
