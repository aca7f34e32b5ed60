#pragma once

#include "bmgame/game.hpp"

#include <limits>
#include <vector>

namespace bmgame {

/// A followership regime: players grouped into blocks of equal policy,
/// listed in increasing policy order. With `corner` set, the first block sits
/// at the status quo.
struct Regime {
  std::vector<std::vector<int>> blocks;
  bool corner = false;

  int block_count() const { return static_cast<int>(blocks.size()); }
  /// block index of every player
  std::vector<int> block_of(int n) const;
  /// Expands block offsets y (policy minus p0) into a full profile.
  Vector profile(const Vector& y, double p0, int n) const;
};

/// All ordered set partitions of {0..n-1}, each with and without the corner
/// flag. `order` relabels players before enumeration (identity if empty).
std::vector<Regime> enumerate_regimes(int n, const std::vector<int>& order = {});

/// lo <= a . y <= hi; `equality` rows have lo == hi.
struct LinearRow {
  Vector a;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool equality = false;
};

struct PolytopeVertices {
  std::vector<Vector> vertices;
  int dimension = -1;  // -1 when empty
};

/// Vertices of {y : rows hold} for a bounded polyhedron. Rows are normalized
/// so tol applies in y units.
PolytopeVertices polytope_vertices(std::vector<LinearRow> rows, int dim, double tol);

/// True if y satisfies every row within tol (after normalization).
bool rows_hold(const std::vector<LinearRow>& rows, const Vector& y, double tol);

/// phi_i(y) = phi0_i + coef_i . y: the marginal incentive of every player
/// when block b sits at offset y_b from the status quo.
struct IncentiveMap {
  Vector phi0;
  Matrix coef;  // n x blocks
};
IncentiveMap incentive_map(const NetworkGame& game, const Regime& regime);

/// Maps a profile to block offsets if it matches the regime's tie pattern
/// within tol; returns false otherwise.
bool regime_offsets(const Regime& regime, const Vector& p, double p0, double tol, Vector& y);

}  // namespace bmgame
