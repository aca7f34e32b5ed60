#include "bmgame/equilibrium.hpp"

#include "bmgame/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bmgame {

namespace {

double opponent_target(const NetworkGame& game, int i, const Vector& m) {
  double a = game.d()(i);
  for (int j = 0; j < game.size(); ++j)
    if (j != i) a += game.G()(i, j) * m(j);
  return a;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

Verdict verify_equilibrium(const NetworkGame& game, const Vector& p, double tol) {
  check_profile(game, p, tol);
  const int n = game.size();
  const auto& K = game.derived().K;
  const Vector m = game.means(p);

  Verdict v;
  v.witness.F = Matrix::Zero(n, n);
  v.players.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& pc = v.players[i];
    pc.corner = p(i) <= game.p0() + tol;
    std::vector<int> tied;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = game.G()(i, j) * K(i, j);
      if (p(j) > p(i) + tol) {
        pc.load_min += w;
        v.witness.F(i, j) = 1.0;
      } else if (p(j) >= p(i) - tol && !pc.corner) {
        tied.push_back(j);
      }
    }
    pc.load_max = pc.load_min;
    for (int j : tied) pc.load_max += game.G()(i, j) * K(i, j);
    const double rhs = opponent_target(game, i, m) + K(i, i);
    pc.required_load = 0.5 * (rhs - m(i));

    const double half = 0.5 * tol;
    std::ostringstream os;
    if (pc.corner) {
      pc.ok = pc.required_load >= pc.load_min - half;
      if (!pc.ok)
        os << "player " << i + 1 << " at the status quo: X0 = " << fmt(m(i))
           << " exceeds d_i + sum_j g_ij E X_j + k_ii - 2 sum_j g_ij k_ij f_ij = "
           << fmt(rhs - 2.0 * pc.load_min);
    } else {
      pc.ok = pc.required_load >= pc.load_min - half && pc.required_load <= pc.load_max + half;
      if (!pc.ok) {
        os << "player " << i + 1 << ": E X_i = " << fmt(m(i))
           << " outside the followership range [" << fmt(rhs - 2.0 * pc.load_max) << ", "
           << fmt(rhs - 2.0 * pc.load_min) << "]";
      }
      const double span = pc.load_max - pc.load_min;
      if (span > 0.0) {
        const double frac = std::clamp((pc.required_load - pc.load_min) / span, 0.0, 1.0);
        for (int j : tied) v.witness.F(i, j) = game.G()(i, j) * K(i, j) > 0.0 ? frac : 0.0;
      }
    }
    pc.violation = os.str();
    if (!pc.ok && v.equilibrium) {
      v.equilibrium = false;
      v.violation = pc.violation;
    }
  }
  return v;
}

ExtremalResult extremal_equilibria(const NetworkGame& game, const ExtremalOptions& opts) {
  if ((game.coupling().array() < 0.0).any())
    throw ValidationError("extremal equilibria need nonnegative couplings g_ij sigma_ij");
  const int n = game.size();
  ExtremalResult res;

  // Monotone iteration; the max/min keeps iterates ordered and collapses
  // near-ties that a plain update could swap back and forth.
  auto iterate = [&](Vector p, bool upward, int& iters) {
    for (iters = 0; iters < opts.max_iter; ++iters) {
      const Vector b = best_response_map(game, p, opts.tol);
      const Vector next = upward ? Vector(p.cwiseMax(b)) : Vector(p.cwiseMin(b));
      const double step = (next - p).cwiseAbs().maxCoeff();
      p = next;
      if (step < opts.tol) return p;
    }
    throw SolverError("best-response iteration did not converge within the iteration cap");
  };

  res.least = iterate(Vector::Constant(n, game.p0()), true, res.iterations_up);

  // Raise the start until it dominates its own best response.
  Vector top = Vector::Constant(n, policy_upper_bound(game));
  for (int t = 0;; ++t) {
    const Vector b = best_response_map(game, top, opts.tol);
    if ((b.array() <= top.array() + opts.tol).all()) break;
    if (t >= opts.max_iter) throw SolverError("no dominating start for downward iteration");
    top = top.cwiseMax(b);
  }
  res.greatest = iterate(top, false, res.iterations_down);

  for (const Vector* q : {&res.least, &res.greatest}) {
    const Verdict v = verify_equilibrium(game, *q, opts.verify_tol);
    if (!v.equilibrium) throw SolverError("iteration limit is not an equilibrium: " + v.violation);
  }
  return res;
}

Vector EquilibriumComponent::centroid() const {
  Vector c = Vector::Zero(vertices.front().size());
  for (const auto& v : vertices) c += v;
  return c / static_cast<double>(vertices.size());
}

bool EquilibriumComponent::contains(const Vector& p, double tol) const {
  Vector y;
  if (!regime_offsets(regime, p, p0, tol, y)) return false;
  return rows_hold(rows, y, tol);
}

bool EquilibriumSet::contains(const Vector& p, double tol) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const auto& c) { return c.contains(p, tol); });
}

std::vector<Vector> EquilibriumSet::points() const {
  std::vector<Vector> out;
  for (const auto& c : components)
    if (c.dimension == 0) out.push_back(c.vertices.front());
  return out;
}

namespace {

// Equilibrium rows of a regime in block offsets y.
std::vector<LinearRow> equilibrium_rows(const NetworkGame& game, const Regime& regime, double cap) {
  const int n = game.size();
  const int B = regime.block_count();
  const auto block = regime.block_of(n);
  const IncentiveMap map = incentive_map(game, regime);
  const Matrix& c = game.coupling();

  std::vector<LinearRow> rows;
  for (int i = 0; i < n; ++i) {
    double above = 0.0, same = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (block[j] > block[i]) above += c(i, j);
      if (block[j] == block[i]) same += c(i, j);
    }
    LinearRow r;
    r.a = map.coef.row(i).transpose();
    r.lo = above - map.phi0(i);
    if (regime.corner && block[i] == 0) {
      rows.push_back(r);
      continue;
    }
    r.hi = r.lo + same;
    r.equality = same == 0.0;
    rows.push_back(r);
  }
  for (int b = 0; b < B; ++b) {
    LinearRow r;
    r.a = Vector::Zero(B);
    r.a(b) = 1.0;
    if (b == 0) {
      r.lo = 0.0;
      if (regime.corner) {
        r.hi = 0.0;
        r.equality = true;
      }
    } else {
      r.a(b - 1) = -1.0;
      r.lo = 0.0;
    }
    rows.push_back(r);
  }
  LinearRow top;
  top.a = Vector::Zero(B);
  top.a(B - 1) = 1.0;
  top.hi = cap;
  rows.push_back(top);
  return rows;
}

}  // namespace

EquilibriumSet enumerate_equilibria(const NetworkGame& game, int n_cap, double tol) {
  const int n = game.size();
  if (n > n_cap) {
    std::ostringstream os;
    os << "enumeration supports at most " << n_cap << " players, got " << n;
    throw ValidationError(os.str());
  }
  const double cap = 2.0 * (policy_upper_bound(game) - game.p0()) + 1.0;

  std::vector<EquilibriumComponent> found;
  for (const auto& regime : enumerate_regimes(n)) {
    auto rows = equilibrium_rows(game, regime, cap);
    const auto poly = polytope_vertices(rows, regime.block_count(), tol);
    if (poly.dimension < 0) continue;
    EquilibriumComponent comp;
    comp.dimension = poly.dimension;
    comp.regime = regime;
    comp.rows = std::move(rows);
    comp.p0 = game.p0();
    for (const auto& y : poly.vertices) {
      if (y(regime.block_count() - 1) > cap - 1.0)
        throw SolverError("equilibrium polytope reaches the search cap");
      comp.vertices.push_back(regime.profile(y, game.p0(), n));
    }
    found.push_back(std::move(comp));
  }

  // Keep higher-dimensional pieces; drop pieces covered by a kept one.
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.dimension > b.dimension; });
  EquilibriumSet set;
  for (auto& comp : found) {
    const bool covered = std::any_of(set.components.begin(), set.components.end(), [&](const auto& k) {
      return std::all_of(comp.vertices.begin(), comp.vertices.end(),
                         [&](const Vector& v) { return k.contains(v, 10.0 * tol); });
    });
    if (!covered) set.components.push_back(std::move(comp));
  }
  if (set.components.empty()) throw SolverError("no equilibrium found by regime enumeration");

  set.least = set.components.front().vertices.front();
  set.greatest = set.least;
  for (auto& comp : set.components) {
    comp.outcome_lo = Vector::Constant(n, std::numeric_limits<double>::infinity());
    comp.outcome_hi = -comp.outcome_lo;
    for (const auto& v : comp.vertices) {
      set.least = set.least.cwiseMin(v);
      set.greatest = set.greatest.cwiseMax(v);
      const Vector m = game.means(v);
      comp.outcome_lo = comp.outcome_lo.cwiseMin(m);
      comp.outcome_hi = comp.outcome_hi.cwiseMax(m);
    }
    std::vector<Vector> probes = comp.vertices;
    probes.push_back(comp.centroid());
    for (const auto& q : probes) {
      const Verdict v = verify_equilibrium(game, q, tol);
      if (!v.equilibrium) throw SolverError("enumerated profile fails verification: " + v.violation);
    }
    comp.witness = verify_equilibrium(game, comp.vertices.front(), tol).witness;
  }
  return set;
}

namespace {

// Fixed point of m <- min(X0, d + G m + shift) from m = X0 (decreasing).
Vector clipped_fixed_point(const NetworkGame& game, const Vector& shift) {
  const int n = game.size();
  Vector m = Vector::Constant(n, game.X0());
  for (int it = 0; it < 100000; ++it) {
    Vector next = (game.d() + game.G() * m + shift).cwiseMin(game.X0());
    const double step = (next - m).cwiseAbs().maxCoeff();
    m = next;
    if (step < 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff())) return m;
  }
  throw SolverError("benchmark iteration did not converge");
}

}  // namespace

BenchmarkProfiles benchmark_profiles(const NetworkGame& game, double tol) {
  const int n = game.size();
  const auto& dq = game.derived();
  BenchmarkProfiles b;

  b.gamma0_outcomes = dq.beta;
  if ((b.gamma0_outcomes.array() > game.X0() + tol).any()) {
    b.gamma0_corner = true;
    b.gamma0_outcomes = clipped_fixed_point(game, Vector::Zero(n));
  }
  const Vector kdiag = dq.K.diagonal();
  b.gamma1_outcomes = dq.M * (game.d() + kdiag);
  if ((b.gamma1_outcomes.array() > game.X0() + tol).any()) {
    b.gamma1_corner = true;
    b.gamma1_outcomes = clipped_fixed_point(game, kdiag);
  }
  b.gamma0_policies = game.policies_for_means(b.gamma0_outcomes);
  b.gamma1_policies = game.policies_for_means(b.gamma1_outcomes);

  ExtremalOptions opts;
  opts.verify_tol = tol;
  const auto ex = extremal_equilibria(game, opts);
  b.gamma_least = ex.least;
  b.gamma_greatest = ex.greatest;
  b.gamma_unique = (ex.greatest - ex.least).cwiseAbs().maxCoeff() <= 1e-8;

  if (n == 2 && game.symmetric(tol)) {
    auto gap = [](const Vector& m) { return std::abs(m(0) - m(1)); };
    b.D = gap(dq.beta);
    b.distance0 = gap(b.gamma0_outcomes);
    b.distance1 = gap(b.gamma1_outcomes);
    if (b.gamma_unique) b.distance_star = gap(game.means(ex.least));
  }
  return b;
}

ConformityTable conformity_gaps(const NetworkGame& game, const Vector& p, double tol) {
  check_profile(game, p, tol);
  const int n = game.size();
  if (game.generalized()) throw ValidationError("conformity gaps need the main model");
  ConformityTable t;
  t.g = n > 1 ? game.G()(0, 1) : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(game.G()(i, j) - t.g) > tol)
        throw ValidationError("conformity gaps need a uniform interaction weight g");

  const Vector m = game.means(p);
  const Vector& beta = game.derived().beta;
  const double k = game.derived().k;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return p(a) < p(b); });
  bool strict_interior = true;
  for (int r = 0; r < n; ++r) {
    if (p(order[r]) <= game.p0() + tol) strict_interior = false;
    if (r > 0 && p(order[r]) - p(order[r - 1]) <= tol) strict_interior = false;
  }

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const int i = order[a], j = order[b];
      if (p(j) - p(i) <= tol) continue;
      ConformityRow row;
      row.i = i;
      row.j = j;
      row.gap = m(i) - m(j);
      row.beta_gap = beta(i) - beta(j);
      row.strict_ok = k > 0.0 && t.g > 0.0 ? row.gap < row.beta_gap : std::abs(row.gap - row.beta_gap) <= tol;
      row.consecutive = b == a + 1;
      if (row.consecutive && strict_interior) {
        row.predicted = row.beta_gap - 2.0 * t.g * k / (1.0 + t.g);
        row.identity_ok = std::abs(row.gap - *row.predicted) <= 10.0 * tol;
        t.all_identity = t.all_identity && row.identity_ok;
      }
      t.all_strict = t.all_strict && row.strict_ok;
      t.rows.push_back(row);
    }
  }
  if (!strict_interior) t.all_identity = false;
  return t;
}

std::vector<bool> lower_bound_increasing_in_k(const NetworkGame& game) {
  const Vector& u = game.derived().u;
  std::vector<bool> out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = u(i) < 2.0;
  return out;
}

}  // namespace bmgame
