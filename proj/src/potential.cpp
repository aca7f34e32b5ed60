#include "bmgame/potential.hpp"

#include "bmgame/payoff.hpp"
#include "bmgame/regime.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace bmgame {

namespace {

// Dense Edmonds-Karp; graphs here have at most a few dozen nodes.
double max_flow(Matrix& cap, int s, int t) {
  const auto n = static_cast<int>(cap.rows());
  double total = 0.0;
  std::vector<int> prev(n);
  for (;;) {
    std::fill(prev.begin(), prev.end(), -1);
    prev[s] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && prev[t] < 0) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        if (prev[v] < 0 && cap(u, v) > 1e-15) {
          prev[v] = u;
          q.push(v);
        }
      }
    }
    if (prev[t] < 0) return total;
    double push = std::numeric_limits<double>::infinity();
    for (int v = t; v != s; v = prev[v]) push = std::min(push, cap(prev[v], v));
    for (int v = t; v != s; v = prev[v]) {
      cap(prev[v], v) -= push;
      cap(v, prev[v]) += push;
    }
    total += push;
  }
}

double edge_weight(const Matrix& c, const std::vector<int>& S) {
  double w = 0.0;
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = a + 1; b < S.size(); ++b) w += c(S[a], S[b]);
  return w;
}

}  // namespace

std::optional<Matrix> orient_ties(const Matrix& c, const std::vector<int>& T, const Vector& cap,
                                  double tol) {
  const auto n = c.rows();
  Matrix F = Matrix::Zero(n, n);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < T.size(); ++a) {
    for (std::size_t b = a + 1; b < T.size(); ++b) {
      const int i = T[a], j = T[b];
      if (c(i, j) > 0.0) {
        edges.emplace_back(i, j);
      } else {
        F(i, j) = F(j, i) = 0.5;
      }
    }
  }
  const int E = static_cast<int>(edges.size());
  const int P = static_cast<int>(T.size());
  const int source = 0, sink = 1 + E + P;
  Matrix net = Matrix::Zero(sink + 1, sink + 1);
  auto player_node = [&](int i) {
    return 1 + E + static_cast<int>(std::find(T.begin(), T.end(), i) - T.begin());
  };
  double need = 0.0;
  for (int e = 0; e < E; ++e) {
    const auto [i, j] = edges[e];
    net(source, 1 + e) = c(i, j);
    net(1 + e, player_node(i)) = c(i, j);
    net(1 + e, player_node(j)) = c(i, j);
    need += c(i, j);
  }
  for (int i : T) net(player_node(i), sink) = std::max(0.0, cap(i)) + tol;
  const Matrix before = net;
  const double flow = max_flow(net, source, sink);
  if (flow < need - tol * std::max(1.0, need) * static_cast<double>(P)) return std::nullopt;
  for (int e = 0; e < E; ++e) {
    const auto [i, j] = edges[e];
    const double to_i = before(1 + e, player_node(i)) - net(1 + e, player_node(i));
    const double to_j = before(1 + e, player_node(j)) - net(1 + e, player_node(j));
    const double sum = to_i + to_j;
    F(i, j) = sum > 0.0 ? std::clamp(to_i / sum, 0.0, 1.0) : 0.5;
    F(j, i) = 1.0 - F(i, j);
  }
  return F;
}

PotentialResult maximize_potential(const NetworkGame& game, const std::vector<int>& order,
                                   double tol) {
  if (!game.symmetric(tol)) throw ValidationError("potential requires a symmetric G");
  const int n = game.size();
  if (n > 5) throw ValidationError("potential maximization supports at most 5 players");
  {
    const Matrix A = Matrix::Identity(n, n) - game.G();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0) throw ValidationError("I - G is not positive definite");
  }
  if (!order.empty()) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(sorted.size()) != n || sorted[i] != i)
        throw ValidationError("regime order must be a permutation of the players");
  }
  const Matrix& c = game.coupling();
  const double cap = 2.0 * (policy_upper_bound(game) - game.p0()) + 1.0;

  std::optional<PotentialResult> best;
  for (const auto& regime : enumerate_regimes(n, order)) {
    const int B = regime.block_count();
    const auto block = regime.block_of(n);
    const IncentiveMap map = incentive_map(game, regime);
    Vector above = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (block[j] > block[i]) above(i) += c(i, j);

    std::vector<LinearRow> rows;
    for (int b = 0; b < B; ++b) {
      const auto& T = regime.blocks[b];
      const bool corner = regime.corner && b == 0;
      const int sz = static_cast<int>(T.size());
      for (int mask = 1; mask < (1 << sz); ++mask) {
        std::vector<int> S;
        for (int t = 0; t < sz; ++t)
          if (mask >> t & 1) S.push_back(T[t]);
        LinearRow r;
        r.a = Vector::Zero(B);
        double rhs = edge_weight(c, S);
        for (int i : S) {
          r.a += map.coef.row(i).transpose();
          rhs += above(i) - map.phi0(i);
        }
        r.lo = rhs;
        if (!corner && mask == (1 << sz) - 1) {
          r.hi = rhs;
          r.equality = true;
        }
        rows.push_back(r);
      }
      LinearRow ord;
      ord.a = Vector::Zero(B);
      ord.a(b) = 1.0;
      ord.lo = 0.0;
      if (b > 0) ord.a(b - 1) = -1.0;
      if (corner) {
        ord.hi = 0.0;
        ord.equality = true;
      }
      rows.push_back(ord);
    }
    LinearRow top;
    top.a = Vector::Zero(B);
    top.a(B - 1) = 1.0;
    top.hi = cap;
    rows.push_back(top);

    const auto poly = polytope_vertices(rows, B, tol);
    if (poly.dimension < 0) continue;
    if (poly.dimension > 0) throw SolverError("potential maximizer is not unique in a regime");
    const Vector p = regime.profile(poly.vertices.front(), game.p0(), n);
    if (best) {
      if ((best->profile - p).cwiseAbs().maxCoeff() > 1e-7)
        throw SolverError("distinct potential maximizers found");
      continue;
    }

    PotentialResult res;
    res.profile = p;
    res.blocks = regime.blocks;
    res.corner_block = regime.corner;
    const Vector phi = map.phi0 + map.coef * poly.vertices.front();
    Matrix F = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (block[j] > block[i]) F(i, j) = 1.0;
    for (const auto& T : regime.blocks) {
      const Vector room = phi - above;
      const auto part = orient_ties(c, T, room, 1e-9);
      if (!part) throw SolverError("no skew-complementary followership at the potential maximizer");
      for (int i : T)
        for (int j : T)
          if (i != j) F(i, j) = (*part)(i, j);
    }
    res.witness.F = F;
    res.certificate.resize(n);
    for (int i = 0; i < n; ++i) {
      double load = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) load += c(i, j) * F(i, j);
      res.certificate(i) = -phi(i) + load;
    }
    best = std::move(res);
  }
  if (!best) throw SolverError("no potential maximizer found");
  best->value = potential_value(game, best->profile);
  return *best;
}

Vector potential_grid_oracle(const NetworkGame& game, double step, std::optional<Vector> lo,
                             std::optional<Vector> hi) {
  const int n = game.size();
  if (n > 3) throw ValidationError("potential grid oracle supports at most 3 players");
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  const Vector low = lo.value_or(Vector::Constant(n, game.p0()));
  const Vector high = hi.value_or(Vector::Constant(n, policy_upper_bound(game)));

  std::vector<long> first(n), last(n);
  for (int i = 0; i < n; ++i) {
    first[i] = std::max(0L, static_cast<long>(std::ceil((low(i) - game.p0()) / step - 1e-9)));
    last[i] = static_cast<long>(std::floor((high(i) - game.p0()) / step + 1e-9));
    if (last[i] < first[i]) throw ValidationError("empty grid box");
  }
  std::vector<long> idx(first);
  Vector p(n), best(n);
  double best_v = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (int i = 0; i < n; ++i) p(i) = game.p0() + static_cast<double>(idx[i]) * step;
    const double v = potential_value(game, p);
    if (v > best_v) {
      best_v = v;
      best = p;
    }
    int i = 0;
    while (i < n && ++idx[i] > last[i]) {
      idx[i] = first[i];
      ++i;
    }
    if (i == n) break;
  }
  return best;
}

}  // namespace bmgame
