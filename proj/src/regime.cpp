#include "bmgame/regime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace bmgame {

std::vector<int> Regime::block_of(int n) const {
  std::vector<int> out(n, -1);
  for (int b = 0; b < block_count(); ++b)
    for (int i : blocks[b]) out[i] = b;
  return out;
}

Vector Regime::profile(const Vector& y, double p0, int n) const {
  Vector p(n);
  for (int b = 0; b < block_count(); ++b)
    for (int i : blocks[b]) p(i) = p0 + y(b);
  return p;
}

std::vector<Regime> enumerate_regimes(int n, const std::vector<int>& order) {
  std::vector<int> label(n);
  if (order.empty()) {
    std::iota(label.begin(), label.end(), 0);
  } else {
    label = order;
  }
  std::vector<Regime> out;
  std::vector<int> rank(n, 0);
  // rank[i] in 0..n-1; keep assignments whose used ranks are 0..B-1
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      const int top = *std::max_element(rank.begin(), rank.end());
      std::vector<std::vector<int>> blocks(top + 1);
      for (int t = 0; t < n; ++t) blocks[rank[t]].push_back(label[t]);
      for (const auto& b : blocks)
        if (b.empty()) return;
      for (auto& b : blocks) std::sort(b.begin(), b.end());
      out.push_back({blocks, false});
      out.push_back({blocks, true});
      return;
    }
    for (int r = 0; r < n; ++r) {
      rank[pos] = r;
      rec(pos + 1);
    }
  };
  rec(0);
  return out;
}

namespace {

void normalize(LinearRow& row) {
  const double s = row.a.norm();
  if (s > 0.0) {
    row.a /= s;
    row.lo /= s;
    row.hi /= s;
  }
}

}  // namespace

bool rows_hold(const std::vector<LinearRow>& rows, const Vector& y, double tol) {
  for (auto row : rows) {
    normalize(row);
    const double v = row.a.dot(y);
    if (v < row.lo - tol || v > row.hi + tol) return false;
  }
  return true;
}

PolytopeVertices polytope_vertices(std::vector<LinearRow> rows, int dim, double tol) {
  PolytopeVertices out;
  for (auto& r : rows) normalize(r);

  std::vector<const LinearRow*> eq, ineq;
  for (const auto& r : rows) (r.equality ? eq : ineq).push_back(&r);

  // Particular solution and null space of the equality block.
  Vector y0 = Vector::Zero(dim);
  Matrix N = Matrix::Identity(dim, dim);
  if (!eq.empty()) {
    Matrix E(eq.size(), dim);
    Vector e(eq.size());
    for (std::size_t r = 0; r < eq.size(); ++r) {
      E.row(r) = eq[r]->a.transpose();
      e(r) = eq[r]->lo;
    }
    Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const int rank = static_cast<int>(svd.rank());
    y0 = svd.solve(e);
    if ((E * y0 - e).cwiseAbs().maxCoeff() > tol) return out;
    N = svd.matrixV().rightCols(dim - rank);
  }
  const int D = static_cast<int>(N.cols());

  struct Face {
    Vector a;  // in t coordinates
    double b;
    std::size_t row;
  };
  std::vector<LinearRow> reduced;
  for (const auto* r : ineq) {
    const double shift = r->a.dot(y0);
    LinearRow t;
    t.a = N.transpose() * r->a;
    t.lo = r->lo - shift;
    t.hi = r->hi - shift;
    if (t.a.norm() < 1e-12) {
      if (0.0 < t.lo - tol || 0.0 > t.hi + tol) return out;
      continue;
    }
    reduced.push_back(std::move(t));
  }

  auto feasible = [&](const Vector& t) {
    for (const auto& r : reduced) {
      const double v = r.a.dot(t);
      if (v < r.lo - tol || v > r.hi + tol) return false;
    }
    return true;
  };

  std::vector<Vector> verts;
  auto add_vertex = [&](const Vector& y) {
    for (const auto& v : verts)
      if ((v - y).cwiseAbs().maxCoeff() <= 10.0 * tol) return;
    verts.push_back(y);
  };

  if (D == 0) {
    if (feasible(Vector::Zero(0))) add_vertex(y0);
  } else {
    std::vector<Face> faces;
    for (std::size_t r = 0; r < reduced.size(); ++r) {
      const auto& row = reduced[r];
      if (std::isfinite(row.lo)) faces.push_back({row.a, row.lo, r});
      if (std::isfinite(row.hi) && row.hi != row.lo) faces.push_back({row.a, row.hi, r});
    }
    const int F = static_cast<int>(faces.size());
    std::vector<int> pick(D);
    std::function<void(int, int)> rec = [&](int depth, int start) {
      if (depth == D) {
        Matrix A(D, D);
        Vector b(D);
        for (int r = 0; r < D; ++r) {
          A.row(r) = faces[pick[r]].a.transpose();
          b(r) = faces[pick[r]].b;
        }
        Eigen::FullPivLU<Matrix> lu(A);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        const Vector t = lu.solve(b);
        if (feasible(t)) add_vertex(y0 + N * t);
        return;
      }
      for (int f = start; f < F; ++f) {
        bool clash = false;
        for (int q = 0; q < depth; ++q) clash |= faces[pick[q]].row == faces[f].row;
        if (clash) continue;
        pick[depth] = f;
        rec(depth + 1, f + 1);
      }
    };
    rec(0, 0);
  }

  if (verts.empty()) return out;
  out.vertices = std::move(verts);
  if (out.vertices.size() == 1) {
    out.dimension = 0;
  } else {
    Matrix diffs(dim, out.vertices.size() - 1);
    for (std::size_t v = 1; v < out.vertices.size(); ++v)
      diffs.col(v - 1) = out.vertices[v] - out.vertices[0];
    Eigen::JacobiSVD<Matrix> svd(diffs);
    svd.setThreshold(1e-8);
    out.dimension = static_cast<int>(svd.rank());
  }
  return out;
}

IncentiveMap incentive_map(const NetworkGame& game, const Regime& regime) {
  const int n = game.size();
  const int B = regime.block_count();
  const auto block = regime.block_of(n);
  IncentiveMap map;
  map.phi0.resize(n);
  map.coef = Matrix::Zero(n, B);
  for (int i = 0; i < n; ++i) {
    const double mu = game.mu(i);
    // A_i - m_i at the status quo
    double gap = game.d()(i);
    for (int j = 0; j < n; ++j) gap += game.G()(i, j) * game.X0();
    gap -= game.X0();
    map.phi0(i) = -mu * gap + 0.5 * game.sigma()(i, i);
    for (int j = 0; j < n; ++j) map.coef(i, block[j]) += -mu * game.G()(i, j) * game.mu(j);
    map.coef(i, block[i]) += mu * mu;
  }
  return map;
}

bool regime_offsets(const Regime& regime, const Vector& p, double p0, double tol, Vector& y) {
  y.resize(regime.block_count());
  for (int b = 0; b < regime.block_count(); ++b) {
    const auto& blk = regime.blocks[b];
    double lo = p(blk.front()), hi = lo, sum = 0.0;
    for (int i : blk) {
      lo = std::min(lo, p(i));
      hi = std::max(hi, p(i));
      sum += p(i);
    }
    if (hi - lo > tol) return false;
    y(b) = sum / static_cast<double>(blk.size()) - p0;
  }
  if (regime.corner && std::abs(y(0)) > tol) return false;
  return true;
}

}  // namespace bmgame
