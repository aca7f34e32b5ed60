#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {

using bmgame::GameSpec;
using bmgame::NetworkGame;

NetworkGame random_game(std::mt19937_64& rng, const InstanceOptions& opts) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = opts.n;
  GameSpec s;
  s.mu = -0.5 - 1.5 * unit(rng);
  s.sigma2 = 0.2 + 2.8 * unit(rng);
  s.p0 = unit(rng) - 0.5;
  const double k = s.sigma2 / (2.0 * std::abs(s.mu));

  s.G = Matrix::Zero(n, n);
  if (opts.uniform_g) {
    const double g = n > 1 ? (0.05 + 0.9 * unit(rng)) * opts.max_row_sum / (n - 1) : 0.0;
    s.G = Matrix::Constant(n, n, g);
    s.G.diagonal().setZero();
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && (!opts.symmetric || j > i)) s.G(i, j) = unit(rng);
    if (opts.symmetric) s.G = s.G + Matrix(s.G.transpose());
    const double top = s.G.rowwise().sum().maxCoeff();
    if (top > 0.0) s.G *= opts.max_row_sum * (0.2 + 0.8 * unit(rng)) / top;
  }

  s.d.resize(n);
  if (opts.strict_order) {
    const double g = n > 1 ? s.G(0, 1) : 0.0;
    double level = 3.0 * unit(rng);
    for (int r = 0; r < n; ++r) {
      s.d(r) = level;
      level -= 2.0 * g * k + 0.1 + 1.4 * unit(rng);
    }
    std::shuffle(s.d.data(), s.d.data() + n, rng);
  } else {
    for (int i = 0; i < n; ++i) s.d(i) = 3.0 * unit(rng);
  }

  // Equilibrium outcomes never exceed M (d + k 1); start above that.
  const Matrix M = (Matrix::Identity(n, n) - s.G).inverse();
  s.X0 = (M * (s.d + Vector::Constant(n, k))).maxCoeff() + 0.5 + 2.0 * unit(rng);
  return bmgame::build_game(s);
}

Vector random_profile(std::mt19937_64& rng, const NetworkGame& game, double span) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector p(game.size());
  for (int i = 0; i < game.size(); ++i) p(i) = game.p0() + span * unit(rng);
  return p;
}

NetworkGame pair_game() {
  GameSpec s;
  s.G = Matrix::Zero(2, 2);
  s.G(0, 1) = s.G(1, 0) = 1.0 / 3.0;
  s.d = Vector(2);
  s.d << 2.0, 1.0;
  s.mu = -2.0;
  s.sigma2 = 2.4;
  s.p0 = 0.0;
  s.X0 = 4.0;
  return bmgame::build_game(s);
}

NetworkGame tied_pair_game() {
  GameSpec s;
  s.G = Matrix::Zero(2, 2);
  s.G(0, 1) = s.G(1, 0) = 1.0 / 3.0;
  s.d = Vector::Zero(2);
  s.mu = -2.0;
  s.sigma2 = 2.4;
  s.p0 = 0.0;
  s.X0 = 4.0;
  return bmgame::build_game(s);
}

bmgame::OrgSpec divisions_org(double sigma2) {
  bmgame::OrgSpec o;
  o.a1 = 5.0;
  o.a2 = 3.0;
  o.b = 1.0;
  o.c1 = 1.0;
  o.c2 = 1.0;
  o.g = 2.0 / 3.0;
  o.mu = -0.7;
  o.sigma2 = sigma2;
  o.p0 = 0.0;
  o.X0 = 15.0;
  return o;
}

void oracle_moments(const NetworkGame& game, const Vector& p, Vector& mean, Matrix& cov) {
  const int n = game.size();
  mean.resize(n);
  cov.resize(n, n);
  for (int i = 0; i < n; ++i) {
    mean(i) = game.X0() + game.mu(i) * (p(i) - game.p0());
    for (int j = 0; j < n; ++j) {
      const double closest = std::min(p(i), p(j));  // policy nearest the status quo
      cov(i, j) = game.sigma()(i, j) * (closest - game.p0());
    }
  }
}

double oracle_utility(const NetworkGame& game, const Vector& p, int i) {
  Vector m;
  Matrix cov;
  oracle_moments(game, p, m, cov);
  Vector a = game.G().row(i).transpose();
  a(i) -= 1.0;
  const double centre = game.d()(i) + a.dot(m);
  return -(centre * centre) - a.dot(cov * a);
}

double oracle_potential(const NetworkGame& game, const Vector& p) {
  Vector m;
  Matrix cov;
  oracle_moments(game, p, m, cov);
  const int n = game.size();
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    v += game.d()(i) * m(i) - 0.5 * (m(i) * m(i) + cov(i, i));
    for (int j = 0; j < n; ++j)
      if (j != i) v += 0.5 * game.G()(i, j) * (m(i) * m(j) + cov(i, j));
  }
  return v;
}

double oracle_grid_best_response(const NetworkGame& game, int i, Vector p, double step, double upper) {
  double best_x = game.p0();
  double best_u = -1e300;
  const long count = static_cast<long>(std::ceil((upper - game.p0()) / step));
  for (long t = 0; t <= count; ++t) {
    p(i) = game.p0() + static_cast<double>(t) * step;
    const double u = oracle_utility(game, p, i);
    if (u > best_u) {
      best_u = u;
      best_x = p(i);
    }
  }
  return best_x;
}

Vector oracle_two_player_outcomes(double d1, double d2, double g, double k) {
  // follower F (higher favorite): m_F = d_F + g m_L + k - 2 g k
  // leader L:                     m_L = d_L + g m_F + k
  const bool one_follows = d1 >= d2;
  const double dF = one_follows ? d1 : d2;
  const double dL = one_follows ? d2 : d1;
  const double mF = (dF + k - 2.0 * g * k + g * (dL + k)) / (1.0 - g * g);
  const double mL = dL + g * mF + k;
  Vector out(2);
  if (one_follows) {
    out << mF, mL;
  } else {
    out << mL, mF;
  }
  return out;
}

double distance_to_hull(const std::vector<Vector>& points, const Vector& q) {
  const int m = static_cast<int>(points.size());
  Vector lambda = Vector::Constant(m, 1.0 / m);
  auto combine = [&] {
    Vector x = Vector::Zero(q.size());
    for (int v = 0; v < m; ++v) x += lambda(v) * points[v];
    return x;
  };
  for (int it = 0; it < 20000 && m > 1; ++it) {
    const Vector r = combine() - q;
    int best = 0;
    double best_dot = r.dot(points[0]);
    for (int v = 1; v < m; ++v)
      if (r.dot(points[v]) < best_dot) {
        best_dot = r.dot(points[v]);
        best = v;
      }
    // exact line search towards the chosen vertex
    const Vector dir = points[best] - combine();
    const double dd = dir.squaredNorm();
    if (dd == 0.0) break;
    const double t = std::clamp(-r.dot(dir) / dd, 0.0, 1.0);
    if (t == 0.0) break;
    lambda *= 1.0 - t;
    lambda(best) += t;
  }
  return (combine() - q).norm();
}

}  // namespace testsupport
