#include "bmgame/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bmgame {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

bool NetworkGame::symmetric(double tol) const {
  return (G_ - G_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Vector NetworkGame::means(const Vector& p) const {
  return (X0_ + (mu_.array() * (p.array() - p0_))).matrix();
}

Vector NetworkGame::policies_for_means(const Vector& m) const {
  return (p0_ + (m.array() - X0_) / mu_.array()).matrix();
}

NetworkGame build_game(const GameSpec& spec, double max_condition) {
  const auto n = spec.d.size();
  require(n >= 1, "game needs at least one player");
  require(spec.G.rows() == n && spec.G.cols() == n, "G must be n x n");
  require(all_finite(spec.G) && spec.d.allFinite(), "G and d must be finite");
  require(std::isfinite(spec.mu) && std::isfinite(spec.sigma2) && std::isfinite(spec.p0) &&
              std::isfinite(spec.X0),
          "scalar parameters must be finite");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(spec.G(i, i) == 0.0, "G must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (spec.G(i, j) < 0.0) {
        std::ostringstream os;
        os << "negative interaction weight g(" << i + 1 << "," << j + 1 << ")";
        throw ValidationError(os.str());
      }
    }
  }

  NetworkGame game;
  game.spec_ = spec;
  game.G_ = spec.G;
  game.d_ = spec.d;
  game.p0_ = spec.p0;
  game.X0_ = spec.X0;
  game.sigma2_ = spec.sigma2;
  game.generalized_ = spec.sigma_pairs.has_value() || spec.mu_vec.has_value();

  if (spec.mu_vec) {
    require(spec.mu_vec->size() == n, "mu_vec must have n entries");
    require(spec.mu_vec->allFinite(), "mu_vec must be finite");
    require((spec.mu_vec->array() < 0.0).all(), "drift must be strictly negative");
    game.mu_ = *spec.mu_vec;
  } else {
    require(spec.mu < 0.0, "drift mu must be strictly negative");
    game.mu_ = Vector::Constant(n, spec.mu);
  }

  if (spec.sigma_pairs) {
    const Matrix& s = *spec.sigma_pairs;
    require(s.rows() == n && s.cols() == n, "sigma_pairs must be n x n");
    require(all_finite(s), "sigma_pairs must be finite");
    require((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "sigma_pairs must be symmetric");
    require((s.diagonal().array() > 0.0).all(), "sigma_pairs diagonal must be positive");
    require((s.array() >= 0.0).all(), "sigma_pairs entries must be nonnegative");
    game.sigma_ = s;
  } else {
    require(spec.sigma2 > 0.0, "variance parameter sigma2 must be positive");
    game.sigma_ = Matrix::Constant(n, n, spec.sigma2);
  }

  const Matrix A = Matrix::Identity(n, n) - game.G_;
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > max_condition) {
    throw ValidationError("I - G is numerically singular");
  }

  auto& dq = game.derived_;
  dq.M = A.inverse();
  dq.beta = dq.M * game.d_;
  dq.u = dq.M * Vector::Ones(n);
  dq.K.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) dq.K(i, j) = -game.sigma_(i, j) / (2.0 * game.mu_(i));
  dq.k = game.generalized_ ? dq.K.diagonal().mean() : spec.sigma2 / (2.0 * std::abs(spec.mu));
  game.coupling_ = game.G_.cwiseProduct(game.sigma_);
  return game;
}

void check_profile(const NetworkGame& game, const Vector& p, double tol) {
  if (p.size() != game.size()) throw ValidationError("profile must have n entries");
  if (!p.allFinite()) throw ValidationError("profile entries must be finite");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < game.p0() - tol) {
      std::ostringstream os;
      os << "policy of player " << i + 1 << " is below the status quo";
      throw ValidationError(os.str());
    }
  }
}

OutcomeMoments outcome_moments(const NetworkGame& game, const Vector& p) {
  check_profile(game, p);
  const auto n = game.size();
  OutcomeMoments out;
  out.mean = game.means(p);
  out.cov.resize(n, n);
  const Vector x = (p.array() - game.p0()).max(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.cov(i, j) = game.sigma()(i, j) * std::min(x(i), x(j));
  return out;
}

bool Followership::consistent(const Vector& p, double tol) const {
  const auto n = p.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || !(p(i) < p(j) - tol)) continue;
      if (std::abs(F(i, j) - 1.0) > tol || std::abs(F(j, i)) > tol) return false;
    }
  }
  return true;
}

bool Followership::skew_complementary(double tol) const {
  for (Eigen::Index i = 0; i < F.rows(); ++i)
    for (Eigen::Index j = i + 1; j < F.cols(); ++j)
      if (std::abs(F(i, j) + F(j, i) - 1.0) > tol) return false;
  return true;
}

Vector Followership::load(const Matrix& G) const {
  Matrix GF = G.cwiseProduct(F);
  GF.diagonal().setZero();
  return GF.rowwise().sum();
}

double policy_upper_bound(const NetworkGame& game) {
  // The interior equation m = M (d + diag K - 2 (G o K o F) 1) is linear in
  // F, so its minimum over the box sets each f_jl to 0 or 1 by the sign of
  // the coefficient -2 m_ij g_jl k_jl.
  const auto& dq = game.derived();
  const auto n = game.size();
  const Matrix GK = game.G().cwiseProduct(dq.K);
  double xbar = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double x = 0.0;
    for (int j = 0; j < n; ++j) {
      x += dq.M(i, j) * (game.d()(j) + dq.K(j, j));
      for (int l = 0; l < n; ++l) {
        if (l == j) continue;
        x += std::min(0.0, -2.0 * dq.M(i, j) * GK(j, l));
      }
    }
    xbar = std::min(xbar, x);
  }
  const double gap = std::max(0.0, game.X0() - xbar);
  return game.p0() + gap / game.mu().cwiseAbs().minCoeff();
}

}  // namespace bmgame
