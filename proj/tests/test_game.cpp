#include "support.hpp"

#include "bmgame/game.hpp"

#include <doctest.h>

using namespace bmgame;
using doctest::Approx;

TEST_CASE("derived quantities of the two-player reference game") {
  const auto game = testsupport::pair_game();
  const auto& dq = game.derived();
  CHECK(dq.k == Approx(0.6).epsilon(1e-12));
  CHECK(dq.beta(0) == Approx(2.625).epsilon(1e-12));
  CHECK(dq.beta(1) == Approx(1.875).epsilon(1e-12));
  CHECK(dq.u(0) == Approx(1.5).epsilon(1e-12));
  CHECK(dq.u(1) == Approx(1.5).epsilon(1e-12));
  CHECK(((Matrix::Identity(2, 2) - game.G()) * dq.M - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dq.K.array() - 0.6).abs().maxCoeff() < 1e-12);
  CHECK_FALSE(game.generalized());
}

TEST_CASE("empty network leaves favorites as centralities") {
  GameSpec s;
  s.G = Matrix::Zero(3, 3);
  s.d = Vector(3);
  s.d << 1.0, 2.0, 3.0;
  s.mu = -1.0;
  s.sigma2 = 1.0;
  const auto game = build_game(s);
  CHECK(game.derived().M.isIdentity(1e-14));
  CHECK((game.derived().beta - s.d).norm() == 0.0);
}

TEST_CASE("uniform weight 1/3 among three players gives u = 3") {
  GameSpec s;
  s.G = Matrix::Constant(3, 3, 1.0 / 3.0);
  s.G.diagonal().setZero();
  s.d = Vector::Zero(3);
  s.mu = -1.0;
  s.sigma2 = 1.0;
  const auto game = build_game(s);
  for (int i = 0; i < 3; ++i) CHECK(game.derived().u(i) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("validation rejects bad games") {
  GameSpec s;
  s.G = Matrix::Zero(2, 2);
  s.d = Vector::Zero(2);
  s.mu = -1.0;
  s.sigma2 = 1.0;
  CHECK_NOTHROW(build_game(s));

  auto bad = s;
  bad.G(0, 1) = -0.1;
  CHECK_THROWS_AS(build_game(bad), ValidationError);
  bad = s;
  bad.G(0, 0) = 0.1;
  CHECK_THROWS_AS(build_game(bad), ValidationError);
  bad = s;
  bad.mu = 0.0;
  CHECK_THROWS_AS(build_game(bad), ValidationError);
  bad = s;
  bad.sigma2 = 0.0;
  CHECK_THROWS_AS(build_game(bad), ValidationError);
  bad = s;
  bad.G(0, 1) = bad.G(1, 0) = 1.0;  // I - G singular
  CHECK_THROWS_AS(build_game(bad), ValidationError);
  bad = s;
  bad.sigma_pairs = Matrix::Ones(2, 2);
  (*bad.sigma_pairs)(0, 1) = 0.5;
  CHECK_THROWS_AS(build_game(bad), ValidationError);  // not symmetric
  bad = s;
  bad.mu_vec = Vector(2);
  *bad.mu_vec << -1.0, 0.5;
  CHECK_THROWS_AS(build_game(bad), ValidationError);
}

TEST_CASE("generalized mode") {
  GameSpec s;
  s.G = Matrix::Zero(2, 2);
  s.G(0, 1) = s.G(1, 0) = 0.25;
  s.d = Vector::Ones(2);
  s.sigma_pairs = Matrix(2, 2);
  *s.sigma_pairs << 2.0, 0.0, 0.0, 1.0;
  s.mu_vec = Vector(2);
  *s.mu_vec << -1.0, -2.0;
  const auto game = build_game(s);
  CHECK(game.generalized());
  CHECK(game.derived().K(0, 0) == Approx(1.0));
  CHECK(game.derived().K(1, 1) == Approx(0.25));
  CHECK(game.derived().K(0, 1) == 0.0);
  Vector p(2);
  p << 1.0, 2.0;
  const auto om = outcome_moments(game, p);
  CHECK(om.cov(0, 1) == 0.0);
  CHECK(om.cov(0, 0) == Approx(2.0));
  CHECK(om.mean(1) == Approx(-4.0));
}

TEST_CASE("outcome moments") {
  const auto game = testsupport::pair_game();
  Vector p(2);
  p << 0.5, 1.0;
  const auto om = outcome_moments(game, p);
  CHECK(om.mean(0) == Approx(3.0));
  CHECK(om.mean(1) == Approx(2.0));
  CHECK(om.cov(0, 0) == Approx(1.2));
  CHECK(om.cov(1, 1) == Approx(2.4));
  CHECK(om.cov(0, 1) == Approx(1.2));

  const auto sq = outcome_moments(game, Vector::Zero(2));
  CHECK(sq.mean.isApprox(Vector::Constant(2, 4.0)));
  CHECK(sq.cov.isZero(0.0));

  Vector below(2);
  below << -0.1, 0.0;
  CHECK_THROWS_AS(outcome_moments(game, below), ValidationError);
}

TEST_CASE("followership predicates") {
  Followership f;
  f.F = Matrix::Zero(2, 2);
  f.F(0, 1) = 1.0;
  Vector p(2);
  p << 0.4, 0.7;
  CHECK(f.consistent(p));
  CHECK(f.skew_complementary());
  Vector swapped(2);
  swapped << 0.7, 0.4;
  CHECK_FALSE(f.consistent(swapped));
  f.F(1, 0) = 0.5;
  CHECK_FALSE(f.skew_complementary());
  const auto game = testsupport::pair_game();
  CHECK(f.load(game.G())(0) == Approx(1.0 / 3.0));
}

TEST_CASE("policy bound covers the reference equilibria") {
  CHECK(policy_upper_bound(testsupport::pair_game()) == Approx(0.9125));
  CHECK(policy_upper_bound(testsupport::tied_pair_game()) == Approx(1.85));
}
