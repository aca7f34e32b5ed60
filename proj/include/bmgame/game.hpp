#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace bmgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default absolute tolerance for equality tests in policy and outcome space.
inline constexpr double kDefaultTol = 1e-9;

/// Condition-number ceiling above which I - G is treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// Raised when a game, profile or organization fails validation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a solver cannot produce a result for valid input.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw game fields as read from a spec file. The main model uses a scalar
/// drift and variance; supplying `sigma_pairs` or `mu_vec` switches on the
/// generalized model with player-specific drifts and pairwise covariances.
struct GameSpec {
  Matrix G;
  Vector d;
  double mu = -1.0;
  double sigma2 = 1.0;
  double p0 = 0.0;
  double X0 = 0.0;
  std::optional<Matrix> sigma_pairs;
  std::optional<Vector> mu_vec;
};

struct DerivedQuantities {
  Matrix M;     // (I - G)^-1
  Vector beta;  // M d
  double k = 0.0;
  Matrix K;  // k_ij = -sigma_ij / (2 mu_i)
  Vector u;  // M 1
};

struct OutcomeMoments {
  Vector mean;
  Matrix cov;
};

/// A validated game. Immutable after construction; build with build_game().
class NetworkGame {
 public:
  int size() const { return static_cast<int>(d_.size()); }
  const Matrix& G() const { return G_; }
  const Vector& d() const { return d_; }
  /// Per-player drifts (all equal in the main model).
  const Vector& mu() const { return mu_; }
  double mu(int i) const { return mu_(i); }
  /// Pairwise covariance rates; every entry equals sigma2 in the main model.
  const Matrix& sigma() const { return sigma_; }
  double sigma2() const { return sigma2_; }
  double p0() const { return p0_; }
  double X0() const { return X0_; }
  bool generalized() const { return generalized_; }
  const DerivedQuantities& derived() const { return derived_; }
  const GameSpec& spec() const { return spec_; }

  /// c_ij = g_ij sigma_ij, the slope drop (halved) of U_i at the kink p_j.
  const Matrix& coupling() const { return coupling_; }

  bool symmetric(double tol = kDefaultTol) const;

  double mean(int i, double policy) const { return X0_ + mu_(i) * (policy - p0_); }
  double policy_for_mean(int i, double mean) const { return p0_ + (mean - X0_) / mu_(i); }
  Vector means(const Vector& p) const;
  Vector policies_for_means(const Vector& m) const;

 private:
  friend NetworkGame build_game(const GameSpec& spec, double max_condition);

  GameSpec spec_;
  Matrix G_;
  Vector d_;
  Vector mu_;
  Matrix sigma_;
  Matrix coupling_;
  double sigma2_ = 0.0;
  double p0_ = 0.0;
  double X0_ = 0.0;
  bool generalized_ = false;
  DerivedQuantities derived_;
};

/// Validates raw fields and computes M, beta, k, K and u.
/// Throws ValidationError on negative weights, nonzero diagonal, mu >= 0,
/// sigma2 <= 0, negative pairwise covariance rates, or a numerically
/// singular I - G.
NetworkGame build_game(const GameSpec& spec, double max_condition = kMaxCondition);

/// Throws ValidationError unless p has n finite entries with p_i >= p0 - tol.
void check_profile(const NetworkGame& game, const Vector& p, double tol = kDefaultTol);

/// Mean and covariance of the outcome vector at policy profile p.
OutcomeMoments outcome_moments(const NetworkGame& game, const Vector& p);

/// A matrix F in [0,1]^{n x n}; f_ij = 1 records that i follows j
/// (p_i < p_j). Diagonal entries are ignored.
struct Followership {
  Matrix F;

  /// p_i < p_j (beyond tol) implies f_ij = 1 and f_ji = 0.
  bool consistent(const Vector& p, double tol = kDefaultTol) const;
  /// f_ij + f_ji = 1 for all i != j.
  bool skew_complementary(double tol = kDefaultTol) const;
  /// v = (G o F) 1.
  Vector load(const Matrix& G) const;
};

/// Upper policy bound: every equilibrium and potential maximizer lies in
/// [p0, bound]. Uses the smallest expected outcome reachable by the
/// interior equilibrium equation over all followerships.
double policy_upper_bound(const NetworkGame& game);

}  // namespace bmgame
