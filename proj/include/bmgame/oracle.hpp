#pragma once

#include "bmgame/game.hpp"

#include <cstdint>
#include <functional>

namespace bmgame {

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n_samples)
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Sampling is split into fixed-size blocks; block b draws from an
/// mt19937_64 seeded with seed_seq{seed, b}, and block statistics are merged
/// in block order. Estimates are therefore bit-identical for a given seed
/// regardless of `threads`.
struct McOptions {
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t block_size = 8192;
};

/// Symmetric square root A (A A' = cov) from an eigendecomposition.
/// Eigenvalues in [-1e-10, 0) are clipped to zero; anything lower throws.
Matrix covariance_factor(const Matrix& cov);

/// Draws n_samples outcome vectors (one per row) at profile p.
Matrix sample_outcomes(const NetworkGame& game, const Vector& p, std::int64_t n_samples,
                       std::uint64_t seed);

/// Monte Carlo estimate of E f(X(p)) for an arbitrary integrand.
McEstimate mc_expectation(const NetworkGame& game, const Vector& p,
                          const std::function<double(const Vector&)>& f, const McOptions& opts = {});

/// Monte Carlo estimate of U_i(p).
McEstimate mc_payoff(const NetworkGame& game, const Vector& p, int i, const McOptions& opts = {});

/// Monte Carlo estimate of V(p).
McEstimate mc_potential(const NetworkGame& game, const Vector& p, const McOptions& opts = {});

}  // namespace bmgame
