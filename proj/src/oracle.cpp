#include "bmgame/oracle.hpp"

#include "bmgame/payoff.hpp"

#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <vector>

namespace bmgame {

namespace {

constexpr double kEigenClip = -1e-10;

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

std::mt19937_64 block_engine(std::uint64_t seed, std::int64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block & 0xffffffff),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(block) >> 32)};
  return std::mt19937_64(seq);
}

using Integrand = std::function<double(const Vector&)>;

McEstimate mc_average(const NetworkGame& game, const Vector& p, const McOptions& opts,
                      const Integrand& f) {
  if (opts.n_samples < 2) throw ValidationError("n_samples must be at least 2");
  if (opts.block_size < 1) throw ValidationError("block_size must be positive");
  const OutcomeMoments om = outcome_moments(game, p);
  const Matrix A = covariance_factor(om.cov);
  const auto n = game.size();

  const std::int64_t blocks = (opts.n_samples + opts.block_size - 1) / opts.block_size;
  auto run_block = [&](std::int64_t b) {
    auto eng = block_engine(opts.seed, b);
    std::normal_distribution<double> normal;
    const std::int64_t begin = b * opts.block_size;
    const std::int64_t end = std::min(opts.n_samples, begin + opts.block_size);
    Welford w;
    Vector z(n), x(n);
    for (std::int64_t s = begin; s < end; ++s) {
      for (int j = 0; j < n; ++j) z(j) = normal(eng);
      x.noalias() = om.mean + A * z;
      w.add(f(x));
    }
    return w;
  };

  std::vector<Welford> parts(static_cast<std::size_t>(blocks));
  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) parts[b] = run_block(b);
  } else {
    for (std::int64_t start = 0; start < blocks; start += threads) {
      std::vector<std::future<Welford>> futs;
      for (std::int64_t b = start; b < std::min(blocks, start + threads); ++b)
        futs.push_back(std::async(std::launch::async, run_block, b));
      for (std::size_t t = 0; t < futs.size(); ++t) parts[start + t] = futs[t].get();
    }
  }

  Welford total;
  for (const auto& w : parts) total.merge(w);

  McEstimate est;
  est.mean = total.mean;
  est.n_samples = total.n;
  est.seed = opts.seed;
  const double var = total.m2 / static_cast<double>(total.n - 1);
  est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(total.n));
  return est;
}

}  // namespace

Matrix covariance_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition of covariance failed");
  Vector lambda = es.eigenvalues();
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < kEigenClip * scale) throw ValidationError("covariance is not positive semidefinite");
    lambda(i) = std::sqrt(std::max(0.0, lambda(i)));
  }
  return es.eigenvectors() * lambda.asDiagonal();
}

Matrix sample_outcomes(const NetworkGame& game, const Vector& p, std::int64_t n_samples,
                       std::uint64_t seed) {
  const OutcomeMoments om = outcome_moments(game, p);
  const Matrix A = covariance_factor(om.cov);
  auto eng = block_engine(seed, 0);
  std::normal_distribution<double> normal;
  Matrix out(n_samples, game.size());
  Vector z(game.size());
  for (std::int64_t s = 0; s < n_samples; ++s) {
    for (int j = 0; j < game.size(); ++j) z(j) = normal(eng);
    out.row(s) = (om.mean + A * z).transpose();
  }
  return out;
}

McEstimate mc_expectation(const NetworkGame& game, const Vector& p,
                          const std::function<double(const Vector&)>& f, const McOptions& opts) {
  return mc_average(game, p, opts, f);
}

McEstimate mc_payoff(const NetworkGame& game, const Vector& p, int i, const McOptions& opts) {
  if (i < 0 || i >= game.size()) throw ValidationError("player index out of range");
  return mc_average(game, p, opts, [&](const Vector& x) { return realized_utility(game, x, i); });
}

McEstimate mc_potential(const NetworkGame& game, const Vector& p, const McOptions& opts) {
  if (!game.symmetric()) throw ValidationError("potential requires a symmetric G");
  return mc_average(game, p, opts, [&](const Vector& x) { return realized_potential(game, x); });
}

}  // namespace bmgame
