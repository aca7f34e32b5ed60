#include "bmgame/best_response.hpp"

#include "bmgame/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace bmgame {

namespace {

struct OpponentLevel {
  double policy = 0.0;
  double load = 0.0;
  std::vector<int> players;
};

// Opponents above the status quo, grouped by policy (within tol), ascending.
std::vector<OpponentLevel> opponent_levels(const NetworkGame& game, int i, const Vector& p,
                                           double tol) {
  std::vector<int> idx;
  for (int j = 0; j < game.size(); ++j)
    if (j != i && p(j) > game.p0() + tol) idx.push_back(j);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return p(a) < p(b); });
  std::vector<OpponentLevel> levels;
  for (int j : idx) {
    if (!levels.empty() && p(j) - levels.back().policy <= tol) {
      levels.back().load += game.coupling()(i, j);
      levels.back().players.push_back(j);
    } else {
      levels.push_back({p(j), game.coupling()(i, j), {j}});
    }
  }
  return levels;
}

double opponent_target(const NetworkGame& game, int i, const Vector& p) {
  double a = game.d()(i);
  for (int j = 0; j < game.size(); ++j)
    if (j != i) a += game.G()(i, j) * game.mean(j, p(j));
  return a;
}

}  // namespace

double marginal_incentive(const NetworkGame& game, int i, const Vector& p, double own) {
  const double a = opponent_target(game, i, p);
  return -game.mu(i) * (a - game.mean(i, own)) + 0.5 * game.sigma()(i, i);
}

BestResponseResult best_response(const NetworkGame& game, int i, const Vector& p, double tol) {
  if (i < 0 || i >= game.size()) throw ValidationError("player index out of range");
  Vector q = p;
  q(i) = game.p0();
  check_profile(game, q, tol);

  const auto levels = opponent_levels(game, i, q, tol);
  const double mu = game.mu(i);
  const double a = opponent_target(game, i, q);
  const double half_var = 0.5 * game.sigma()(i, i);
  // phi(x) = phi0 + mu^2 (x - p0)
  const double phi0 = -mu * (a - game.X0()) + half_var;
  auto phi = [&](double x) { return phi0 + mu * mu * (x - game.p0()); };
  auto solve = [&](double load) { return game.p0() + (load - phi0) / (mu * mu); };

  const int r = static_cast<int>(levels.size());
  std::vector<double> above(r + 1, 0.0);  // load of levels t..r-1
  for (int t = r - 1; t >= 0; --t) above[t] = above[t + 1] + levels[t].load;

  const double scale = std::max({1.0, std::abs(phi0), above[0], mu * mu});
  const double ftol = tol * scale;

  struct Candidate {
    double policy;
    int level;       // tied level index, -1 if none
    double tie_frac; // fractional f for tied opponents
    double load;
  };
  std::vector<Candidate> cands;

  if (phi(game.p0()) >= above[0] - ftol) cands.push_back({game.p0(), -1, 0.0, 0.0});
  for (int t = 0; t <= r; ++t) {
    const double lo = (t == 0) ? game.p0() : levels[t - 1].policy;
    const double hi = (t == r) ? std::numeric_limits<double>::infinity() : levels[t].policy;
    const double x = solve(above[t]);
    if (x > lo + tol && x < hi - tol) cands.push_back({x, -1, 0.0, above[t]});
    if (t < r) {
      const double need = phi(hi);
      if (need >= above[t + 1] - ftol && need <= above[t] + ftol) {
        const double c = levels[t].load;
        const double frac = c > 0.0 ? std::clamp((need - above[t + 1]) / c, 0.0, 1.0) : 0.0;
        cands.push_back({hi, t, frac, std::clamp(need, above[t + 1], above[t])});
      }
    }
  }
  if (cands.empty()) throw SolverError("best response: no admissible regime");

  // With nonnegative couplings exactly one regime survives up to boundary
  // duplicates; pick the best payoff to stay robust to rounding.
  const Candidate* best = nullptr;
  double best_u = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    q(i) = c.policy;
    const double u = expected_utility(game, q, i).total;
    if (!best || u > best_u + 1e-14 * std::max(1.0, std::abs(u))) {
      best = &c;
      best_u = u;
    }
  }

  BestResponseResult res;
  res.policy = best->policy;
  res.expected_outcome = game.mean(i, best->policy);
  res.at_corner = best->policy <= game.p0();
  res.load = best->load;
  res.regime = Vector::Zero(game.size());
  for (int j = 0; j < game.size(); ++j) {
    if (j == i) continue;
    if (q(j) > res.policy + tol) res.regime(j) = 1.0;
  }
  if (best->level >= 0) {
    const auto& lvl = levels[best->level];
    res.at_kink = lvl.players.front();
    for (int j : lvl.players) res.regime(j) = game.coupling()(i, j) > 0.0 ? best->tie_frac : 0.0;
  }
  return res;
}

Vector best_response_map(const NetworkGame& game, const Vector& p, double tol) {
  Vector out(game.size());
  for (int i = 0; i < game.size(); ++i) out(i) = best_response(game, i, p, tol).policy;
  return out;
}

double best_response_upper_bound(const NetworkGame& game, int i, const Vector& p) {
  const double a = opponent_target(game, i, p);
  const auto& K = game.derived().K;
  double m_lo = a + K(i, i);
  double top = game.p0();
  for (int j = 0; j < game.size(); ++j) {
    if (j == i) continue;
    m_lo -= 2.0 * std::max(0.0, game.G()(i, j) * K(i, j));
    top = std::max(top, p(j));
  }
  const double own = game.p0() + std::max(0.0, game.X0() - m_lo) / std::abs(game.mu(i));
  return std::max({own, top, policy_upper_bound(game)});
}

double br_grid_oracle(const NetworkGame& game, int i, const Vector& p, double step, double radius) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  const double upper = radius > 0.0 ? game.p0() + radius : best_response_upper_bound(game, i, p);
  const auto count = static_cast<long>(std::ceil((upper - game.p0()) / step));
  Vector q = p;
  double best_x = game.p0();
  double best_u = -std::numeric_limits<double>::infinity();
  for (long t = 0; t <= count; ++t) {
    q(i) = game.p0() + static_cast<double>(t) * step;
    const double u = expected_utility(game, q, i).total;
    if (u > best_u) {
      best_u = u;
      best_x = q(i);
    }
  }
  return best_x;
}

double best_response_slack(const NetworkGame& game, int i, const Vector& p, const Vector& f_row) {
  const auto& K = game.derived().K;
  double rhs = opponent_target(game, i, p) + K(i, i);
  for (int j = 0; j < game.size(); ++j)
    if (j != i) rhs -= 2.0 * game.G()(i, j) * K(i, j) * f_row(j);
  return rhs - game.mean(i, p(i));
}

}  // namespace bmgame
