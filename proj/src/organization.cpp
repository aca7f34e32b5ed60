#include "bmgame/organization.hpp"

#include "bmgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

namespace bmgame {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GameSpec two_player_spec(const Vector& d, double weight, const OrgSpec& org) {
  GameSpec s;
  s.G = Matrix::Zero(2, 2);
  s.G(0, 1) = s.G(1, 0) = weight;
  s.d = d;
  s.mu = org.mu;
  s.sigma2 = org.sigma2;
  s.p0 = org.p0;
  s.X0 = org.X0;
  return s;
}

OrgSpec with_k(OrgSpec org, double k) {
  org.sigma2 = 2.0 * std::abs(org.mu) * k;
  return org;
}

}  // namespace

void validate_org(const OrgSpec& org) {
  for (double x : {org.a1, org.a2, org.b, org.c1, org.c2, org.g, org.mu, org.sigma2, org.p0, org.X0})
    if (!std::isfinite(x)) throw ValidationError("organization parameters must be finite");
  if (!(org.b > 0.0)) throw ValidationError("price-elasticity parameter b must be positive");
  if (!(org.c1 > 0.0) || !(org.c2 > 0.0)) throw ValidationError("marginal-cost parameters must be positive");
  if (org.g < 0.0) throw ValidationError("cost externality g must be nonnegative");
  if (org.b * org.g >= 1.0) throw ValidationError("cost externality must satisfy b g < 1");
  if (!(org.mu < 0.0)) throw ValidationError("drift mu must be strictly negative");
  if (!(org.sigma2 > 0.0)) throw ValidationError("variance parameter sigma2 must be positive");
}

OrgGames org_to_game(const OrgSpec& org) {
  validate_org(org);
  Vector d(2);
  d << org.b * (org.a1 - org.c1) / 2.0, org.b * (org.a2 - org.c2) / 2.0;
  const double g_hat = org.b * org.g / 2.0;
  return {build_game(two_player_spec(d, g_hat, org)), build_game(two_player_spec(d, 2.0 * g_hat, org)),
          d, g_hat};
}

ProfitBreakdown expected_profit(const OrgSpec& org, const Vector& p) {
  const OrgGames games = org_to_game(org);
  const OutcomeMoments om = outcome_moments(games.game, p);
  const double a[2] = {org.a1, org.a2};
  const double c[2] = {org.c1, org.c2};
  double pi[2];
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const double m = om.mean(i);
    pi[i] = (a[i] - c[i]) * m - (m * m + om.cov(i, i)) / org.b +
            org.g * (m * om.mean(j) + om.cov(i, j));
  }
  return {pi[0], pi[1], pi[0] + pi[1]};
}

double realized_profit(const OrgSpec& org, const Vector& q, int i) {
  const double a = i == 0 ? org.a1 : org.a2;
  const double c = i == 0 ? org.c1 : org.c2;
  return (a - q(i) / org.b - c + org.g * q(1 - i)) * q(i);
}

PotentialResult profit_maximizer(const OrgSpec& org, double tol) {
  return maximize_potential(org_to_game(org).doubled, {}, tol);
}

OrgClosedForm org_closed_form(const Vector& d, double g_hat, double k, double tol) {
  const int hi = d(0) >= d(1) ? 0 : 1;
  const int lo = 1 - hi;
  const double spread = d(hi) - d(lo);
  OrgClosedForm cf;

  auto follower_leader = [&](double w, Vector& m) {
    m.resize(2);
    const double beta_hi = (d(hi) + w * d(lo)) / (1.0 - w * w);
    const double beta_lo = (d(lo) + w * d(hi)) / (1.0 - w * w);
    m(hi) = beta_hi + k / (1.0 + w);
    m(lo) = beta_lo + k * (1.0 + 2.0 * w) / (1.0 + w);
  };

  cf.multiple = spread <= 2.0 * g_hat * k + tol;
  follower_leader(g_hat, cf.equilibrium);
  cf.segment_lo = (d(hi) + (1.0 - 2.0 * g_hat) * k) / (1.0 - g_hat);
  cf.segment_hi = (d(lo) + k) / (1.0 - g_hat);

  cf.doubled_tie = spread <= 4.0 * g_hat * k + tol;
  if (cf.doubled_tie) {
    const double e = (d(0) + d(1)) / (2.0 * (1.0 - 2.0 * g_hat)) + k;
    cf.maximizer = Vector::Constant(2, e);
  } else {
    follower_leader(2.0 * g_hat, cf.maximizer);
  }

  if (g_hat == 0.0) {
    cf.implementable = true;
  } else if (cf.multiple && cf.doubled_tie) {
    const double e = cf.maximizer(0);
    cf.implementable = e >= cf.segment_lo - tol && e <= cf.segment_hi + tol;
  }
  return cf;
}

ThresholdResult decentralization_threshold(const OrgSpec& org, bool bisect, double tol) {
  const OrgGames games = org_to_game(org);
  const Vector& d = games.d;
  const double gh = games.g_hat;
  const double d_hi = d.maxCoeff(), d_lo = d.minCoeff();
  const double abs_mu = std::abs(org.mu);

  ThresholdResult res;
  if (gh == 0.0) {
    res.binding = "separable";
    res.onset_sigma2 = d_hi == d_lo ? 0.0 : std::numeric_limits<double>::infinity();
    res.doubled_switch_sigma2 = res.onset_sigma2;
  } else {
    res.onset_sigma2 = abs_mu * (d_hi - d_lo) / gh;
    res.doubled_switch_sigma2 = abs_mu * (d_hi - d_lo) / (2.0 * gh);
    const double s = (d_hi + d_lo) / (2.0 * (1.0 - 2.0 * gh));
    const double upper_end = ((1.0 - gh) * s - d_lo) / gh;  // E* <= top of segment
    const double lower_end = (d_hi - (1.0 - gh) * s) / gh;  // E* >= bottom of segment
    const double multiplicity = (d_hi - d_lo) / (2.0 * gh);
    const double doubled = (d_hi - d_lo) / (4.0 * gh);
    res.k = std::max({upper_end, lower_end, multiplicity, doubled, 0.0});
    res.binding = res.k == multiplicity && res.k > std::max(upper_end, lower_end)
                      ? "multiplicity"
                      : "maximizer-in-segment";
  }
  res.sigma2 = 2.0 * abs_mu * res.k;

  // Largest k for which every closed-form outcome stays at or below X0.
  auto interior_at = [&](double k) {
    const OrgClosedForm cf = org_closed_form(d, gh, k, tol);
    double top = cf.maximizer.maxCoeff();
    top = std::max(top, cf.multiple ? cf.segment_hi : cf.equilibrium.maxCoeff());
    return top <= org.X0 + tol;
  };
  if (!interior_at(0.0)) throw SolverError("organization is not interior even without uncertainty");
  double lo = 0.0, hi = 1.0;
  while (interior_at(hi) && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (interior_at(mid) ? lo : hi) = mid;
  }
  res.interior_limit_k = lo;
  if (res.k > res.interior_limit_k + tol)
    throw SolverError("no finite decentralization threshold inside the interior region");

  if (bisect) {
    auto implementable = [&](double k) {
      const OrgSpec at = with_k(org, k);
      const Vector p = profit_maximizer(at, tol).profile;
      return verify_equilibrium(org_to_game(at).game, p, tol).equilibrium;
    };
    const double k_max = std::min(res.interior_limit_k, 2.0 * res.k + 1.0);
    const int points = 200;
    const double k_min = 1e-6 * std::max(1.0, k_max);
    double prev = k_min;
    for (int t = 0; t <= points; ++t) {
      const double k = k_min + (k_max - k_min) * t / points;
      if (!implementable(k)) {
        prev = k;
        continue;
      }
      if (t == 0) {
        res.bisection_k = 0.0;
        break;
      }
      double a = prev, b = k;
      while (b - a > 1e-11 * std::max(1.0, b)) {
        const double mid = 0.5 * (a + b);
        (implementable(mid) ? b : a) = mid;
      }
      res.bisection_k = b;
      break;
    }
  }
  return res;
}

OrgReport analyze_org(const OrgSpec& org, double tol) {
  OrgReport r{org_to_game(org), {}, {}, {}, {}, false, false, false};
  r.optimum = maximize_potential(r.games.doubled, {}, tol);
  r.p_opt = r.optimum.profile;
  r.profit_at_opt = expected_profit(org, r.p_opt);
  r.threshold = decentralization_threshold(org, true, tol);
  r.is_implementable = verify_equilibrium(r.games.game, r.p_opt, tol).equilibrium;
  r.interior = (r.p_opt.array() > org.p0 + tol).all();
  const double k = r.games.game.derived().k;
  r.multiplicity_ok = r.games.d.maxCoeff() <= r.games.d.minCoeff() + 2.0 * k * r.games.g_hat + tol;
  return r;
}

std::vector<SweepRow> sweep_sigma(const OrgSpec& org, const std::vector<double>& sigma2_grid,
                                  double tol) {
  OrgSpec base = org;
  base.sigma2 = 1.0;  // the grid supplies the variance; keep validation happy
  const OrgGames games = org_to_game(base);
  const Vector& d = games.d;
  const double gh = games.g_hat;
  const double abs_mu = std::abs(org.mu);
  const double spread = d.maxCoeff() - d.minCoeff();
  auto policy = [&](double m) { return org.p0 + (org.X0 - m) / abs_mu; };

  std::vector<SweepRow> rows;
  rows.reserve(sigma2_grid.size());
  for (double s2 : sigma2_grid) {
    if (!(s2 >= 0.0) || !std::isfinite(s2)) throw ValidationError("sigma2 grid values must be finite and >= 0");
    SweepRow row{};
    row.sigma2 = s2;
    row.k = s2 / (2.0 * abs_mu);
    row.p1_star = row.p2_star = row.L = row.U = row.r1_star = row.r2_star = row.r_star = kNaN;
    const OrgClosedForm cf = org_closed_form(d, gh, row.k, tol);
    const bool eq_boundary = std::abs(spread - 2.0 * gh * row.k) <= tol;
    const bool pot_boundary = std::abs(spread - 4.0 * gh * row.k) <= tol;
    if (!cf.multiple || eq_boundary) {
      row.p1_star = policy(cf.equilibrium(0));
      row.p2_star = policy(cf.equilibrium(1));
    }
    if (cf.multiple) {
      row.L = policy(cf.segment_hi);
      row.U = policy(cf.segment_lo);
    }
    if (cf.doubled_tie) {
      row.r_star = policy(cf.maximizer(0));
      if (pot_boundary) {
        Vector m(2);
        const int hi = d(0) >= d(1) ? 0 : 1;
        const double w = 2.0 * gh;
        m(hi) = (d(hi) + w * d(1 - hi)) / (1.0 - w * w) + row.k / (1.0 + w);
        m(1 - hi) = (d(1 - hi) + w * d(hi)) / (1.0 - w * w) + row.k * (1.0 + 2.0 * w) / (1.0 + w);
        row.r1_star = policy(m(0));
        row.r2_star = policy(m(1));
      }
    } else {
      row.r1_star = policy(cf.maximizer(0));
      row.r2_star = policy(cf.maximizer(1));
    }
    if (cf.implementable && gh > 0.0) {
      row.branch = "implementable";
    } else {
      row.branch = cf.multiple ? "multiple" : "unique";
    }
    row.interior = true;
    for (double x : {row.p1_star, row.p2_star, row.L, row.U, row.r1_star, row.r2_star, row.r_star})
      if (!std::isnan(x) && x < org.p0 - tol) row.interior = false;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(12);
  auto num = [&](double x) {
    if (std::isnan(x)) {
      out << "nan";
    } else {
      out << x;
    }
  };
  out << "sigma2,k,p1_star,p2_star,L,U,r1_star,r2_star,r_star,branch,interior\n";
  for (const auto& r : rows) {
    for (double x : {r.sigma2, r.k, r.p1_star, r.p2_star, r.L, r.U, r.r1_star, r.r2_star, r.r_star}) {
      num(x);
      out << ',';
    }
    out << r.branch << ',' << (r.interior ? "true" : "false") << '\n';
  }
  os << out.str();
}

}  // namespace bmgame
