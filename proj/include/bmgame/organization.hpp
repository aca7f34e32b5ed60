#pragma once

#include "bmgame/game.hpp"
#include "bmgame/potential.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bmgame {

/// Two divisions with inverse demand a_i - q_i / b and cost c_i q_i - g q_1 q_2;
/// quantities are the outcomes of the policy game.
struct OrgSpec {
  double a1 = 0.0, a2 = 0.0;
  double b = 1.0;
  double c1 = 0.0, c2 = 0.0;
  double g = 0.0;  // cost externality
  double mu = -1.0;
  double sigma2 = 1.0;
  double p0 = 0.0;
  double X0 = 0.0;
};

/// The best-response equivalent game (d_i = b (a_i - c_i) / 2, g_hat = b g / 2)
/// and its doubled variant (weight 2 g_hat), whose potential is b W / 2.
struct OrgGames {
  NetworkGame game;
  NetworkGame doubled;
  Vector d;
  double g_hat = 0.0;
};

void validate_org(const OrgSpec& org);
OrgGames org_to_game(const OrgSpec& org);

struct ProfitBreakdown {
  double profit1 = 0.0;
  double profit2 = 0.0;
  double total = 0.0;
};

ProfitBreakdown expected_profit(const OrgSpec& org, const Vector& p);
double realized_profit(const OrgSpec& org, const Vector& q, int i);

/// Total-profit maximizer p^O: the potential maximizer of the doubled game.
PotentialResult profit_maximizer(const OrgSpec& org, double tol = kDefaultTol);

/// Closed-form two-player quantities at complexity k, in expected-outcome
/// space. Players are labelled so that index 0 has the larger favorite.
struct OrgClosedForm {
  bool multiple = false;     // tie segment instead of a unique equilibrium
  bool doubled_tie = false;  // profit maximizer has both divisions tied
  Vector equilibrium;        // unique branch
  double segment_lo = 0.0;   // tie branch: common outcome range
  double segment_hi = 0.0;
  Vector maximizer;          // p^O outcomes
  bool implementable = false;
};

OrgClosedForm org_closed_form(const Vector& d, double g_hat, double k, double tol = kDefaultTol);

struct ThresholdResult {
  double k = 0.0;       // C in complexity units
  double sigma2 = 0.0;  // 2 |mu| C
  double onset_sigma2 = 0.0;           // multiple equilibria beyond this
  double doubled_switch_sigma2 = 0.0;  // profit maximizer ties beyond this
  std::string binding;  // "maximizer-in-segment", "multiplicity" or "separable"
  std::optional<double> bisection_k;  // verify_equilibrium(p^O) bisection
  double interior_limit_k = 0.0;      // largest k keeping the closed forms interior
};

/// Smallest k at which p^O lies in the equilibrium set, from the interval
/// derivation; optionally confirmed by bisection on verify_equilibrium.
ThresholdResult decentralization_threshold(const OrgSpec& org, bool bisect = true,
                                           double tol = kDefaultTol);

struct OrgReport {
  OrgGames games;
  PotentialResult optimum;
  Vector p_opt;
  ProfitBreakdown profit_at_opt;
  ThresholdResult threshold;
  bool is_implementable = false;
  bool interior = false;       // p^O strictly above the status quo
  bool multiplicity_ok = false;  // d_hi <= d_lo + 2 k g_hat
};

OrgReport analyze_org(const OrgSpec& org, double tol = kDefaultTol);

struct SweepRow {
  double sigma2 = 0.0;
  double k = 0.0;
  double p1_star, p2_star, L, U, r1_star, r2_star, r_star;  // NaN when undefined
  std::string branch;  // "unique", "multiple" or "implementable"
  bool interior = false;
};

std::vector<SweepRow> sweep_sigma(const OrgSpec& org, const std::vector<double>& sigma2_grid,
                                  double tol = kDefaultTol);

/// CSV with 12 significant digits in the classic locale; NaN prints as "nan".
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace bmgame
