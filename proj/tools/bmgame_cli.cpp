// bmgame: command-line front end for the Brownian-motion coordination game solvers.

#include "bmgame/best_response.hpp"
#include "bmgame/equilibrium.hpp"
#include "bmgame/io.hpp"
#include "bmgame/oracle.hpp"
#include "bmgame/organization.hpp"
#include "bmgame/payoff.hpp"
#include "bmgame/potential.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

using namespace bmgame;

namespace {

struct Options {
  std::string spec_path;
  double tol = kDefaultTol;
  std::uint64_t seed = 1;
  std::int64_t samples = 100000;
  double step = 1e-3;
  std::string format;
  std::string out;
  std::string profile;
  int player = 0;  // 1-based; 0 = all
  std::string sigma2;
  bool mc = false;
  bool grid = false;
};

Json options_json(const Options& o, bool with_mc) {
  Json j = {{"tol", o.tol}};
  if (!o.profile.empty()) j["profile"] = o.profile;
  if (o.player > 0) j["player"] = o.player;
  if (o.grid) j["step"] = o.step;
  if (with_mc) {
    j["mc"] = o.mc;
    if (o.mc) {
      j["samples"] = o.samples;
      j["seed"] = o.seed;
    }
  }
  return j;
}

NetworkGame load_game(const SpecDocument& spec) {
  if (spec.kind != "game") throw ValidationError("this command needs a spec with kind \"game\"");
  return build_game(spec.game);
}

Vector profile_for(const NetworkGame& game, const Options& o) {
  if (o.profile.empty()) throw ValidationError("--profile is required");
  Vector p = parse_profile(o.profile);
  if (p.size() != game.size()) throw ValidationError("--profile must have n entries");
  check_profile(game, p, o.tol);
  return p;
}

Json followership_json(const Followership& f) { return to_json(f.F); }

Json blocks_json(const std::vector<std::vector<int>>& blocks) {
  Json out = Json::array();
  for (const auto& b : blocks) {
    Json row = Json::array();
    for (int i : b) row.push_back(i + 1);
    out.push_back(row);
  }
  return out;
}

Json mc_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"stderr", e.stderr_}, {"n_samples", e.n_samples}, {"seed", e.seed}};
}

Json cmd_solve(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  Json r = report_header("solve", spec, options_json(o, false));
  ExtremalOptions eo;
  eo.verify_tol = o.tol;
  const ExtremalResult ex = extremal_equilibria(game, eo);
  r["extremal"] = {{"least", to_json(ex.least)},
                   {"greatest", to_json(ex.greatest)},
                   {"least_outcomes", to_json(game.means(ex.least))},
                   {"greatest_outcomes", to_json(game.means(ex.greatest))},
                   {"iterations_up", ex.iterations_up},
                   {"iterations_down", ex.iterations_down}};
  if (game.size() > 5) {
    r["method"] = "monotone-iteration";
    return r;
  }
  r["method"] = "regime-enumeration";
  const EquilibriumSet set = enumerate_equilibria(game, 5, o.tol);
  Json comps = Json::array();
  for (const auto& c : set.components) {
    Json v = Json::array();
    for (const auto& x : c.vertices) v.push_back(to_json(x));
    comps.push_back({{"kind", c.dimension == 0 ? "point" : c.dimension == 1 ? "segment" : "region"},
                     {"dimension", c.dimension},
                     {"vertices", v},
                     {"outcome_lo", to_json(c.outcome_lo)},
                     {"outcome_hi", to_json(c.outcome_hi)},
                     {"blocks", blocks_json(c.regime.blocks)},
                     {"status_quo_block", c.regime.corner},
                     {"witness", followership_json(c.witness)}});
  }
  r["equilibria"] = {{"components", comps},
                     {"count", set.components.size()},
                     {"least", to_json(set.least)},
                     {"greatest", to_json(set.greatest)}};
  return r;
}

Json cmd_verify(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  const Vector p = profile_for(game, o);
  const Verdict v = verify_equilibrium(game, p, o.tol);
  Json r = report_header("verify", spec, options_json(o, false));
  Json players = Json::array();
  for (std::size_t i = 0; i < v.players.size(); ++i) {
    const auto& pc = v.players[i];
    players.push_back({{"player", i + 1},
                       {"ok", pc.ok},
                       {"status_quo", pc.corner},
                       {"required_load", pc.required_load},
                       {"load_min", pc.load_min},
                       {"load_max", pc.load_max},
                       {"violation", pc.violation}});
  }
  r["profile"] = to_json(p);
  r["outcomes"] = to_json(game.means(p));
  r["equilibrium"] = v.equilibrium;
  r["verdict"] = v.equilibrium ? "equilibrium" : "not an equilibrium";
  r["violation"] = v.violation;
  r["players"] = players;
  r["witness"] = followership_json(v.witness);
  return r;
}

Json cmd_best_response(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  const Vector p = profile_for(game, o);
  if (o.player < 1 || o.player > game.size()) throw ValidationError("--player must be in 1..n");
  const BestResponseResult br = best_response(game, o.player - 1, p, o.tol);
  Json r = report_header("best-response", spec, options_json(o, false));
  r["player"] = o.player;
  r["policy"] = br.policy;
  r["expected_outcome"] = br.expected_outcome;
  r["regime"] = to_json(br.regime);
  r["status_quo"] = br.at_corner;
  r["at_kink"] = br.at_kink ? Json(*br.at_kink + 1) : Json(nullptr);
  if (o.grid) {
    const double grid = br_grid_oracle(game, o.player - 1, p, o.step);
    r["grid_check"] = {{"policy", grid}, {"abs_diff", std::abs(grid - br.policy)}};
  }
  return r;
}

Json cmd_payoff(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  const Vector p = profile_for(game, o);
  Json r = report_header("payoff", spec, options_json(o, true));
  Json rows = Json::array();
  for (int i = 0; i < game.size(); ++i) {
    if (o.player > 0 && i != o.player - 1) continue;
    const PayoffBreakdown b = expected_utility(game, p, i);
    Json row = {{"player", i + 1},          {"total", b.total},         {"mean_term", b.mean_term},
                {"own_var", b.own_var},     {"cross_var", b.cross_var}, {"cov_bonus", b.cov_bonus}};
    if (o.mc) {
      McOptions mo;
      mo.n_samples = o.samples;
      mo.seed = o.seed;
      row["mc"] = mc_json(mc_payoff(game, p, i, mo));
    }
    rows.push_back(row);
  }
  if (o.player > game.size()) throw ValidationError("--player must be in 1..n");
  r["profile"] = to_json(p);
  r["payoffs"] = rows;
  return r;
}

Json cmd_potential(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  const PotentialResult res = maximize_potential(game, {}, o.tol);
  Json r = report_header("potential", spec, options_json(o, true));
  r["profile"] = to_json(res.profile);
  r["outcomes"] = to_json(game.means(res.profile));
  r["value"] = res.value;
  r["witness"] = followership_json(res.witness);
  r["certificate"] = to_json(res.certificate);
  r["blocks"] = blocks_json(res.blocks);
  r["status_quo_block"] = res.corner_block;
  r["is_equilibrium"] = verify_equilibrium(game, res.profile, o.tol).equilibrium;
  if (o.grid) {
    const double cells = std::pow((policy_upper_bound(game) - game.p0()) / o.step + 1.0, game.size());
    if (game.size() > 3 || cells > 5e7) throw ValidationError("--grid needs n <= 3 and at most 5e7 grid points");
    const Vector grid = potential_grid_oracle(game, o.step);
    r["grid_check"] = {{"profile", to_json(grid)}, {"max_abs_diff", (grid - res.profile).cwiseAbs().maxCoeff()}};
  }
  if (o.mc) {
    McOptions mo;
    mo.n_samples = o.samples;
    mo.seed = o.seed;
    r["mc"] = mc_json(mc_potential(game, res.profile, mo));
  }
  return r;
}

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json cmd_benchmarks(const SpecDocument& spec, const Options& o) {
  const NetworkGame game = load_game(spec);
  const BenchmarkProfiles b = benchmark_profiles(game, o.tol);
  Json r = report_header("benchmarks", spec, options_json(o, false));
  r["gamma0"] = {{"outcomes", to_json(b.gamma0_outcomes)},
                 {"policies", to_json(b.gamma0_policies)},
                 {"status_quo_clipped", b.gamma0_corner}};
  r["gamma1"] = {{"outcomes", to_json(b.gamma1_outcomes)},
                 {"policies", to_json(b.gamma1_policies)},
                 {"status_quo_clipped", b.gamma1_corner}};
  r["gamma"] = {{"least", to_json(b.gamma_least)},
                {"greatest", to_json(b.gamma_greatest)},
                {"least_outcomes", to_json(game.means(b.gamma_least))},
                {"greatest_outcomes", to_json(game.means(b.gamma_greatest))},
                {"unique", b.gamma_unique}};
  r["D"] = optional_json(b.D);
  r["distance0"] = optional_json(b.distance0);
  r["distance1"] = optional_json(b.distance1);
  r["distance_star"] = optional_json(b.distance_star);
  r["centralities"] = {{"beta", to_json(game.derived().beta)}, {"u", to_json(game.derived().u)}};
  Json flags = Json::array();
  for (bool f : lower_bound_increasing_in_k(game)) flags.push_back(f);
  r["lower_bound_increasing_in_k"] = flags;
  return r;
}

OrgSpec load_org(const SpecDocument& spec) {
  if (spec.kind != "org") throw ValidationError("this command needs a spec with kind \"org\"");
  return spec.org;
}

Json cmd_org_threshold(const SpecDocument& spec, const Options& o) {
  const OrgSpec org = load_org(spec);
  const OrgReport rep = analyze_org(org, o.tol);
  Json r = report_header("org threshold", spec, options_json(o, false));
  r["d"] = to_json(rep.games.d);
  r["g_hat"] = rep.games.g_hat;
  r["k"] = rep.games.game.derived().k;
  r["p_opt"] = to_json(rep.p_opt);
  r["p_opt_outcomes"] = to_json(rep.games.game.means(rep.p_opt));
  r["profit"] = {{"division1", rep.profit_at_opt.profit1},
                 {"division2", rep.profit_at_opt.profit2},
                 {"total", rep.profit_at_opt.total}};
  r["threshold_k"] = rep.threshold.k;
  r["threshold_sigma2"] = rep.threshold.sigma2;
  r["bisection_k"] = optional_json(rep.threshold.bisection_k);
  r["binding"] = rep.threshold.binding;
  r["onset_sigma2"] = rep.threshold.onset_sigma2;
  r["doubled_switch_sigma2"] = rep.threshold.doubled_switch_sigma2;
  r["interior_limit_k"] = rep.threshold.interior_limit_k;
  r["is_implementable"] = rep.is_implementable;
  r["interior"] = rep.interior;
  r["multiplicity_condition"] = rep.multiplicity_ok;
  return r;
}

std::string cmd_sweep(const SpecDocument& spec, const Options& o) {
  const OrgSpec org = load_org(spec);
  if (o.sigma2.empty()) throw ValidationError("--sigma2 start:stop:step is required");
  const auto rows = sweep_sigma(org, parse_range(o.sigma2), o.tol);
  if (o.format == "json" || o.format == "text") {
    Json r = report_header("org sweep", spec, {{"tol", o.tol}, {"sigma2", o.sigma2}});
    Json arr = Json::array();
    for (const auto& row : rows) {
      arr.push_back({{"sigma2", row.sigma2}, {"k", row.k},           {"p1_star", row.p1_star},
                     {"p2_star", row.p2_star}, {"L", row.L},         {"U", row.U},
                     {"r1_star", row.r1_star}, {"r2_star", row.r2_star}, {"r_star", row.r_star},
                     {"branch", row.branch},  {"interior", row.interior}});
    }
    r["rows"] = arr;
    return o.format == "json" ? r.dump(2) + "\n" : render_text(r);
  }
  std::ostringstream os;
  write_sweep_csv(os, rows);
  return os.str();
}

std::string render(const Json& report, const Options& o) {
  if (o.format == "csv") throw ValidationError("csv output is only available for sweeps");
  return o.format == "text" ? render_text(report) : report.dump(2) + "\n";
}

void emit(const std::string& content, const Options& o) {
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_atomic(o.out, content);
  }
}

void add_common(CLI::App* cmd, Options& o, const std::string& default_format) {
  cmd->add_option("spec", o.spec_path, "spec file (JSON)")->required();
  cmd->add_option("--tol", o.tol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->default_str(default_format);
  cmd->add_option("--out", o.out, "output file (written atomically)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers for coordination games on a Brownian-motion outcome function"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "enumerate equilibria and extremal profiles");
  add_common(solve, o, "json");

  auto* verify = app.add_subcommand("verify", "check whether a profile is an equilibrium");
  add_common(verify, o, "json");
  verify->add_option("--profile", o.profile, "comma-separated policies")->required();

  auto* br = app.add_subcommand("best-response", "best response of one player");
  add_common(br, o, "json");
  br->add_option("--profile", o.profile, "comma-separated policies (own entry ignored)")->required();
  br->add_option("--player", o.player, "player index, 1-based")->required();
  br->add_flag("--grid", o.grid, "cross-check against a brute-force grid argmax");
  br->add_option("--step", o.step, "grid step")->capture_default_str();

  auto* payoff = app.add_subcommand("payoff", "expected payoffs at a profile");
  add_common(payoff, o, "json");
  payoff->add_option("--profile", o.profile, "comma-separated policies")->required();
  payoff->add_option("--player", o.player, "player index, 1-based (default: all)");
  payoff->add_flag("--mc", o.mc, "add a Monte Carlo estimate");
  payoff->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
  payoff->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();

  auto* potential = app.add_subcommand("potential", "maximize the potential");
  add_common(potential, o, "json");
  potential->add_flag("--mc", o.mc, "add a Monte Carlo estimate of V at the maximizer");
  potential->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
  potential->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  potential->add_flag("--grid", o.grid, "cross-check against a brute-force grid argmax (n <= 3)");
  potential->add_option("--step", o.step, "grid step")->capture_default_str();

  auto* bench = app.add_subcommand("benchmarks", "no-uncertainty and independent-noise benchmarks");
  add_common(bench, o, "json");

  auto* org = app.add_subcommand("org", "two-division organization");
  org->require_subcommand(1);
  auto* threshold = org->add_subcommand("threshold", "profit maximizer and decentralization threshold");
  add_common(threshold, o, "json");
  auto* org_sweep = org->add_subcommand("sweep", "sigma2 sweep of equilibrium and optimum policies");
  add_common(org_sweep, o, "csv");
  org_sweep->add_option("--sigma2", o.sigma2, "range start:stop:step")->required();

  auto* sweep = app.add_subcommand("sweep", "alias for org sweep");
  add_common(sweep, o, "csv");
  sweep->add_option("--sigma2", o.sigma2, "range start:stop:step")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const SpecDocument spec = load_spec(o.spec_path);
    if (o.format.empty()) o.format = (org_sweep->parsed() || sweep->parsed()) ? "csv" : "json";
    if (!(o.tol > 0.0)) throw ValidationError("--tol must be positive");
    if (o.samples < 2) throw ValidationError("--samples must be at least 2");
    if (!(o.step > 0.0)) throw ValidationError("--step must be positive");

    std::string content;
    if (solve->parsed()) content = render(cmd_solve(spec, o), o);
    else if (verify->parsed()) content = render(cmd_verify(spec, o), o);
    else if (br->parsed()) content = render(cmd_best_response(spec, o), o);
    else if (payoff->parsed()) content = render(cmd_payoff(spec, o), o);
    else if (potential->parsed()) content = render(cmd_potential(spec, o), o);
    else if (bench->parsed()) content = render(cmd_benchmarks(spec, o), o);
    else if (threshold->parsed()) content = render(cmd_org_threshold(spec, o), o);
    else content = cmd_sweep(spec, o);
    emit(content, o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
