#include "nlsnorm/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <omp.h>

#include "nlsnorm/check_suite.hpp"
#include "nlsnorm/config.hpp"
#include "nlsnorm/errors.hpp"
#include "nlsnorm/flow_min.hpp"
#include "nlsnorm/minimax.hpp"
#include "nlsnorm/serialize.hpp"

namespace nlsnorm
{

namespace
{

using nlohmann::json;

struct Flags
{
  std::string config, params_file, grid, masses, a1s, a2s, betas, s_range, perturb;
  std::optional<double> tol, beta, a1, a2, p, mu;
  std::optional<int> restarts, jobs, N;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool quick = false, full = false;
};

std::string timestamp()
{
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunConfig resolve(const std::string &sub, const Flags &f)
{
  RunConfig c;
  if (const char *env = std::getenv("NLSNORM_JOBS"))
  {
    try
    {
      c.jobs = std::stoi(env);
    }
    catch (const std::exception &)
    {
      throw ConfigError(std::string("NLSNORM_JOBS: not an integer: ") + env);
    }
  }
  if (!f.config.empty())
  {
    c = load_config(f.config, c);
  }
  if (!f.params_file.empty())
  {
    c.params = load_params(f.params_file, c.params);
  }
  c.subcommand = sub;
  if (!f.grid.empty()) c.grid = parse_grid_flag(f.grid);
  if (f.tol) c.tol = *f.tol;
  if (f.restarts) c.restarts = *f.restarts;
  if (f.seed) c.seed = *f.seed;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.out) c.out = *f.out;
  if (f.beta) c.params.beta = *f.beta;
  if (f.a1) c.params.a1 = *f.a1;
  if (f.a2) c.params.a2 = *f.a2;
  if (f.N) c.scalar_dim = *f.N;
  if (f.p) c.scalar_p = *f.p;
  if (f.mu) c.scalar_mu = *f.mu;
  if (!f.masses.empty()) c.masses = parse_list(f.masses);
  if (!f.a1s.empty()) c.sweep_a1 = parse_list(f.a1s);
  if (!f.a2s.empty()) c.sweep_a2 = parse_list(f.a2s);
  if (!f.betas.empty()) c.sweep_beta = parse_list(f.betas);
  if (!f.s_range.empty())
  {
    const auto v = parse_list(f.s_range);
    if (v.size() != 3 || v[2] != std::floor(v[2]))
    {
      throw ConfigError("--s-range expects smin,smax,steps");
    }
    c.fiber_s_min = v[0];
    c.fiber_s_max = v[1];
    c.fiber_steps = static_cast<int>(v[2]);
  }
  if (f.quick && f.full)
  {
    throw ConfigError("check: --quick and --full are exclusive");
  }
  if (f.full) c.check_full = true;
  if (f.quick) c.check_full = false;
  c.validate();
  return c;
}

GridPtr grid_of(const RunConfig &c, int dim)
{
  return c.grid ? RadialGrid::uniform(dim, c.grid->nodes, c.grid->r_max) : nullptr;
}

// Files under the output directory; nothing is written without --out.
class Output
{
public:
  explicit Output(const RunConfig &c) : dir_(c.out)
  {
    if (!dir_.empty())
    {
      write("config.effective.toml", to_toml(c));
    }
  }
  void write(const std::string &rel, const std::string &content) const
  {
    if (!dir_.empty())
    {
      write_atomic(dir_ + "/" + rel, content);
    }
  }
  void json_file(const std::string &rel, json j) const
  {
    j["created"] = timestamp();
    write(rel, dump_json(j));
  }
  void fields(const std::string &stem, const State &st) const
  {
    write("fields/" + stem + "u1.csv", field_csv(st.u1));
    write("fields/" + stem + "u2.csv", field_csv(st.u2));
  }

private:
  std::string dir_;
};

json entry(const std::string &name, double measured, double tol, bool passed)
{
  return {{"name", name}, {"measured", measured}, {"tolerance", tol}, {"passed", passed}};
}

// Post-solve diagnostics shared by minimize and mountain-pass.
json solution_checks(const SystemParams &pm, const Solution &s, double tol)
{
  json list = json::array();
  list.push_back(entry("converged", s.converged ? 0.0 : 1.0, 0.0, s.converged));
  list.push_back(entry("lambda1_negative", s.lambda1, 0.0, s.lambda1 < 0.0));
  list.push_back(entry("lambda2_negative", s.lambda2, 0.0, s.lambda2 < 0.0));
  const double lo = interior_min(s.state);
  list.push_back(entry("interior_positive", -lo, 0.0, lo > 0.0));
  const double qt = 100.0 * tol * std::max(1.0, std::abs(s.J_value));
  list.push_back(entry("pohozaev", std::abs(s.Q_value), qt, std::abs(s.Q_value) <= qt));
  const double m1 = std::abs(mass(s.state.u1) - pm.a1) / pm.a1;
  const double m2 = std::abs(mass(s.state.u2) - pm.a2) / pm.a2;
  list.push_back(entry("masses", std::max(m1, m2), 1e-10, std::max(m1, m2) <= 1e-10));
  return list;
}

json report(const json &checks)
{
  bool ok = true;
  for (const auto &c : checks)
  {
    ok = ok && c["passed"].get<bool>();
  }
  return {{"passed", ok}, {"checks", checks}};
}

int cmd_ground(const RunConfig &c, std::ostream &out)
{
  const ScalarProblem pb(c.scalar_dim, c.scalar_p, c.scalar_mu);
  auto g = grid_of(c, pb.dim);
  const auto gs = solve_unit_ground(pb, g ? g : RadialGrid::uniform(pb.dim), std::min(c.tol, 1e-10));
  const json j = ground_json(gs);
  out << dump_json(j);
  const Output o(c);
  o.json_file("solution.json", j);
  o.write("fields/w.csv", field_csv(gs.w));
  json checks = json::array();
  const double pair = std::abs(gs.grad_w + gs.mass_w - pb.mu * gs.plevel_w) / gs.plevel_w;
  checks.push_back(entry("pairing_identity", pair, 1e-8, pair <= 1e-8));
  const double poh = std::abs(gs.grad_w - pb.mu * pb.dim * (pb.p - 2) / (2 * pb.p) * gs.plevel_w) /
                     gs.grad_w;
  checks.push_back(entry("scalar_pohozaev", poh, 1e-8, poh <= 1e-8));
  o.json_file("report.json", report(checks));
  return exit_ok;
}

int cmd_level_curve(const RunConfig &c, std::ostream &out)
{
  const ScalarProblem pb(c.scalar_dim, c.scalar_p, c.scalar_mu);
  auto g = grid_of(c, pb.dim);
  const auto rows = level_curve(pb, g ? g : RadialGrid::uniform(pb.dim), c.masses);
  std::vector<std::vector<double>> table;
  for (const auto &r : rows)
  {
    table.push_back({r.a, r.lambda, r.m});
  }
  const auto csv = csv_table({"a", "lambda_a", "m"}, table);
  out << csv;
  const Output o(c);
  o.write("level_curve.csv", csv);
  json checks = json::array();
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
  {
    decreasing = decreasing && (rows[i].a > rows[i - 1].a ? rows[i].m < rows[i - 1].m : true);
  }
  checks.push_back(entry("level_decreasing", decreasing ? 0.0 : 1.0, 0.0, decreasing));
  o.json_file("report.json", report(checks));
  return exit_ok;
}

FlowOptions flow_options(const RunConfig &c)
{
  FlowOptions f;
  f.tol = c.tol;
  f.max_iters = c.max_iters;
  f.restarts = c.restarts;
  f.seed = c.seed;
  f.grid = grid_of(c, c.params.dim);
  return f;
}

json minimize_json(const SystemParams &pm, const MultiStart &ms)
{
  json j = solution_json(pm, ms.best);
  json runs = json::array();
  for (std::size_t k = 0; k < ms.runs.size(); ++k)
  {
    const auto &r = ms.runs[k];
    runs.push_back({{"start", ms.labels[k]}, {"converged", r.converged}, {"J", r.J_value},
                    {"iterations", r.iterations}, {"residual", r.residual_norm}});
  }
  j["runs"] = runs;
  return j;
}

int cmd_minimize(const RunConfig &c, std::ostream &out)
{
  const auto &pm = c.params;
  const auto fo = flow_options(c);
  const auto pair = decoupled_pair(pm, fo.grid);
  const auto ms = fo.grid ? global_min_estimate(pm, pair, fo) : global_min_estimate(pm, fo);
  json j = minimize_json(pm, ms);
  j["decoupled_level"] = pair.level();
  out << dump_json(j);
  const Output o(c);
  o.json_file("solution.json", j);
  o.fields("", ms.best.state);
  auto checks = solution_checks(pm, ms.best, c.tol);
  const double gap = ms.best.J_value - pair.level();
  checks.push_back(entry("below_decoupled_level", gap, 1e-6, gap <= 1e-6));
  o.json_file("report.json", report(checks));
  return ms.best.converged ? exit_ok : exit_solver_failure;
}

json gamma_json(const SystemParams &pm, const GammaEstimate &g)
{
  json j = solution_json(pm, g.solution);
  j["gamma_upper"] = g.gamma_upper;
  j["inf_B_lower"] = g.inf_B_lower;
  j["decoupled_level"] = g.level;
  j["level_negative"] = g.level_negative;
  j["c_lower"] = g.c_lower;
  j["path_s"] = g.s;
  j["t_star"] = g.t_star;
  j["bracket_holds"] = g.bracket_holds;
  j["gamma_note"] = g.note;
  return j;
}

GammaOptions gamma_options(const RunConfig &c)
{
  GammaOptions o;
  o.newton.tol = c.tol;
  o.grid = grid_of(c, c.params.dim);
  return o;
}

int cmd_mountain_pass(const RunConfig &c, std::ostream &out)
{
  const auto &pm = c.params;
  const auto g = gamma_estimate(pm, gamma_options(c));
  const json j = gamma_json(pm, g);
  out << dump_json(j);
  const Output o(c);
  o.json_file("solution.json", j);
  o.fields("", g.solution.state);
  auto checks = solution_checks(pm, g.solution, c.tol);
  checks.push_back(entry("bracket", g.bracket_holds ? 0.0 : 1.0, 0.0, g.bracket_holds));
  o.json_file("report.json", report(checks));
  return g.solution.converged && g.bracket_holds ? exit_ok : exit_solver_failure;
}

std::string tag(double a1, double a2, double beta)
{
  char buf[96];
  std::snprintf(buf, sizeof buf, "a1_%.6g_a2_%.6g_beta_%.6g_", a1, a2, beta);
  return buf;
}

int cmd_sweep(const RunConfig &c, std::ostream &out)
{
  struct Cell
  {
    double a1, a2;
    std::vector<BetaRow> rows;
    std::vector<Solution> sols;
    std::string error;
    bool config_error = false;
  };
  std::vector<Cell> cells;
  for (double a1 : c.sweep_a1)
  {
    for (double a2 : c.sweep_a2)
    {
      cells.push_back({a1, a2, {}, {}, ""});
    }
  }
  // Rows over (a1, a2) are independent; β is continued within a row.
#pragma omp parallel for schedule(dynamic) num_threads(c.jobs)
  for (std::size_t k = 0; k < cells.size(); ++k)
  {
    Cell &cell = cells[k];
    SystemParams pm = c.params;
    pm.a1 = cell.a1;
    pm.a2 = cell.a2;
    try
    {
      pm.beta = c.sweep_beta.front();
      if (classify_regime(pm).tag == RegimeTag::Supercritical)
      {
        SweepOptions so;
        so.newton.tol = c.tol;
        cell.rows = beta_sweep(pm, c.sweep_beta, so, &cell.sols);
        continue;
      }
      for (double b : c.sweep_beta)
      {
        pm.beta = b;
        Solution s = classify_regime(pm).tag == RegimeTag::Mixed
                       ? gamma_estimate(pm, gamma_options(c)).solution
                       : global_min_estimate(pm, flow_options(c)).best;
        cell.rows.push_back({b, s.converged, s.J_value, s.lambda1, s.lambda2, s.Q_value,
                             s.residual_norm, s.state.grid().size(), s.note});
        cell.sols.push_back(std::move(s));
      }
    }
    catch (const ConfigError &e)
    {
      cell.error = e.what();
      cell.config_error = true;
    }
    catch (const std::exception &e)
    {
      cell.error = e.what();
    }
  }
  // Exceptions may not leave the parallel region.
  for (const auto &cell : cells)
  {
    if (cell.config_error)
    {
      throw ConfigError(cell.error);
    }
  }
  std::vector<std::vector<double>> table;
  json summary = json::array();
  const Output o(c);
  bool any = false;
  for (const auto &cell : cells)
  {
    for (std::size_t k = 0; k < cell.rows.size(); ++k)
    {
      const auto &r = cell.rows[k];
      any = any || r.converged;
      table.push_back({cell.a1, cell.a2, r.beta, r.converged ? 1.0 : 0.0, r.J, r.lambda1,
                       r.lambda2, r.Q, r.residual, static_cast<double>(r.nodes)});
      SystemParams pm = c.params;
      pm.a1 = cell.a1;
      pm.a2 = cell.a2;
      pm.beta = r.beta;
      const auto stem = tag(cell.a1, cell.a2, r.beta);
      if (k < cell.sols.size())
      {
        o.json_file("solutions/" + stem + "solution.json", solution_json(pm, cell.sols[k]));
        o.fields(stem, cell.sols[k].state);
      }
      summary.push_back({{"a1", cell.a1}, {"a2", cell.a2}, {"beta", r.beta}, {"converged", r.converged},
                         {"J", r.J}, {"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"note", r.note}});
    }
    if (!cell.error.empty())
    {
      summary.push_back({{"a1", cell.a1}, {"a2", cell.a2}, {"error", cell.error}});
    }
  }
  const auto csv = csv_table({"a1", "a2", "beta", "converged", "J", "lambda1", "lambda2", "Q",
                              "residual", "nodes"},
                             table);
  out << csv;
  o.write("sweep.csv", csv);
  o.json_file("solution.json", {{"rows", summary}});
  json checks = json::array();
  checks.push_back(entry("any_converged", any ? 0.0 : 1.0, 0.0, any));
  o.json_file("report.json", report(checks));
  return any ? exit_ok : exit_solver_failure;
}

int cmd_fiber(const RunConfig &c, std::ostream &out)
{
  const auto &pm = c.params;
  const auto pair = decoupled_pair(pm, grid_of(c, pm.dim));
  std::vector<double> s;
  for (int i = 0; i < c.fiber_steps; ++i)
  {
    s.push_back(c.fiber_s_min + (c.fiber_s_max - c.fiber_s_min) * i / (c.fiber_steps - 1));
  }
  std::vector<std::vector<double>> table;
  for (const auto &r : fiber_profile(pm, pair.state, s))
  {
    table.push_back({r.s, r.J, r.Q});
  }
  const auto csv = csv_table({"s", "J", "Q"}, table);
  out << csv;
  const Output o(c);
  o.write("fiber.csv", csv);
  o.fields("", pair.state);
  return exit_ok;
}

CheckHooks parse_perturb(const std::string &spec)
{
  CheckHooks h;
  if (spec.empty())
  {
    return h;
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
  {
    throw ConfigError("--perturb expects NORM:FACTOR");
  }
  h.scale_norm = spec.substr(0, colon);
  h.factor = parse_list(spec.substr(colon + 1)).at(0);
  return h;
}

int cmd_check(const RunConfig &c, const CheckHooks &hooks, std::ostream &out)
{
  const auto rep = check_suite(c.check_full, c.seed, hooks);
  json j = rep.to_json();
  out << dump_json(j);
  const Output o(c);
  o.json_file("report.json", j);
  return rep.passed() ? exit_ok : exit_solver_failure;
}

void add_common(CLI::App *s, Flags &f)
{
  s->add_option("--config", f.config, "TOML run configuration")->check(CLI::ExistingFile);
  s->add_option("--params", f.params_file, "TOML file with the system parameters")
    ->check(CLI::ExistingFile);
  s->add_option("--grid", f.grid, "uniform grid as M,rmax");
  s->add_option("--tol", f.tol, "solver tolerance");
  s->add_option("--restarts", f.restarts, "perturbed restarts of the flow");
  s->add_option("--seed", f.seed, "random seed");
  s->add_option("--jobs", f.jobs, "worker threads (default NLSNORM_JOBS or 1)");
  s->add_option("--out", f.out, "output directory");
  s->add_option("--beta", f.beta, "coupling");
  s->add_option("--a1", f.a1, "mass of u1");
  s->add_option("--a2", f.a2, "mass of u2");
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Normalized solutions of a coupled NLS system", "nlsnorm"};
  app.require_subcommand(1);
  Flags f;
  auto *ground = app.add_subcommand("ground", "unit scalar ground state");
  auto *level = app.add_subcommand("level-curve", "scalar levels m(a)");
  for (auto *s : {ground, level})
  {
    add_common(s, f);
    s->add_option("--N", f.N, "dimension");
    s->add_option("--p", f.p, "exponent");
    s->add_option("--mu", f.mu, "coefficient");
  }
  level->add_option("--masses", f.masses, "comma-separated masses");
  auto *minimize = app.add_subcommand("minimize", "constrained minimizer by gradient flow");
  auto *mp = app.add_subcommand("mountain-pass", "mountain-pass solution and level bracket");
  auto *sweep = app.add_subcommand("sweep", "solutions over a grid of (a1, a2, beta)");
  auto *fiber = app.add_subcommand("fiber", "J and Q along the dilation fiber of the decoupled pair");
  auto *check = app.add_subcommand("check", "invariant suite");
  for (auto *s : {minimize, mp, sweep, fiber, check})
  {
    add_common(s, f);
  }
  sweep->add_option("--a1-list", f.a1s, "comma-separated a1 values");
  sweep->add_option("--a2-list", f.a2s, "comma-separated a2 values");
  sweep->add_option("--beta-list", f.betas, "comma-separated beta values");
  fiber->add_option("--s-range", f.s_range, "smin,smax,steps");
  check->add_flag("--quick", f.quick, "dilation and identity checks");
  check->add_flag("--full", f.full, "all checks");
  check->add_option("--perturb", f.perturb, "test hook NORM:FACTOR")->group("");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(rev);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config_error;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try
  {
    const RunConfig cfg = resolve(sub, f);
    omp_set_num_threads(cfg.jobs);
    if (sub == "ground") return cmd_ground(cfg, out);
    if (sub == "level-curve") return cmd_level_curve(cfg, out);
    if (sub == "check") return cmd_check(cfg, parse_perturb(f.perturb), out);
    classify_regime(cfg.params);
    if (sub == "minimize") return cmd_minimize(cfg, out);
    if (sub == "mountain-pass") return cmd_mountain_pass(cfg, out);
    if (sub == "sweep") return cmd_sweep(cfg, out);
    return cmd_fiber(cfg, out);
  }
  catch (const ConfigError &e)
  {
    err << "nlsnorm: configuration error: " << e.what() << "\n";
    return exit_config_error;
  }
  catch (const IoError &e)
  {
    err << "nlsnorm: " << e.what() << "\n";
    return exit_config_error;
  }
  catch (const std::exception &e)
  {
    err << "nlsnorm: solver failure: " << e.what() << "\n";
    return exit_solver_failure;
  }
}

int run_cli(int argc, char **argv)
{
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

}  // namespace nlsnorm
