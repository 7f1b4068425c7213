#include "nlsnorm/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

namespace
{

const std::set<std::string> subcommands{"ground", "level-curve", "minimize", "mountain-pass",
                                        "sweep", "fiber", "check"};

void reject_unknown(const toml::table &t, const std::set<std::string> &known,
                    const std::string &where)
{
  for (const auto &[k, v] : t)
  {
    if (!known.count(std::string(k.str())))
    {
      throw ConfigError("config: unknown key '" + std::string(k.str()) + "' in " + where);
    }
  }
}

double get_double(const toml::table &t, const char *key, double fallback)
{
  const auto *n = t.get(key);
  if (!n)
  {
    return fallback;
  }
  if (auto v = n->value<double>())
  {
    return *v;
  }
  throw ConfigError(std::string("config: '") + key + "' must be a number");
}

std::int64_t get_int(const toml::table &t, const char *key, std::int64_t fallback)
{
  const auto *n = t.get(key);
  if (!n)
  {
    return fallback;
  }
  if (n->is_integer())
  {
    return n->as_integer()->get();
  }
  throw ConfigError(std::string("config: '") + key + "' must be an integer");
}

std::string get_string(const toml::table &t, const char *key, const std::string &fallback)
{
  const auto *n = t.get(key);
  if (!n)
  {
    return fallback;
  }
  if (auto v = n->value<std::string>())
  {
    return *v;
  }
  throw ConfigError(std::string("config: '") + key + "' must be a string");
}

std::vector<double> get_list(const toml::table &t, const char *key, std::vector<double> fallback)
{
  const auto *n = t.get(key);
  if (!n)
  {
    return fallback;
  }
  const auto *arr = n->as_array();
  if (!arr)
  {
    throw ConfigError(std::string("config: '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto &e : *arr)
  {
    auto v = e.value<double>();
    if (!v)
    {
      throw ConfigError(std::string("config: '") + key + "' must be an array of numbers");
    }
    out.push_back(*v);
  }
  return out;
}

const toml::table *section(const toml::table &t, const char *key)
{
  const auto *n = t.get(key);
  if (!n)
  {
    return nullptr;
  }
  if (!n->is_table())
  {
    throw ConfigError(std::string("config: '") + key + "' must be a table");
  }
  return n->as_table();
}

const std::set<std::string> param_keys{"N", "p1", "p2", "r1", "r2", "mu1", "mu2", "beta", "a1", "a2"};

SystemParams read_params(const toml::table &t, SystemParams pm)
{
  pm.dim = static_cast<int>(get_int(t, "N", pm.dim));
  pm.p1 = get_double(t, "p1", pm.p1);
  pm.p2 = get_double(t, "p2", pm.p2);
  pm.r1 = get_double(t, "r1", pm.r1);
  pm.r2 = get_double(t, "r2", pm.r2);
  pm.mu1 = get_double(t, "mu1", pm.mu1);
  pm.mu2 = get_double(t, "mu2", pm.mu2);
  pm.beta = get_double(t, "beta", pm.beta);
  pm.a1 = get_double(t, "a1", pm.a1);
  pm.a2 = get_double(t, "a2", pm.a2);
  return pm;
}

toml::table parse_text(const std::string &text, const std::string &origin)
{
  try
  {
    return toml::parse(text, origin);
  }
  catch (const toml::parse_error &e)
  {
    std::ostringstream os;
    os << "config: " << e.description() << " at " << e.source().begin;
    throw ConfigError(os.str());
  }
}

std::string read_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("config: cannot read " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string num(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // TOML floats need a fraction or exponent; inf and nan pass as they are.
  if (s.find_first_of(".eEn") == std::string::npos)
  {
    s += ".0";
  }
  return s;
}

std::string list(const std::vector<double> &v)
{
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    s += (i ? ", " : "") + num(v[i]);
  }
  return s + "]";
}

std::string quoted(const std::string &s)
{
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"' || c == '\\')
    {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

void RunConfig::validate() const
{
  if (!subcommand.empty() && !subcommands.count(subcommand))
  {
    throw ConfigError("config: unknown subcommand '" + subcommand + "'");
  }
  params.validate();
  if (!(tol > 0.0) || max_iters < 0 || restarts < 0 || jobs < 1)
  {
    throw ConfigError("config: need tol > 0, max_iters >= 0, restarts >= 0, jobs >= 1");
  }
  if (grid && (grid->nodes < RadialGrid::min_nodes || !(grid->r_max > 0.0)))
  {
    throw ConfigError("config: grid needs at least 64 nodes and r_max > 0");
  }
  if (scalar_dim < 1 || !(scalar_mu > 0.0) || !(scalar_p > 2.0))
  {
    throw ConfigError("config: scalar problem needs N >= 1, p > 2, mu > 0");
  }
  for (double a : masses)
  {
    if (!(a > 0.0))
    {
      throw ConfigError("config: masses must be positive");
    }
  }
  if (sweep_a1.empty() || sweep_a2.empty() || sweep_beta.empty())
  {
    throw ConfigError("config: sweep lists must be non-empty");
  }
  for (double a : sweep_a1)
  {
    if (!(a > 0.0))
    {
      throw ConfigError("config: sweep masses must be positive");
    }
  }
  for (double a : sweep_a2)
  {
    if (!(a > 0.0))
    {
      throw ConfigError("config: sweep masses must be positive");
    }
  }
  for (double b : sweep_beta)
  {
    if (!(b >= 0.0))
    {
      throw ConfigError("config: sweep couplings must be nonnegative");
    }
  }
  if (fiber_steps < 2 || !(fiber_s_max > fiber_s_min))
  {
    throw ConfigError("config: fiber needs s_max > s_min and at least 2 steps");
  }
}

RunConfig parse_config(const std::string &text, RunConfig cfg)
{
  const auto t = parse_text(text, "config");
  reject_unknown(t,
                 {"subcommand", "seed", "jobs", "out", "params", "scalar", "grid", "solver",
                  "level_curve", "sweep", "fiber", "check"},
                 "top level");
  cfg.subcommand = get_string(t, "subcommand", cfg.subcommand);
  const auto seed = get_int(t, "seed", static_cast<std::int64_t>(cfg.seed));
  if (seed < 0)
  {
    throw ConfigError("config: seed must be nonnegative");
  }
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.jobs = static_cast<int>(get_int(t, "jobs", cfg.jobs));
  cfg.out = get_string(t, "out", cfg.out);
  if (const auto *s = section(t, "params"))
  {
    reject_unknown(*s, param_keys, "[params]");
    cfg.params = read_params(*s, cfg.params);
  }
  if (const auto *s = section(t, "scalar"))
  {
    reject_unknown(*s, {"N", "p", "mu"}, "[scalar]");
    cfg.scalar_dim = static_cast<int>(get_int(*s, "N", cfg.scalar_dim));
    cfg.scalar_p = get_double(*s, "p", cfg.scalar_p);
    cfg.scalar_mu = get_double(*s, "mu", cfg.scalar_mu);
  }
  if (const auto *s = section(t, "grid"))
  {
    reject_unknown(*s, {"nodes", "r_max"}, "[grid]");
    GridSpec g = cfg.grid.value_or(GridSpec{});
    if (const auto *n = s->get("nodes"))
    {
      if (n->is_integer())
      {
        const auto v = n->as_integer()->get();
        if (v <= 0)
        {
          throw ConfigError("config: grid nodes must be positive");
        }
        g.nodes = static_cast<std::size_t>(v);
      }
      else if (auto str = n->value<std::string>())
      {
        g.nodes = parse_node_spec(*str);
      }
      else
      {
        throw ConfigError("config: grid nodes must be an integer or \"uniform(M)\"");
      }
    }
    g.r_max = get_double(*s, "r_max", g.r_max);
    cfg.grid = g;
  }
  if (const auto *s = section(t, "solver"))
  {
    reject_unknown(*s, {"tol", "max_iters", "restarts"}, "[solver]");
    cfg.tol = get_double(*s, "tol", cfg.tol);
    cfg.max_iters = static_cast<int>(get_int(*s, "max_iters", cfg.max_iters));
    cfg.restarts = static_cast<int>(get_int(*s, "restarts", cfg.restarts));
  }
  if (const auto *s = section(t, "level_curve"))
  {
    reject_unknown(*s, {"masses"}, "[level_curve]");
    cfg.masses = get_list(*s, "masses", cfg.masses);
  }
  if (const auto *s = section(t, "sweep"))
  {
    reject_unknown(*s, {"a1", "a2", "beta"}, "[sweep]");
    cfg.sweep_a1 = get_list(*s, "a1", cfg.sweep_a1);
    cfg.sweep_a2 = get_list(*s, "a2", cfg.sweep_a2);
    cfg.sweep_beta = get_list(*s, "beta", cfg.sweep_beta);
  }
  if (const auto *s = section(t, "fiber"))
  {
    reject_unknown(*s, {"s_min", "s_max", "steps"}, "[fiber]");
    cfg.fiber_s_min = get_double(*s, "s_min", cfg.fiber_s_min);
    cfg.fiber_s_max = get_double(*s, "s_max", cfg.fiber_s_max);
    cfg.fiber_steps = static_cast<int>(get_int(*s, "steps", cfg.fiber_steps));
  }
  if (const auto *s = section(t, "check"))
  {
    reject_unknown(*s, {"level"}, "[check]");
    const auto level = get_string(*s, "level", cfg.check_full ? "full" : "quick");
    if (level != "quick" && level != "full")
    {
      throw ConfigError("config: check level must be quick or full");
    }
    cfg.check_full = level == "full";
  }
  return cfg;
}

RunConfig load_config(const std::string &path, RunConfig base)
{
  return parse_config(read_file(path), std::move(base));
}

SystemParams load_params(const std::string &path, SystemParams base)
{
  const auto t = parse_text(read_file(path), path);
  if (const auto *s = section(t, "params"))
  {
    reject_unknown(*s, param_keys, "[params]");
    return read_params(*s, base);
  }
  reject_unknown(t, param_keys, path);
  return read_params(t, base);
}

std::string to_toml(const RunConfig &c)
{
  std::ostringstream os;
  os << "subcommand = " << quoted(c.subcommand) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "jobs = " << c.jobs << "\n";
  os << "out = " << quoted(c.out) << "\n";
  const auto &p = c.params;
  os << "\n[params]\n"
     << "N = " << p.dim << "\n"
     << "p1 = " << num(p.p1) << "\np2 = " << num(p.p2) << "\n"
     << "r1 = " << num(p.r1) << "\nr2 = " << num(p.r2) << "\n"
     << "mu1 = " << num(p.mu1) << "\nmu2 = " << num(p.mu2) << "\n"
     << "beta = " << num(p.beta) << "\n"
     << "a1 = " << num(p.a1) << "\na2 = " << num(p.a2) << "\n";
  os << "\n[scalar]\nN = " << c.scalar_dim << "\np = " << num(c.scalar_p)
     << "\nmu = " << num(c.scalar_mu) << "\n";
  if (c.grid)
  {
    os << "\n[grid]\nnodes = " << c.grid->nodes << "\nr_max = " << num(c.grid->r_max) << "\n";
  }
  os << "\n[solver]\ntol = " << num(c.tol) << "\nmax_iters = " << c.max_iters
     << "\nrestarts = " << c.restarts << "\n";
  os << "\n[level_curve]\nmasses = " << list(c.masses) << "\n";
  os << "\n[sweep]\na1 = " << list(c.sweep_a1) << "\na2 = " << list(c.sweep_a2)
     << "\nbeta = " << list(c.sweep_beta) << "\n";
  os << "\n[fiber]\ns_min = " << num(c.fiber_s_min) << "\ns_max = " << num(c.fiber_s_max)
     << "\nsteps = " << c.fiber_steps << "\n";
  os << "\n[check]\nlevel = " << quoted(c.check_full ? "full" : "quick") << "\n";
  return os.str();
}

GridSpec parse_grid_flag(const std::string &text)
{
  const auto comma = text.rfind(',');
  if (comma == std::string::npos)
  {
    throw ConfigError("--grid expects M,rmax");
  }
  GridSpec g;
  g.nodes = parse_node_spec(text.substr(0, comma));
  try
  {
    std::size_t used = 0;
    const std::string tail = text.substr(comma + 1);
    g.r_max = std::stod(tail, &used);
    if (used != tail.size())
    {
      throw std::invalid_argument("trailing characters");
    }
  }
  catch (const std::exception &)
  {
    throw ConfigError("--grid: bad r_max in '" + text + "'");
  }
  return g;
}

std::vector<double> parse_list(const std::string &text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    try
    {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
      {
        throw std::invalid_argument("trailing characters");
      }
    }
    catch (const std::exception &)
    {
      throw ConfigError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  if (out.empty())
  {
    throw ConfigError("empty list");
  }
  return out;
}

}  // namespace nlsnorm
