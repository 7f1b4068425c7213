#include "nlsnorm/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nlsnorm/errors.hpp"

namespace nlsnorm
{

namespace fs = std::filesystem;

void write_atomic(const std::string &path, const std::string &content)
{
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path())
  {
    fs::create_directories(target.parent_path(), ec);
    if (ec)
    {
      throw IoError("cannot create " + target.parent_path().string() + ": " + ec.message());
    }
  }
  const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out)
    {
      fs::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path + ": " + ec.message());
  }
}

namespace
{

void emit(const nlohmann::json &j, std::string &out, int depth)
{
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type())
  {
  case nlohmann::json::value_t::object:
  {
    if (j.empty())
    {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it)
    {
      out += first ? "" : ",\n";
      first = false;
      out += pad + nlohmann::json(it.key()).dump() + ": ";
      emit(it.value(), out, depth + 1);
    }
    out += "\n" + close + "}";
    return;
  }
  case nlohmann::json::value_t::array:
  {
    if (j.empty())
    {
      out += "[]";
      return;
    }
    // Numeric arrays stay on one line.
    const bool flat = std::all_of(j.begin(), j.end(), [](const auto &e) { return e.is_primitive(); });
    out += flat ? "[" : "[\n";
    bool first = true;
    for (const auto &e : j)
    {
      out += first ? "" : (flat ? ", " : ",\n");
      first = false;
      out += flat ? "" : pad;
      emit(e, out, depth + 1);
    }
    out += flat ? "]" : "\n" + close + "]";
    return;
  }
  case nlohmann::json::value_t::number_float:
  {
    const double v = j.get<double>();
    if (!std::isfinite(v))
    {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    return;
  }
  default:
    out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json &j)
{
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

std::string csv_table(const std::vector<std::string> &header,
                      const std::vector<std::vector<double>> &rows)
{
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    out += (i ? "," : "") + header[i];
  }
  out += "\n";
  char buf[40];
  for (const auto &row : rows)
  {
    for (std::size_t i = 0; i < row.size(); ++i)
    {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out += (i ? "," : "") + std::string(buf);
    }
    out += "\n";
  }
  return out;
}

std::string field_csv(const RadialField &u)
{
  std::ostringstream os;
  write_csv(u, os);
  return os.str();
}

nlohmann::json ground_json(const GroundState &gs)
{
  return {{"N", gs.problem.dim},
          {"p", gs.problem.p},
          {"mu", gs.problem.mu},
          {"shoot_value", gs.shoot_value},
          {"mass_w", gs.mass_w},
          {"grad_w", gs.grad_w},
          {"plevel_w", gs.plevel_w},
          {"unit_level", gs.unit_level()},
          {"bisection_steps", gs.bisection_steps},
          {"grid", {{"dim", gs.w.grid().dim()}, {"nodes", gs.w.size()}, {"r_max", gs.w.grid().r_max()}}}};
}

nlohmann::json params_json(const SystemParams &p)
{
  return {{"N", p.dim}, {"p1", p.p1}, {"p2", p.p2}, {"r1", p.r1}, {"r2", p.r2}, {"mu1", p.mu1},
          {"mu2", p.mu2}, {"beta", p.beta}, {"a1", p.a1}, {"a2", p.a2}};
}

nlohmann::json solution_json(const SystemParams &params, const Solution &s)
{
  const auto &g = s.state.grid();
  return {{"params", params_json(params)},
          {"regime", {{"tag", to_string(s.regime.tag)}, {"experimental", s.regime.experimental}, {"note", s.regime.note}}},
          {"method", s.method},
          {"converged", s.converged},
          {"iterations", s.iterations},
          {"lambda1", s.lambda1},
          {"lambda2", s.lambda2},
          {"J", s.J_value},
          {"Q", s.Q_value},
          {"residual", s.residual_norm},
          {"mass1", mass(s.state.u1)},
          {"mass2", mass(s.state.u2)},
          {"interior_min", interior_min(s.state)},
          {"note", s.note},
          {"grid", {{"dim", g.dim()}, {"nodes", g.size()}, {"r_max", g.r_max()}}},
          {"history", s.history}};
}

}  // namespace nlsnorm
