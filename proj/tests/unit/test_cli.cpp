#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "nlsnorm/check_suite.hpp"
#include "nlsnorm/cli.hpp"
#include "nlsnorm/config.hpp"
#include "nlsnorm/errors.hpp"
#include "nlsnorm/serialize.hpp"

using namespace nlsnorm;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
  fs::path path;
  TempDir()
  {
    path = fs::temp_directory_path() / ("nlsnorm_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int &counter()
  {
    static int n = 0;
    return n;
  }
  std::string file(const std::string &name, const std::string &content) const
  {
    const auto p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

struct Run
{
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string without_timestamp(const std::string &s)
{
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line))
  {
    if (line.find("\"created\"") == std::string::npos)
    {
      out += line + "\n";
    }
  }
  return out;
}

const char *subcritical_min = R"([params]
N = 3
p1 = 2.5
p2 = 2.5
r1 = 1.2
r2 = 1.2
mu1 = 1
mu2 = 1
beta = 1.0
a1 = 1.0
a2 = 1.0
)";

}  // namespace

TEST_CASE("config round trip")
{
  RunConfig c;
  c.subcommand = "sweep";
  c.params = {3, 2.5, 4.0, 1.5, 2.5, 0.7, 1.3, 0.1, 1024.0, 1.0 / 3.0};
  c.grid = GridSpec{8192, 17.25};
  c.tol = 3e-9;
  c.seed = 12345;
  c.jobs = 2;
  c.sweep_beta = {0.0, 0.1, 1.0 / 7.0};
  c.masses = {0.25, 0.1};
  c.fiber_steps = 9;
  c.check_full = true;
  c.out = "runs/a \"b\"";
  const auto text = to_toml(c);
  const auto back = parse_config(text);
  CHECK(back == c);
  CHECK(to_toml(back) == text);
  CHECK_NOTHROW(back.validate());

  // Defaults round-trip too, without a grid section.
  const RunConfig d;
  CHECK(parse_config(to_toml(d)) == d);
}

TEST_CASE("config errors")
{
  CHECK_THROWS_AS(parse_config("[params]\np1 = \n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[params]\np9 = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\nmax_iters = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[check]\nlevel = \"medium\"\n"), ConfigError);
  RunConfig c = parse_config("[params]\np1 = 7.0\n");
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto g = parse_config("[grid]\nnodes = \"uniform(2048)\"\nr_max = 15\n");
  REQUIRE(g.grid);
  CHECK(g.grid->nodes == 2048);
  CHECK(g.grid->r_max == 15.0);
  CHECK(parse_grid_flag("uniform(1024),12.5") == GridSpec{1024, 12.5});
  CHECK(parse_grid_flag("4096,20") == GridSpec{4096, 20.0});
  CHECK_THROWS_AS(parse_grid_flag("4096"), ConfigError);
  CHECK_THROWS_AS(parse_grid_flag("4096,x"), ConfigError);
  CHECK(parse_list("1,0.5,2e-1") == std::vector<double>{1.0, 0.5, 0.2});
  CHECK_THROWS_AS(parse_list("1,,2"), ConfigError);
}

TEST_CASE("serialization")
{
  nlohmann::json j = {{"x", 0.1}, {"n", 3}, {"v", {1.0 / 3.0, 2.0}}, {"s", "a\"b"}};
  const auto text = dump_json(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(nlohmann::json::parse(text) == j);

  CHECK(csv_table({"a", "b"}, {{1.0 / 3.0, 2.0}}) == "a,b\n0.333333333333,2\n");

  TempDir t;
  const auto p = (t.path / "deep" / "file.txt").string();
  write_atomic(p, "one");
  write_atomic(p, "two");
  CHECK(slurp(p) == "two");
  int files = 0;
  for (const auto &e : fs::directory_iterator(t.path / "deep"))
  {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("check suite")
{
  const auto quick = check_suite(false, 7);
  CHECK(quick.passed());
  CHECK(quick.entries.size() >= 8);
  const auto again = check_suite(false, 7);
  CHECK(dump_json(quick.to_json()) == dump_json(again.to_json()));

  // Mutation sanity: a norm scaled by 1 + 1e-3 fails the checks using it.
  const auto hurt = check_suite(false, 7, {"grad1", 1.0 + 1e-3});
  CHECK_FALSE(hurt.passed());
  bool law = false;
  for (const auto &e : hurt.entries)
  {
    if (e.name == "dilation.gradient_law")
    {
      law = !e.passed;
    }
  }
  CHECK(law);
  CHECK_FALSE(check_suite(false, 7, {"mixed", 1.0 + 1e-3}).passed());

  const auto full = check_suite(true, 7);
  CHECK(full.passed());
  CHECK(full.entries.size() > quick.entries.size());
}

TEST_CASE("command line: ground and check")
{
  auto r = cli({"ground", "--N", "1", "--p", "4", "--mu", "1"});
  REQUIRE(r.code == exit_ok);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["shoot_value"].get<double>() - 1.41421356237) <= 1e-6);

  r = cli({"check", "--quick"});
  CHECK(r.code == exit_ok);
  CHECK(nlohmann::json::parse(r.out)["passed"].get<bool>());
  r = cli({"check", "--quick", "--perturb", "pow2:1.001"});
  CHECK(r.code == exit_solver_failure);

  r = cli({"level-curve", "--N", "3", "--p", "3", "--masses", "1,2"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.rfind("a,lambda_a,m\n", 0) == 0);
}

TEST_CASE("command line: errors")
{
  CHECK(cli({"ground", "--bogus"}).code == exit_config_error);
  CHECK(cli({"frobnicate"}).code == exit_config_error);
  CHECK(cli({}).code == exit_config_error);
  CHECK(cli({"ground", "--N", "3", "--p", "3.3333333333333335"}).code == exit_config_error);
  TempDir t;
  const auto bad = t.file("bad.toml", "[params]\np1 = [\n");
  CHECK(cli({"minimize", "--config", bad}).code == exit_config_error);
  const auto mixed = t.file("mixed.toml", "[params]\np2 = 4.0\nr1 = 1.5\nr2 = 2.5\n");
  const auto r = cli({"minimize", "--params", mixed});
  CHECK(r.code == exit_config_error);
  CHECK(r.err.find("Mixed") != std::string::npos);
  CHECK(cli({"check", "--quick", "--full"}).code == exit_config_error);
  CHECK(cli({"ground", "--N", "1", "--p", "4", "--out", "/proc/nlsnorm_forbidden"}).code ==
        exit_config_error);
}

TEST_CASE("command line: minimize output tree and determinism")
{
  TempDir t;
  const auto cfg = t.file("subcritical_min.toml", subcritical_min);
  const auto a = (t.path / "a").string(), b = (t.path / "b").string();
  const auto ra = cli({"minimize", "--config", cfg, "--seed", "3", "--out", a});
  REQUIRE(ra.code == exit_ok);
  const auto j = nlohmann::json::parse(ra.out);
  CHECK(j["lambda1"].get<double>() < 0.0);
  CHECK(j["lambda2"].get<double>() < 0.0);
  CHECK(j["converged"].get<bool>());
  for (const char *f : {"config.effective.toml", "solution.json", "report.json", "fields/u1.csv",
                        "fields/u2.csv"})
  {
    CHECK(fs::exists(fs::path(a) / f));
  }
  CHECK(nlohmann::json::parse(slurp(fs::path(a) / "report.json"))["passed"].get<bool>());

  // The effective config reproduces the run; flags won over the file.
  const auto eff = load_config((fs::path(a) / "config.effective.toml").string());
  CHECK(eff.seed == 3);
  CHECK(eff.out == a);
  CHECK(eff.params == parse_config(subcritical_min).params);

  REQUIRE(cli({"minimize", "--config", cfg, "--seed", "3", "--out", b}).code == exit_ok);
  CHECK(without_timestamp(slurp(fs::path(a) / "solution.json")) ==
        without_timestamp(slurp(fs::path(b) / "solution.json")));
  CHECK(slurp(fs::path(a) / "fields/u1.csv") == slurp(fs::path(b) / "fields/u1.csv"));
}

TEST_CASE("command line: sweep and fiber")
{
  TempDir t;
  const auto sup = t.file("sup.toml", "[params]\np1 = 4.0\np2 = 4.0\nr1 = 2.0\nr2 = 2.0\n");
  const auto out = (t.path / "sw").string();
  const auto r = cli({"sweep", "--params", sup, "--beta-list", "0.05,1", "--out", out});
  REQUIRE(r.code == exit_ok);
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "a1,a2,beta,converged,J,lambda1,lambda2,Q,residual,nodes");
  int rows = 0;
  while (std::getline(csv, line))
  {
    ++rows;
    const auto cols = parse_list(line);
    REQUIRE(cols.size() == 10);
    CHECK(cols[3] == 1.0);
    CHECK(cols[5] < 0.0);
  }
  CHECK(rows == 2);
  CHECK(fs::exists(fs::path(out) / "sweep.csv"));
  CHECK(fs::exists(fs::path(out) / "solutions" / "a1_1_a2_1_beta_0.05_solution.json"));
  CHECK(fs::exists(fs::path(out) / "fields" / "a1_1_a2_1_beta_1_u2.csv"));

  const auto f = cli({"fiber", "--params", sup, "--s-range", "-1,1,5"});
  REQUIRE(f.code == exit_ok);
  CHECK(f.out.rfind("s,J,Q\n", 0) == 0);
  CHECK(std::count(f.out.begin(), f.out.end(), '\n') == 6);
}
