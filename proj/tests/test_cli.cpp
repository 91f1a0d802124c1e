#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "apt/cli.hpp"
#include "doctest.h"

using namespace apt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aptq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aptq_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::set<std::string> files_under(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.insert(fs::relative(e.path(), dir).generic_string());
  return out;
}

std::set<std::string> manifest_of(const fs::path& json_file) {
  const auto j = nlohmann::json::parse(slurp(json_file));
  std::set<std::string> out;
  for (const auto& f : j["manifest"]) out.insert(f.get<std::string>());
  return out;
}

}  // namespace

TEST_CASE("epsilon 0 is a configuration error") {
  const Run r = cli({"solve", "iterative", "--epsilon", "0", "--out", scratch("eps0").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("epsilon") != std::string::npos);
}

TEST_CASE("parse errors and bad values exit with 2") {
  CHECK(cli({"solve", "--no-such-flag"}).code == 2);
  CHECK(cli({}).code == 2);
  const Run r = cli({"solve", "--preset", "problem9"});
  CHECK(r.code == 2);
  CHECK(r.err.find("preset") != std::string::npos);
  CHECK(cli({"solve", "--np", "100"}).err.find("np") != std::string::npos);
}

TEST_CASE("solve writes the files listed in its manifest") {
  const fs::path dir = scratch("solve");
  const Run r = cli({"solve", "iterative", "--preset", "problem1", "--epsilon", "0.1", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto listed = manifest_of(dir / "run.json");
  CHECK(listed == files_under(dir));
  CHECK(listed.count("solution.csv"));
  CHECK(listed.count("plot.py"));
  const std::string csv = slurp(dir / "solution.csv");
  CHECK(csv.rfind("x,rho_oracle,rho_schr,j_oracle,j_schr\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  const auto j = nlohmann::json::parse(slurp(dir / "run.json"));
  for (const char* k : {"sparsity", "max_abs", "dim", "qubits", "chi"}) CHECK(j["counters"].contains(k));
  CHECK(j["counters"]["dim"] == 128 * 74);
  CHECK(j["config"]["schrodingerization"]["np"] == 128);
  CHECK(j["discretization"]["nt"] == 5);
}

TEST_CASE("steady solve also writes the trajectory") {
  const fs::path dir = scratch("steady");
  const Run r = cli({"solve", "steady", "--preset", "problem3", "--epsilon", "1e-8", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto listed = manifest_of(dir / "run.json");
  CHECK(listed == files_under(dir));
  CHECK(listed.count("trajectory.csv"));
}

TEST_CASE("identical configurations give identical CSV output") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& d : {a, b})
    REQUIRE(cli({"solve", "iterative", "--preset", "problem3", "--epsilon", "1e-4", "--out", d.string()}).code == 0);
  CHECK(slurp(a / "solution.csv") == slurp(b / "solution.csv"));
  CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
}

TEST_CASE("sweep produces one row per epsilon") {
  const fs::path dir = scratch("sweep");
  const Run r = cli({"sweep", "--preset", "problem1", "--method", "iterative", "--epsilons", "1e-1,1e-4,1e-8", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(manifest_of(dir / "sweep.json") == files_under(dir));
  CHECK(r.out.find("eps-uniformity ratio") != std::string::npos);
}

TEST_CASE("config file values override flags") {
  const fs::path dir = scratch("ini");
  fs::create_directories(dir);
  {
    std::ofstream ini(dir / "run.ini");
    ini << "[physics]\nepsilon = 0.5\n[discretization]\nnx = 5\n";
  }
  const fs::path out = dir / "out";
  const Run r = cli({"solve", "iterative", "--epsilon", "0.1", "--nx", "9", "--config", (dir / "run.ini").string(),
                     "--out", out.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out / "run.json"));
  CHECK(j["config"]["physics"]["epsilon"] == 0.5);
  CHECK(j["config"]["discretization"]["nx"] == 5);

  {
    std::ofstream ini(dir / "bad.ini");
    ini << "[physics]\nepsilon_typo = 0.5\n";
  }
  const Run bad = cli({"solve", "--config", (dir / "bad.ini").string(), "--out", out.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("physics.epsilon_typo") != std::string::npos);
}

TEST_CASE("preset parameters") {
  const ProblemConfig p1 = preset_config(Preset::problem1, Method::iterative, 0.1);
  CHECK(p1.t_final == 0.05);
  CHECK(p1.Np == 128);
  CHECK(grid_spec(p1).tau == doctest::Approx(0.01));
  const ProblemConfig p2i = preset_config(Preset::problem2, Method::iterative, 1e-8);
  CHECK(p2i.Np == 1024);
  CHECK(p2i.t_final == 0.1);
  const ProblemConfig p2s = preset_config(Preset::problem2, Method::steady, 1e-8);
  CHECK(p2s.Np == 512);
  CHECK(grid_spec(p2s).tau == doctest::Approx(10.0 / 11.0 * 0.01));
  const TransportProblem tp = transport_problem(p2s);
  CHECK(tp.sigma_S(0.5) == doctest::Approx(26.0));
  const ProblemConfig p3 = preset_config(Preset::problem3, Method::steady, 0.1);
  CHECK(transport_problem(p3).F_L(0.3) == doctest::Approx(0.3));
  CHECK(transport_problem(p3).Q(0.2) == 1.0);
}

TEST_CASE("custom preset requires every physics field") {
  ProblemConfig c = preset_config(Preset::custom, Method::iterative, 0.1);
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("physics.sigma_S"), ConfigError);
  c.sigma_S = c.sigma_A = c.Q = c.F_L = c.F_R = std::vector<double>{1.0};
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("bounds on a short ladder") {
  const fs::path dir = scratch("bounds");
  const Run r = cli({"bounds", "--ladder", "4,8", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "bounds.json"));
  CHECK(j["ok"] == true);
  CHECK(j["rungs"].size() == 2);
  for (const auto& rung : j["rungs"]) {
    CHECK(rung["contraction"] == true);
    CHECK(rung["closed_form_ok"] == true);
  }
  CHECK(manifest_of(dir / "bounds.json") == files_under(dir));
  CHECK(cli({"bounds", "--ladder", "5", "--out", dir.string()}).code == 2);
}
