#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wander/experiment.hpp"

namespace fs = std::filesystem;
using namespace wander::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("wander_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "wander");
  args.push_back("--quiet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return wander::cli::main(static_cast<int>(argv.size()), argv.data());
}

const char* kArea = R"({"system": {"n": 2, "alpha": 1, "c": 1}, "E": 0, "m": {"from": 4, "to": 64, "factor": 2}})";

}  // namespace

TEST_CASE("area run writes the expected rows") {
  TempDir dir;
  const auto cfg = write(dir.path / "area.json", kArea);
  REQUIRE(run({"area", "--config", cfg, "--out", (dir.path / "out").string()}) == 0);
  std::istringstream csv(slurp(dir.path / "out" / "area.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "m,area_riem,area_symp");
  double m, riem, symp;
  char c1, c2;
  std::istringstream(row) >> m >> c1 >> riem >> c2 >> symp;
  CHECK(m == 4);
  CHECK(riem == doctest::Approx(13.9577).epsilon(1e-5));
  CHECK(symp == doctest::Approx(8.8858).epsilon(1e-5));
  const std::string json = slurp(dir.path / "out" / "area.json");
  CHECK(json.find("\"wall_time_s\"") != std::string::npos);
  CHECK(json.find("\"config\"") != std::string::npos);
}

TEST_CASE("identical config and seed give identical bytes") {
  TempDir dir;
  const auto cfg = write(dir.path / "c.json",
                         R"({"system": {"n": 2}, "E": -1, "samples": 100, "depth": 6, "collision": {"region": [0.5, 1]}})");
  REQUIRE(run({"collision", "--config", cfg, "--seed", "17", "--out", (dir.path / "a").string()}) == 0);
  REQUIRE(run({"collision", "--config", cfg, "--seed", "17", "--out", (dir.path / "b").string()}) == 0);
  CHECK(slurp(dir.path / "a" / "collision.csv") == slurp(dir.path / "b" / "collision.csv"));
  REQUIRE(run({"collision", "--config", cfg, "--seed", "18", "--out", (dir.path / "c").string()}) == 0);
  CHECK(slurp(dir.path / "a" / "collision.csv") != slurp(dir.path / "c" / "collision.csv"));
}

TEST_CASE("echoed config reproduces the run") {
  const auto first = run_experiment(Subcommand::area, kArea, std::nullopt);
  const auto start = first.json.find("\"config\"");
  REQUIRE(start != std::string::npos);
  // re-run from the echoed block
  const auto open = first.json.find('{', start);
  int depth = 0;
  std::size_t close = open;
  for (; close < first.json.size(); ++close) {
    if (first.json[close] == '{') ++depth;
    if (first.json[close] == '}' && --depth == 0) break;
  }
  const auto second = run_experiment(Subcommand::area, first.json.substr(open, close - open + 1), std::nullopt);
  CHECK(second.csv == first.csv);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto cfg = write(dir.path / "area.json", kArea);
  const auto out = dir.path / "out";
  CHECK(run({"nonsense", "--config", cfg, "--out", out.string()}) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run({"area", "--out", out.string()}) == 2);
  CHECK(run({"area", "--config", write(dir.path / "bad.json", "{not json"), "--out", out.string()}) == 2);
  CHECK(run({"area", "--config", write(dir.path / "mis.json", R"({"m": [4]})"), "--out", out.string()}) == 2);
  CHECK(run({"area", "--config", write(dir.path / "typ.json", R"({"E": "zero", "m": [4]})"), "--out", out.string()}) ==
        2);
  CHECK(run({"flowbox", "--config", cfg, "--out", out.string()}) == 2);
  CHECK(run({"area", "--config", write(dir.path / "pre.json", R"({"E": 0, "m": [0]})"), "--out", out.string()}) == 3);
  CHECK(run({"area", "--config", write(dir.path / "emp.json", R"({"E": -10, "m": [4]})"), "--out", out.string()}) ==
        3);
  CHECK_FALSE(fs::exists(out));
  const auto budget = write(dir.path / "budget.json",
                            R"({"E": -1, "samples": 3, "poincare": {"source": 4, "target": 8},
                                "tolerances": {"max_steps": 3}})");
  CHECK(run({"poincare", "--config", budget, "--out", out.string()}) == 4);
  CHECK(run({"area", "--config", write(dir.path / "sub.json", R"({"subcommand": "discrete", "E": 0, "m": [4]})"),
             "--out", out.string()}) == 2);
}

TEST_CASE("every subcommand runs on a small config") {
  TempDir dir;
  struct Case {
    const char* sub;
    const char* cfg;
    const char* header;
  };
  const Case cases[] = {
      {"scaling", R"({"E": 0, "m": {"from": 8, "to": 64}})", "m,area_riem,area_symp"},
      {"flowbox",
       R"({"system": {"c": 0}, "flowbox": {"patch": "plane", "axis": 0, "value": 0, "lo": [0, 1, 0], "hi": [1, 2, 1],
           "t": 0.2, "lhs": "tube_quadrature"}})",
       "lhs,lhs_err,rhs,rhs_err,hit_fraction"},
      {"poincare", R"({"E": -1, "samples": 3})", "index,u0,u1,v0,v1,time,det,density_ratio,residual"},
      {"discrete",
       R"({"discrete": {"pieces": [{"lo": 0, "hi": null, "slope": 1, "offset": 1}],
           "surfaces": {"list": {"1": [["1", "3/2"]], "2": [[2, 2.25]]}}, "depth": 2, "grid": {"points": 1000}}})",
       "M,estimate,censored,bound"},
      {"identities", R"({"samples": 50})", "identity,samples,max_violation,bound,ok"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.sub);
    const auto cfg = write(dir.path / (std::string(c.sub) + ".json"), c.cfg);
    REQUIRE(run({c.sub, "--config", cfg, "--out", dir.path.string()}) == 0);
    const std::string csv = slurp(dir.path / (std::string(c.sub) + ".csv"));
    CHECK(csv.substr(0, csv.find('\n')) == c.header);
  }
  // [1, 3/2) then [2, 9/4): x in [0, 1/4) hits both
  const std::string d = slurp(dir.path / "discrete.csv");
  CHECK(d.find("\n2,0.25,0,") != std::string::npos);
}
