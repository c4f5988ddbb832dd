#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "afshape/cli.hpp"
#include "afshape/serialize.hpp"

using namespace afshape;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("afshape_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string field_of(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

int call_main(std::vector<std::string> args) {
  args.insert(args.begin(), "afshape");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("index lists") {
  CHECK(parse_index_list("5,6,7", "k") == std::vector<int>{5, 6, 7});
  CHECK(parse_index_list("-15..-13,11..14", "p") == std::vector<int>{-15, -14, -13, 11, 12, 13, 14});
  CHECK(parse_index_list(" 3 , 1..2 ", "k") == std::vector<int>{1, 2, 3});
  CHECK(parse_index_list("-2", "p") == std::vector<int>{-2});
  CHECK_THROWS_AS(parse_index_list("3..1", "k"), ConfigError);
  CHECK_THROWS_AS(parse_index_list("1,,2", "k"), ConfigError);
  CHECK_THROWS_AS(parse_index_list("a", "p"), ConfigError);
  CHECK_THROWS_AS(parse_index_list("", "p"), ConfigError);
}

TEST_CASE("flags build the experiment config") {
  const CliOptions o =
      parse_config({"--n", "31", "--k", "5,6,7", "--p", "-15..-13,11..14", "--gamma2", "500", "--gamma1", "1000"});
  CHECK(o.config.n == 31);
  CHECK(o.config.region.lags() == std::vector<int>{5, 6, 7});
  CHECK(o.config.region.bins() == std::vector<int>{-15, -14, -13, 11, 12, 13, 14});
  CHECK(o.config.gamma1 == 1000);
  CHECK(o.config.gamma2 == 500);
  CHECK(o.config.epsilon == 1e-6);
  CHECK(o.config.zeta_policy == ZetaPolicy::kExact);
  CHECK(o.config.delta == 0.01);

  const CliOptions b = parse_config({"--zeta-policy", "bound", "--gamma-x", "exact", "--delta", "0.2"});
  CHECK(b.config.zeta_policy == ZetaPolicy::kBound);
  CHECK(b.config.gamma_mode == GammaMode::kExact);
  CHECK(b.config.delta == 0.2);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of({"--k", "0", "--p", "0"}) == "k");
  CHECK(field_of({"--gamma1", "0"}) == "gamma1");
  CHECK(field_of({"--gamma2", "-3"}) == "gamma2");
  CHECK(field_of({"--n", "31", "--k", "40"}) == "k");
  CHECK(field_of({"--n", "31", "--p", "16"}) == "p");
  CHECK(field_of({"--n", "1"}) == "n");
  CHECK(field_of({"--epsilon", "0"}) == "epsilon");
  CHECK(field_of({"--zeta-policy", "loose"}) == "zeta_policy");
  CHECK(field_of({"--bogus"}) == "arguments");
  CHECK(field_of({"--config", "/nonexistent/cfg.json"}) == "config");
}

TEST_CASE("config file with flag overrides") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"n": 16, "k": [1, 2], "p": "-3..-2,4", "gamma1": 7, "seed": 5})";

  const CliOptions f = parse_config({"--config", cfg.string()});
  CHECK(f.config.n == 16);
  CHECK(f.config.region.bins() == std::vector<int>{-3, -2, 4});
  CHECK(f.config.gamma1 == 7);
  CHECK(f.config.seed == 5);

  const CliOptions o = parse_config({"--config", cfg.string(), "--seed", "42", "--gamma1", "3"});
  CHECK(o.config.seed == 42);
  CHECK(o.config.gamma1 == 3);
  CHECK(o.config.n == 16);

  std::ofstream(dir / "bad.json") << R"({"n": "sixteen"})";
  CHECK(field_of({"--config", (dir / "bad.json").string()}) == "n");
  std::ofstream(dir / "broken.json") << "{";
  CHECK(field_of({"--config", (dir / "broken.json").string()}) == "config");
  fs::remove_all(dir);
}

TEST_CASE("seed falls back to the environment") {
  ::setenv("AFSHAPE_SEED", "77", 1);
  CHECK(parse_config({}).config.seed == 77);
  CHECK(parse_config({"--seed", "3"}).config.seed == 3);
  ::setenv("AFSHAPE_SEED", "x1", 1);
  CHECK(field_of({}) == "seed");
  ::unsetenv("AFSHAPE_SEED");
  CHECK(parse_config({}).config.seed == 0);
}

TEST_CASE("config json round trip") {
  const CliOptions o = parse_config({"--n", "20", "--k", "-3,4", "--p", "2..5", "--seed", "9"});
  const SolverConfig back = config_from_json(config_to_json(o.config));
  CHECK(config_to_json(back) == config_to_json(o.config));
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.config = config_to_json(SolverConfig{});
  m.tool_version = kToolVersion;
  m.started = "2026-01-01T00:00:00Z";
  m.finished = "2026-01-01T00:00:01Z";
  m.outputs = {"a/code.csv", "a/trace.csv"};
  m.initial_C = 720.5;
  m.final_C = 0.1 + 0.2;
  m.suppression_db = 13.25;
  m.zeta = 1.0087;
  m.outer_iterations = 12;
  m.converged = true;
  CHECK(manifest_from_json(json::parse(manifest_to_json(m).dump())) == m);
}

TEST_CASE("run and export") {
  const fs::path out = scratch("export");
  CliOptions o = parse_config({"--n", "10", "--k", "2,3", "--p", "1,2", "--gamma1", "15", "--gamma2", "30",
                               "--seed", "4", "--out", out.string()});
  const RunManifest m = run_and_export(o);
  for (const char* f : {"code.csv", "af_grid.csv", "af_grid_db.csv", "trace.csv", "report.json", "manifest.json"})
    CHECK(fs::exists(out / f));
  CHECK(std::distance(fs::directory_iterator(out), fs::directory_iterator{}) == 6);
  CHECK(m.outputs.size() == 6);
  CHECK(m.final_C < m.initial_C);

  const RunManifest disk = manifest_from_json(json::parse(slurp(out / "manifest.json")));
  CHECK(disk == m);
  CHECK(disk.config == config_to_json(o.config));

  const json rep = json::parse(slurp(out / "report.json"));
  CHECK(rep.at("suppression_db").get<double>() == m.suppression_db);

  std::istringstream code(slurp(out / "code.csv"));
  for (const auto& r : parse_code_csv(code)) CHECK(std::abs(r.re * r.re + r.im * r.im - 1.0) < 1e-12);

  const std::string first_code = slurp(out / "code.csv"), first_trace = slurp(out / "trace.csv");
  run_and_export(o);
  CHECK(slurp(out / "code.csv") == first_code);
  CHECK(slurp(out / "trace.csv") == first_trace);

  o.verbose = true;
  o.config.record_inner = true;
  run_and_export(o);
  CHECK(fs::exists(out / "inner_trace.csv"));
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("exit");
  CHECK(call_main({"--dry-run", "--out", out.string()}) == kExitOk);
  CHECK_FALSE(fs::exists(out));
  CHECK(call_main({"--k", "0", "--p", "0"}) == kExitConfig);
  CHECK(call_main({"--gamma1", "0", "--dry-run"}) == kExitConfig);
  CHECK(call_main({"--help"}) == kExitOk);

  // A regular file where the output directory should be.
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  CHECK(call_main({"--n", "6", "--k", "1", "--p", "1", "--gamma1", "2", "--gamma2", "2", "--out",
                   (blocker / "sub").string()}) == kExitIo);
  fs::remove(blocker);

  CHECK(call_main({"--n", "6", "--k", "1", "--p", "1", "--gamma1", "2", "--gamma2", "2", "--out", out.string()}) ==
        kExitOk);
  CHECK(fs::exists(out / "manifest.json"));
  fs::remove_all(out);
}
