#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "hull_lab/config.hpp"
#include "hull_lab/runner.hpp"

using namespace hull_lab;
using cli::Config;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HULL_LAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

nlohmann::ordered_json strip_timing(nlohmann::ordered_json j) {
  j.erase("timing");
  return j;
}

const char* kRemarkConfig = R"cfg(kind = "remark1"
[remark1]
lambda = 2
samples = 500
)cfg";

const char* kHullCheckConfig = R"cfg(kind = "hull-check"
[domain]
box = [0, 1, 0, 1]
nx = 41
ny = 41
mask = "all"
[fields]
f = "(x, y)"
)cfg";

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("config parses tables, arrays, and scalars") {
  const Config cfg = Config::parse_text(R"cfg(
kind = "hull-check"   # trailing comment
flag = true
[domain]
box = [0, 1, -1, 1]
nx = 101
mask = "1 - x^2 - y^2"
names = ["a", "b"]
)cfg");
  CHECK(cfg.str("kind") == "hull-check");
  CHECK(cfg.boolean_or("flag", false));
  CHECK(cfg.number("domain.nx") == 101);
  CHECK(cfg.numbers("domain.box").size() == 4);
  CHECK(cfg.str("domain.mask") == "1 - x^2 - y^2");
  CHECK_FALSE(cfg.has("domain.missing"));
  CHECK_THROWS_AS(cfg.number("domain.mask"), Error);
}

TEST_CASE("parse errors carry line and column") {
  try {
    Config::parse_text("kind = \"x\"\nbad line without equals\n");
    CHECK(false);
  } catch (const cli::ConfigParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(Config::parse_text("a = [1, oops]"), cli::ConfigParseError);
  CHECK_THROWS_AS(Config::parse_text("a = \"unterminated"), cli::ConfigParseError);
}

TEST_CASE("serialization round-trips to an equivalent parse") {
  const Config cfg = Config::parse_text(R"cfg(
kind = "transport"
[domain]
box = [0, 1, 0, 1]
nx = 11
ny = 11
[transport]
beta = "x"
alpha = "0 - y"
F = "t"
counterexample = false
)cfg");
  const Config back = Config::parse_text(cfg.serialize());
  CHECK(back.serialize() == cfg.serialize());
  CHECK(back.str("transport.beta") == "x");
  CHECK(back.number("domain.nx") == 11);
}

TEST_CASE("runner passes and fails by verdict") {
  cli::RunOptions opts;
  opts.write_files = false;

  const Config good = Config::parse_text(kHullCheckConfig);
  CHECK(cli::run_experiment(good, opts).exit_code == 0);

  // A field violating containment exits 1 with the verdict in the report.
  const Config bad = Config::parse_text(R"cfg(kind = "hull-check"
[domain]
box = [-1, 1, -1, 1]
nx = 41
ny = 41
mask = "1 - x^2 - y^2"
[fields]
f = "(1 - x^2 - y^2, 0)"
)cfg");
  const auto res = cli::run_experiment(bad, opts);
  CHECK(res.exit_code == 1);
  CHECK_FALSE(res.report["result"]["holds"].get<bool>());

  // Certificate request on a hull-like-satisfying field reports no-certificate.
  const Config nocert = Config::parse_text(R"cfg(kind = "certificate"
[domain]
box = [-1, 1, -1, 1]
nx = 41
ny = 41
mask = "1 - x^2 - y^2"
[fields]
f = "(x, y)"
[probe]
kind = "linear"
direction = [1, 0]
)cfg");
  const auto res2 = cli::run_experiment(nocert, opts);
  CHECK(res2.exit_code == 1);
  CHECK(res2.report["verdict"] == "no-certificate");
}

TEST_CASE("sequential reports are byte-identical modulo timing") {
  const Config cfg = Config::parse_text(kHullCheckConfig);
  cli::RunOptions opts;
  opts.write_files = false;
  opts.sequential = true;
  const auto a = cli::run_experiment(cfg, opts);
  const auto b = cli::run_experiment(cfg, opts);
  CHECK(strip_timing(a.report).dump() == strip_timing(b.report).dump());
}

TEST_CASE("cli exit codes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hull_lab_cli_test";
  fs::create_directories(dir);

  SUBCASE("remark1 subcommand exits 0") {
    CHECK(run_cli("remark1 --lambda 1.5") == 0);
  }
  SUBCASE("run on a passing config exits 0 and writes a report") {
    spit((dir / "ok.cfg").string(), kRemarkConfig);
    CHECK(run_cli("--sequential --out-dir " + (dir / "out").string() + " run " +
                  (dir / "ok.cfg").string()) == 0);
    CHECK(fs::exists(dir / "out" / "report.json"));
  }
  SUBCASE("parse errors exit 2") {
    spit((dir / "broken.cfg").string(), "kind = \"remark1\"\nthis is not a key value line\n");
    CHECK(run_cli("run " + (dir / "broken.cfg").string()) == 2);
  }
  SUBCASE("unknown kinds exit 3") {
    spit((dir / "weird.cfg").string(), "kind = \"frobnicate\"\n");
    CHECK(run_cli("run " + (dir / "weird.cfg").string()) == 3);
  }
  SUBCASE("missing config exits 3") {
    CHECK(run_cli("run " + (dir / "missing.cfg").string()) == 3);
  }
  SUBCASE("byte-identical report files across runs") {
    spit((dir / "det.cfg").string(), kHullCheckConfig);
    REQUIRE(run_cli("--sequential --out-dir " + (dir / "r1").string() + " run " +
                    (dir / "det.cfg").string()) == 0);
    REQUIRE(run_cli("--sequential --out-dir " + (dir / "r2").string() + " run " +
                    (dir / "det.cfg").string()) == 0);
    auto j1 = nlohmann::ordered_json::parse(slurp((dir / "r1" / "report.json").string()));
    auto j2 = nlohmann::ordered_json::parse(slurp((dir / "r2" / "report.json").string()));
    CHECK(strip_timing(j1).dump() == strip_timing(j2).dump());
  }
}

TEST_CASE("grid scale multiplies the config resolution") {
  const Config cfg = Config::parse_text(kHullCheckConfig);
  cli::RunOptions opts;
  opts.write_files = false;
  opts.grid_scale = 0.5;  // 41 -> 21-ish, still valid
  CHECK(cli::run_experiment(cfg, opts).exit_code == 0);
}

}  // TEST_SUITE
