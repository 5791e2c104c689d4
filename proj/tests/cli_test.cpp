#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "mfguc/cli.hpp"
#include "mfguc/config.hpp"
#include "mfguc/errors.hpp"

using namespace mfguc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mfguc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("mfguc-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

const fs::path example = fs::path(MFGUC_SOURCE_DIR) / "configs" / "example.ini";

}  // namespace

TEST_CASE("config defaults, overrides and hashing") {
  const auto c = config::load(example);
  CHECK(c.geometry.domain.dimension == 1);
  CHECK(c.case_id == "1d-nonlinear");
  CHECK(c.uc.noise_levels == std::vector<double>{0.1, 0.01, 0.001});
  CHECK(c.uc.s_steps == 50);
  CHECK(c.hash() == config::load(std::nullopt).hash());

  const auto moved = config::load(example, {"run.output_dir=/elsewhere", "run.workers=4"});
  CHECK(moved.hash() == c.hash());
  const auto changed = config::load(example, {"uc.rho=5"});
  CHECK(changed.hash() != c.hash());
  CHECK(*changed.uc.rho == 5.0);

  CHECK_THROWS_AS(config::load(std::nullopt, {"grid.n9=3"}), ConfigError);
  CHECK_THROWS_AS(config::load(std::nullopt, {"grid.n1=abc"}), ConfigError);
  CHECK_THROWS_AS(config::load(std::nullopt, {"no equals sign"}), ConfigError);
  CHECK_THROWS_AS(config::load(std::nullopt, {"uc.s_grid=1:5"}), ConfigError);
  CHECK_THROWS_AS(config::load(std::string("/no/such/file.ini")), ConfigError);
  CHECK_THROWS_AS(config::validate(config::load(std::nullopt, {"grid.nt=32"})), ConfigError);
  CHECK_THROWS_AS(config::validate(config::load(std::nullopt, {"mfg.case_id=2d-smooth"})), Error);
}

TEST_CASE("zero case dumps zeros") {
  TempDir dir;
  const auto r = run({"solve", "--set", "mfg.case_id=zero", "-o", dir.path.string()});
  REQUIRE(r.code == 0);
  std::istringstream u(slurp(dir.path / "u.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(u, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
    CHECK(line.substr(line.rfind(',') + 1) == "0");
    ++rows;
  }
  CHECK(rows == 33 * 33);
}

TEST_CASE("every CSV echoes the config hash") {
  TempDir dir;
  const auto hash = config::load(std::nullopt).hash();
  for (const char* cmd : {"solve", "carleman", "uc"}) REQUIRE(run({cmd, "-o", dir.path.string()}).code == 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    CHECK(slurp(e.path()).find("config_hash=" + hash) != std::string::npos);
  }
  CHECK(csvs >= 6);
  const auto verdict = nlohmann::json::parse(slurp(dir.path / "uc_verdict.json"));
  CHECK(verdict["config_hash"] == hash);
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir a, b;
  for (const char* cmd : {"carleman", "uc", "sweep-t0"}) {
    REQUIRE(run({cmd, "-c", example.string(), "-o", a.path.string()}).code == 0);
    REQUIRE(run({cmd, "-c", example.string(), "--set", "run.workers=3", "-o", b.path.string()}).code == 0);
  }
  for (const auto& e : fs::directory_iterator(a.path)) CHECK(slurp(e.path()) == slurp(b.path / e.path().filename()));
}

TEST_CASE("lemma1-k2 on reversed input reproduces lemma1-k1") {
  TempDir a, b;
  REQUIRE(run({"carleman", "-o", a.path.string(), "--set", "mfg.case_id=1d-nonlinear", "--set", "carleman.input=case"})
              .code == 0);
  REQUIRE(run({"carleman", "-o", b.path.string(), "--set", "mfg.case_id=1d-nonlinear", "--set", "carleman.input=case",
               "--set", "carleman.estimate=lemma1-k2", "--set", "carleman.time_reversed=true"})
              .code == 0);
  std::istringstream x(slurp(a.path / "carleman.csv")), y(slurp(b.path / "carleman.csv"));
  std::string lx, ly;
  std::getline(x, lx);
  std::getline(y, ly);
  std::getline(x, lx);
  std::getline(y, ly);
  int rows = 0;
  while (std::getline(x, lx) && std::getline(y, ly)) {
    std::istringstream fx(lx), fy(ly);
    std::string cx, cy;
    while (std::getline(fx, cx, ',') && std::getline(fy, cy, ',')) {
      if (cx == "NA" || cy == "NA") {
        CHECK(cx == cy);
        continue;
      }
      const double vx = std::stod(cx), vy = std::stod(cy);
      CHECK(std::abs(vx - vy) <= 1e-10 * std::max(std::abs(vx), std::abs(vy)));
    }
    ++rows;
  }
  CHECK(rows == 40);
}

TEST_CASE("zero-mismatch uc run passes with a zero bound") {
  TempDir dir;
  REQUIRE(run({"uc", "--set", "uc.perturbation=zero", "-o", dir.path.string()}).code == 0);
  const auto j = nlohmann::json::parse(slurp(dir.path / "uc_verdict.json"));
  CHECK(j["verdict"]["pass"] == true);
  CHECK(j["verdict"]["bound"] == 0.0);
  const auto rec = j["reconstruction"];
  REQUIRE(rec.size() == 3);
  CHECK(rec[0]["window_error"].get<double>() > rec[1]["window_error"].get<double>());
  CHECK(rec[1]["window_error"].get<double>() > rec[2]["window_error"].get<double>());
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto o = dir.path.string();
  CHECK(run({"solve", "--set", "grid.n1=abc", "-o", o}).code == 2);
  CHECK(run({"solve", "--set", "bogus.key=1", "-o", o}).code == 2);
  CHECK(run({"solve", "-c", "/no/such.ini", "-o", o}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"solve", "--set", "geometry.gamma_faces=x0,x1", "-o", o}).code == 2);
  CHECK(run({"solve", "--set", "geometry.beta=1000", "-o", o}).code == 2);

  const auto uc = run({"uc", "--set", "uc.T=0.5", "-o", o});
  CHECK(uc.code == 2);
  CHECK(uc.err.find("2 delta") != std::string::npos);
  CHECK(run({"sweep-t0", "--set", "uc.T=0.4", "-o", o}).code == 2);

  const auto guard = run({"carleman", "--set", "carleman.s_max=1e6", "-o", o});
  CHECK(guard.code == 2);
  CHECK(guard.err.find("max admissible s") != std::string::npos);

  CHECK(run({"solve", "--set", "geometry.dimension=2", "--set", "geometry.gamma_faces=x0,y0,y1", "--set", "grid.n2=9",
             "--set", "grid.n1=9", "--set", "grid.nt=9", "--set", "mfg.case_id=1d-nonlinear", "-o", o})
            .code == 2);

  CHECK(run({"solve", "--set", "mfg.max_inner=1", "-o", o}).code == 1);
}

TEST_CASE("output directory precedence") {
  TempDir cfg_dir, env_dir, flag_dir;
  const std::string set = "run.output_dir=" + cfg_dir.path.string();
  REQUIRE(run({"solve", "--set", set}).code == 0);
  CHECK(fs::exists(cfg_dir.path / "u.csv"));

  ::setenv("MFGUC_OUTPUT_DIR", env_dir.path.c_str(), 1);
  REQUIRE(run({"solve", "--set", set}).code == 0);
  CHECK(fs::exists(env_dir.path / "u.csv"));
  REQUIRE(run({"solve", "--set", set, "--output-dir", flag_dir.path.string()}).code == 0);
  CHECK(fs::exists(flag_dir.path / "u.csv"));
  ::unsetenv("MFGUC_OUTPUT_DIR");
}

TEST_CASE("mms ladder reports second order") {
  TempDir dir;
  REQUIRE(run({"mms", "-o", dir.path.string(), "--set", "grid.n1=17", "--set", "grid.nt=17"}).code == 0);
  std::istringstream in(slurp(dir.path / "mms.csv"));
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("level", 0) == 0) continue;
    std::vector<std::string> cols;
    std::istringstream f(line);
    for (std::string c; std::getline(f, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 10);
    if (cols[8] == "NA") continue;
    CHECK(std::stod(cols[8]) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::stod(cols[9]) == doctest::Approx(2.0).epsilon(0.15));
    ++checked;
  }
  CHECK(checked == 2);
}
