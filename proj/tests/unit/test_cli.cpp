#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tunnel/cli.hpp"
#include "tunnel/config.hpp"
#include "tunnel/errors.hpp"

using namespace tunnel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tunnelsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "run.json";
  std::ofstream(path) << text;
  return path;
}

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallGrid = R"({"n_points": 1024, "box_length": 256, "theta_values_deg": [30, 60]})";

}  // namespace

TEST_CASE("config defaults are materialized") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.depth_s == 3.21);
  CHECK(cfg.theta0_deg == 45.0);
  CHECK(cfg.n_points == 4096u);
  CHECK(cfg.dt == 5e-3);
  const auto j = cfg.to_json();
  CHECK(j.at("beta").get<double>() == 1.0);
  CHECK(j.at("snapshots").get<std::string>() == "0:130:5us");
  CHECK(parse_config(j.dump()).to_json() == j);
}

TEST_CASE("config overrides and lists") {
  const auto cfg = parse_config(R"({"depth_s": 4.5, "beta_values": [0.5], "preset": "flagship"})");
  CHECK(cfg.depth_s == 4.5);
  REQUIRE(cfg.beta_values.size() == 1);
  CHECK(cfg.beta_values[0] == 0.5);
  CHECK(cfg.preset == "flagship");
}

TEST_CASE("config errors name every offending key") {
  auto problems_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(problems_of(R"({"depth_s": -1})").find("depth_s") != std::string::npos);
  const auto many = problems_of(R"({"depth_s": -1, "beta": "one", "bogus": 3, "n_points": 0})");
  for (const char* key : {"depth_s", "beta", "bogus", "n_points"}) CHECK(many.find(key) != std::string::npos);
  CHECK(problems_of(R"({"depth_s": 3, "depth_s": 4})").find("duplicate") != std::string::npos);
  CHECK(problems_of(R"({"physical": {"depth_s": 3}})").find("physical") != std::string::npos);
  CHECK_FALSE(problems_of("[1, 2]").empty());
  CHECK_FALSE(problems_of("{not json").empty());
}

TEST_CASE("snapshot schedule") {
  const double unit = 24.207e-6;
  const auto t = parse_schedule("0:130:5us", unit);
  REQUIRE(t.size() == 27u);
  CHECK(t.front() == 0.0);
  CHECK(t.back() * unit * 1e6 == doctest::Approx(130.0));
  CHECK(parse_schedule("0:1:0.25", unit).size() == 5u);
  CHECK(parse_schedule("0:2:1ms", unit)[1] * unit == doctest::Approx(1e-3));
  CHECK_THROWS_AS(parse_schedule("0:10", unit), ConfigError);
  CHECK_THROWS_AS(parse_schedule("0:10:0us", unit), ConfigError);
  CHECK_THROWS_AS(parse_schedule("10:0:1us", unit), ConfigError);
  CHECK_THROWS_AS(parse_schedule("0:10:1h", unit), ConfigError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"no-such-command"}).code == kExitConfig);
  const auto missing = run({"evolve"});
  CHECK(missing.code == kExitConfig);
  CHECK(missing.err.find("--config") != std::string::npos);

  const auto bad = write_config(dir, R"({"depth_s": -1, "bogus": 1})");
  const auto r = run({"bands", "-c", bad.string(), "-o", (dir / "out").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("depth_s") != std::string::npos);
  CHECK(r.err.find("bogus") != std::string::npos);

  const auto good = write_config(dir, "{}");
  CHECK(run({"calibrate", "-c", good.string(), "--period", "1", "--period-us", "2"}).code == kExitConfig);
  std::ofstream(dir / "table.csv") << "depth_s,period\n2,5\n3,4.5\n";
  const auto out_of_range =
      run({"calibrate", "--period", "9", "--table", (dir / "table.csv").string(), "-o", (dir / "cal").string()});
  CHECK(out_of_range.code == kExitConfig);
}

TEST_CASE("calibrate from a table") {
  const auto dir = scratch("calibrate");
  std::ofstream(dir / "table.csv") << "depth_s,period\n2,5\n3,4.5\n4,4.2\n";
  const auto r = run({"calibrate", "--period", "4.35", "--sigma", "0.06", "--table", (dir / "table.csv").string(),
                      "-o", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("s0 = 3.50 ± 0.20") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "calibration.json"));
  CHECK(j.at("depth_s").get<double>() == doctest::Approx(3.5));
}

TEST_CASE("manifest and bitwise reproducible classical output") {
  const auto dir = scratch("classical");
  const auto cfg = write_config(dir, kSmallGrid);
  REQUIRE(run({"classical", "-c", cfg.string(), "-o", (dir / "a").string()}).code == kExitOk);
  REQUIRE(run({"classical", "-c", cfg.string(), "-o", (dir / "b").string()}).code == kExitOk);
  for (const char* f : {"classical_vs_theta.csv", "classical_vs_depth.csv"}) {
    CHECK_FALSE(slurp(dir / "a" / f).empty());
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest.at("tool") == "tunnelsim");
  CHECK(manifest.at("command") == "classical");
  CHECK(manifest.at("config").at("n_points") == 1024);
  CHECK(manifest.at("outputs").size() == 2u);
  CHECK(manifest.at("summary").get<std::string>().find("classical period") != std::string::npos);
}

TEST_CASE("bands command writes bands and projection") {
  const auto dir = scratch("bands");
  const auto cfg = write_config(dir, kSmallGrid);
  const auto r = run({"bands", "-c", cfg.string(), "-o", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir / "out" / "bands.csv").rfind("q,E0", 0) == 0);
  const auto proj = nlohmann::json::parse(slurp(dir / "out" / "projection.json"));
  CHECK(proj.contains("unbound_fraction"));
}

TEST_CASE("evolve is bitwise reproducible and honours the schedule") {
  const auto dir = scratch("evolve");
  const auto cfg = write_config(dir, kSmallGrid);
  for (const char* sub : {"a", "b"})
    REQUIRE(run({"evolve", "-c", cfg.string(), "--snapshots", "0:20:10us", "-o", (dir / sub).string()}).code ==
            kExitOk);
  int snapshots = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const auto name = e.path().filename().string();
    if (name.rfind("snapshot_", 0) != 0 || e.path().extension() != ".csv") continue;
    ++snapshots;
    CHECK(slurp(e.path()) == slurp(dir / "b" / name));
  }
  CHECK(snapshots == 3);
}

TEST_CASE("scan results do not depend on the thread count") {
  auto cfg = parse_config(kSmallGrid);
  auto settings = cfg.scan_settings();
  const std::vector<double> depths{2.5, 3.21};
  settings.threads = 1;
  const auto serial = run_scan(ScanAxis::depth_s, depths, settings, Observable::period);
  settings.threads = 2;
  const auto parallel = run_scan(ScanAxis::depth_s, depths, settings, Observable::period);
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    CHECK(serial.points[i].ok);
    CHECK(serial.points[i].value == parallel.points[i].value);
    CHECK(serial.points[i].sigma == parallel.points[i].sigma);
  }
  CHECK(serial.to_json() == parallel.to_json());
}
