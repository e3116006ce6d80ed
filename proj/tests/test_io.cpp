#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "hydro/error.hpp"
#include "hydro/experiments.hpp"
#include "hydro/io.hpp"

using namespace hydro;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "hydro_test_io";
  fs::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigInvalid;
}

std::string body(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  std::getline(in, line);
  while (std::getline(in, line)) out += line + "\n";
  return out;
}

json two_lane_json() { return json::parse(R"({"n":2,"d":[0.8,0.2],"q":[[0,0.2],[1,0]]})"); }

}  // namespace

TEST_CASE("model json round trip") {
  const ModelSpec spec = model_from_json(two_lane_json());
  CHECK(spec.n == 2);
  CHECK(spec.l.isZero());
  CHECK(spec.q(1, 0) == 1.0);
  const ModelSpec again = model_from_json(model_to_json(spec));
  CHECK(again.q == spec.q);
  CHECK(again.d == spec.d);
  const ModelSpec power = model_from_json(json::parse(R"({"n":2,"d":[1,1],"q":[[0,1],[1,0]],"theta":{"mode":"power","a":0.5}})"));
  CHECK(power.theta.kind == ThetaMode::Kind::Power);
}

TEST_CASE("malformed model json reports line and column") {
  try {
    parse_model("{\n  \"n\": 2,\n  \"d\": [1, \n}");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
  CHECK(code_of([] { parse_model(R"({"n":2,"d":[1]})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_model(R"({"n":2,"d":[1,0]})"); }) == ErrorCode::ZeroLaneRate);
  CHECK(code_of([] { load_model("/nonexistent/model.json"); }) == ErrorCode::IoError);
}

TEST_CASE("csv writer and reader") {
  const fs::path p = scratch() / "table.csv";
  {
    CsvWriter out(p.string(), {"density", "abc", 7}, {"t", "x", "lane", "rho"});
    out.row({"0", "0.5", "0", "0.25"});
    CHECK_THROWS_AS(out.row({"1"}), Error);
  }
  const CsvTable t = read_csv(p.string());
  CHECK(t.meta.at("schema") == "density");
  CHECK(t.meta.at("config_hash") == "abc");
  CHECK(t.meta.at("seed") == "7");
  CHECK(t.meta.at("version") == kSchemaVersion);
  CHECK(t.column("rho") == 3);
  CHECK_THROWS_AS(t.column("missing"), Error);
  CHECK(code_of([] { read_csv("/nonexistent.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("config hash is stable and sensitive") {
  const json a = {{"kind", "flux"}, {"seed", 1}};
  const json b = {{"kind", "flux"}, {"seed", 2}};
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("parsers") {
  CHECK(parse_range("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_profile("riemann:1.5:0.5")(-0.1) == 1.5);
  CHECK(parse_profile("riemann:1.5:0.5")(0.1) == 0.5);
  CHECK(parse_profile("constant:0.3")(4.0) == 0.3);
  CHECK(parse_window("-2:2").hi == 2.0);
  CHECK(code_of([] { parse_profile("wave:1"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_range("0:1"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_window("1:0"); }) == ErrorCode::ConfigInvalid);
  CHECK(target_flux_by_name("logistic")(0.5) == 0.25);
  CHECK(code_of([] { target_flux_by_name("nope"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("experiments write artifacts with manifests and are deterministic") {
  const fs::path dir = scratch();
  const json model = two_lane_json();
  ExperimentConfig cfg;
  cfg.kind = "simulate";
  cfg.params = {{"model", model}, {"N", 100}, {"T", 0.5}, {"window", "-1:1"}};
  cfg.seed = 42;
  cfg.output = (dir / "a.csv").string();
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "a.csv.manifest.json"));
  cfg.output = (dir / "b.csv").string();
  run_experiment(cfg);
  CHECK(body(dir / "a.csv") == body(dir / "b.csv"));
  std::ifstream manifest(dir / "a.csv.manifest.json");
  const json m = json::parse(manifest);
  CHECK(m.at("seed") == 42);
  CHECK(m.contains("wall_time_s"));
  CHECK(m.contains("timestamp"));
  CHECK(m.at("config_hash") == read_csv((dir / "a.csv").string()).meta.at("config_hash"));

  cfg.kind = "phase";
  cfg.params = {{"d_range", "0.5:1:3"}, {"r_range", "1:20:3"}};
  cfg.output = (dir / "phase.csv").string();
  const ExperimentResult p = run_experiment(cfg);
  CHECK(fs::exists(dir / "phase_curves.csv"));
  CHECK(read_csv((dir / "phase.csv").string()).rows.size() == 9);
  CHECK(p.artifacts.size() == 3);

  cfg.kind = "nope";
  CHECK(code_of([&] { run_experiment(cfg); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("seed override from the environment") {
  const fs::path dir = scratch();
  ExperimentConfig cfg;
  cfg.kind = "simulate";
  cfg.params = {{"model", two_lane_json()}, {"N", 50}, {"T", 0.5}, {"window", "-1:1"}};
  cfg.seed = 1;
  cfg.output = (dir / "env.csv").string();
  setenv("HYDRO_SEED", "99", 1);
  run_experiment(cfg);
  unsetenv("HYDRO_SEED");
  CHECK(read_csv(cfg.output).meta.at("seed") == "99");
}

TEST_CASE("compare fields") {
  const fs::path dir = scratch();
  auto write = [&](const std::string& name, double lane0, double lane1) {
    CsvWriter out((dir / name).string(), {"density", "h", 0}, {"t", "x", "lane", "rho"});
    for (int k = 0; k < 10; ++k) {
      const std::string x = format_number(0.05 + 0.1 * k);
      out.row({"1", x, "0", format_number(lane0 * k / 10.0)});
      out.row({"1", x, "1", format_number(lane1)});
      out.row({"1", x, "total", format_number(lane0 * k / 10.0 + lane1)});
    }
  };
  write("a.csv", 1.0, 0.3);
  write("perm.csv", 0.3, 1.0);
  const json same = compare_fields((dir / "a.csv").string(), (dir / "a.csv").string(), std::nullopt, "both");
  CHECK(same.at("identical") == true);
  CHECK(same.at("max") == 0.0);
  CHECK(same.at("snapshots")[0].at("lanes").at("total").at("l1") == 0.0);

  const json perm = compare_fields((dir / "a.csv").string(), (dir / "perm.csv").string(), std::nullopt, "l1");
  CHECK(perm.at("identical") == false);
  CHECK(perm.at("snapshots")[0].at("lanes").at("0").at("mismatch") == true);
  CHECK(perm.at("snapshots")[0].at("lanes").at("1").at("mismatch") == true);

  {
    CsvWriter out((dir / "flux.csv").string(), {"flux", "h", 0}, {"rho", "G"});
    out.row({0.0, 0.0});
  }
  CHECK(code_of([&] { compare_fields((dir / "a.csv").string(), (dir / "flux.csv").string(), std::nullopt, "l1"); }) ==
        ErrorCode::SchemaMismatch);
}
