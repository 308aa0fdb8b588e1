#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qxfer/cli.hpp"
#include "qxfer/errors.hpp"
#include "qxfer/experiment.hpp"
#include "qxfer/io.hpp"
#include "qxfer/plot.hpp"

using namespace qxfer;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(QXFER_TEST_TMPDIR) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A small model file so the CLI runs in milliseconds.
fs::path write_small_model(const fs::path& dir) {
  const fs::path p = dir / "small.json";
  std::ofstream(p) << R"({
    "dimA": 2, "spectrumA": [0, 1],
    "dimB": 8, "spectrumB": [0, 0.97, 0.98, 0.99, 1.0, 1.01, 1.02, 1.03],
    "pathways": [{"c": 0.02, "opA": "sigmaX-eigenbasis", "opB": "sigmaX-on-env-qubit-1"}],
    "seedA": 5, "seedB": 6
  })";
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and argument errors") {
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("sweep") != std::string::npos);
  CHECK(run({"decay", "--help"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"decay", "--bogus"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"decay", "--samples", "0"}).code == 1);
  CHECK(run({"decay", "--paper", "--model", "x.json"}).code == 1);
}

TEST_CASE("bad model files") {
  const fs::path dir = fresh_dir("bad_model");
  const Run missing = run({"decay", "--model", (dir / "absent.json").string(), "--out", dir.string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{ \"dimA\": 2,";
  CHECK(run({"decay", "--model", (dir / "broken.json").string(), "--out", dir.string()}).code == 1);

  std::ofstream(dir / "wrong.json") << R"({"dimA": 2, "spectrumA": [0, 1], "dimB": 3,
    "spectrumB": [0, 1, 2],
    "pathways": [{"c": 0.1, "opA": "sigmaX-eigenbasis", "opB": "sigmaX-on-env-qubit-1"}]})";
  CHECK(run({"decay", "--model", (dir / "wrong.json").string(), "--out", dir.string()}).code == 1);
  CHECK_FALSE(fs::exists(dir / "decay_series.csv"));
}

TEST_CASE("decay writes series, metadata and plot") {
  const fs::path dir = fresh_dir("decay");
  const fs::path model = write_small_model(dir);
  const Run r = run({"decay", "--model", model.string(), "--tmax", "400", "--samples", "50",
                     "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream csv(dir / "decay_series.csv");
  const TimeSeries ts = read_series_csv(csv);
  CHECK(ts.size() == 50);
  CHECK(ts.t.back() == 400.0);
  const auto meta = nlohmann::json::parse(slurp(dir / "decay_meta.json"));
  CHECK(meta.contains("grid"));
  CHECK(slurp(dir / "decay_plot.svg").find("<svg") != std::string::npos);

  // Rerunning reproduces every file byte for byte.
  const std::string first_csv = slurp(dir / "decay_series.csv");
  const std::string first_meta = slurp(dir / "decay_meta.json");
  const std::string first_svg = slurp(dir / "decay_plot.svg");
  REQUIRE(run({"decay", "--model", model.string(), "--tmax", "400", "--samples", "50",
               "--out", dir.string()})
              .code == 0);
  CHECK(slurp(dir / "decay_series.csv") == first_csv);
  CHECK(slurp(dir / "decay_meta.json") == first_meta);
  CHECK(slurp(dir / "decay_plot.svg") == first_svg);

  // --c overrides the file's coupling.
  const fs::path other = fresh_dir("decay_c");
  REQUIRE(run({"decay", "--model", model.string(), "--c", "0.01", "--tmax", "400", "--samples",
               "50", "--out", other.string(), "--no-plot"})
              .code == 0);
  CHECK(slurp(other / "decay_series.csv") != first_csv);
  CHECK_FALSE(fs::exists(other / "decay_plot.svg"));
}

TEST_CASE("output directory falls back to the environment") {
  const fs::path dir = fresh_dir("env") / "nested";
  const fs::path model = write_small_model(dir.parent_path());
  ::setenv(kOutDirEnv, dir.string().c_str(), 1);
  const Run r = run({"mi", "--model", model.string(), "--tmax", "300", "--samples", "20", "--no-plot"});
  ::unsetenv(kOutDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "mi_series.csv"));
  CHECK(fs::exists(dir / "mi_meta.json"));
}

TEST_CASE("default sweep") {
  const fs::path dir = fresh_dir("sweep");
  const Run r = run({"sweep", "--paper", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream csv(dir / "sweep.csv");
  const SweepResult sweep = read_sweep_csv(csv);
  REQUIRE(sweep.rows.size() == 10);
  for (const auto& row : sweep.rows) CHECK(row.valid);
  const auto meta = nlohmann::json::parse(slurp(dir / "sweep_meta.json"));
  CHECK(meta["fit"]["slope"].is_number());
  CHECK(meta["fit"]["r_squared"].is_number());
  CHECK(meta["rows"].size() == 10);
  CHECK(meta["target"] == 0.8);
  CHECK(fs::exists(dir / "sweep_plot.svg"));
}

TEST_CASE("sweep with no valid row fails numerically") {
  const fs::path dir = fresh_dir("sweep_fail");
  // Nothing in B is resonant with A, so no coupling reaches the target.
  const fs::path model = dir / "offresonant.json";
  std::ofstream(model) << R"({
    "dimA": 2, "spectrumA": [0, 1], "dimB": 4, "spectrumB": [0, 5, 6, 7],
    "pathways": [{"c": 0.01, "opA": "sigmaX-eigenbasis", "opB": "sigmaX-on-env-qubit-1"}]
  })";
  const Run r = run({"sweep", "--model", model.string(), "--c-list", "0.001,0.002", "--samples",
                     "50", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "sweep_plot.svg"));
}

TEST_CASE("additivity and band commands") {
  const fs::path dir = fresh_dir("misc");
  REQUIRE(run({"additivity", "--paper", "--out", dir.string()}).code == 0);
  const auto add = nlohmann::json::parse(slurp(dir / "additivity.json"));
  CHECK(add["report"]["ratio"].is_number());
  const fs::path model = write_small_model(dir);
  CHECK(run({"additivity", "--model", model.string(), "--out", dir.string()}).code == 1);

  REQUIRE(run({"band", "--paper", "--initial", "0,1", "--final", "0", "--samples", "30", "--out",
               dir.string()})
              .code == 0);
  const auto band = nlohmann::json::parse(slurp(dir / "band.json"));
  CHECK(band["information_rate"].is_number());
  CHECK(band["t"].get<double>() == doctest::Approx(1.0 / band["band"]["window"].get<double>()));
  CHECK(slurp(dir / "band_series.csv").rfind("t,S_A_band,S_B_band,trace_deficit\n", 0) == 0);
  CHECK(run({"band", "--paper", "--initial", "0,5", "--final", "0", "--out", dir.string()}).code ==
        1);
}

TEST_CASE("coupling lists") {
  CHECK(parse_coupling_list("paper") == default_couplings());
  const auto range = parse_coupling_list("0.001:0.002:3");
  REQUIRE(range.size() == 3);
  CHECK(range[1] == doctest::Approx(0.0015));
  CHECK(parse_coupling_list("0.002, 0.001") == std::vector<double>{0.002, 0.001});
  for (const char* bad : {"", "abc", "0.001:0.002", "0.001:0.002:1", "0.1,,0.2", "0.1:0.2:x"}) {
    CHECK_THROWS_AS(parse_coupling_list(bad), ConfigError);
  }
}

TEST_CASE("empty plots are refused before any file is written") {
  const fs::path dir = fresh_dir("plot");
  TimeSeries empty;
  CHECK_THROWS_AS(emit_plot(empty, decay_plot_style(), dir / "p.svg"), std::invalid_argument);
  CHECK_FALSE(fs::exists(dir / "p.svg"));
  SweepResult none;
  none.rows = {{0.002, 250000.0, std::nan(""), false, "x"}};
  CHECK_THROWS_AS(emit_plot(none, sweep_plot_style(0.8), dir / "s.svg"), std::invalid_argument);
  CHECK_FALSE(fs::exists(dir / "s.svg"));
}

}  // TEST_SUITE
