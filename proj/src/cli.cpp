#include "qxfer/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qxfer/errors.hpp"
#include "qxfer/experiment.hpp"
#include "qxfer/io.hpp"
#include "qxfer/model_config.hpp"
#include "qxfer/perturb.hpp"
#include "qxfer/plot.hpp"

namespace qxfer {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDefaultCoupling = 1.0 / 400.0;

struct RunConfig {
  std::string command;
  bool paper = false;
  std::string model_path;
  std::optional<double> c;
  std::optional<double> c2;
  std::string c_list = "paper";
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> t_max;
  std::optional<int> samples;
  double target = 0.8;
  std::optional<double> t_band;
  std::vector<int> initial;
  std::vector<int> final;
  std::string out_dir;
  bool no_plot = false;
};

double parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

fs::path output_dir(const RunConfig& rc) {
  std::string dir = rc.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output directory not writable: " + dir);
  return dir;
}

ModelConfig base_config(const RunConfig& rc) {
  if (!rc.model_path.empty()) {
    ModelConfig cfg = load_model_config(rc.model_path);
    return rc.c ? with_uniform_coupling(std::move(cfg), *rc.c) : cfg;
  }
  const auto [sa, sb] = split_seed(rc.seed);
  return reference_model_config(rc.c.value_or(kDefaultCoupling), sa, sb);
}

TimeGrid grid_for(const RunConfig& rc, const ModelInstance& model) {
  TimeGrid grid;
  if (rc.t_max) {
    grid.t_max = *rc.t_max;
    grid.samples = rc.samples.value_or(400);
  } else {
    grid = default_grid(model, 1.5, rc.samples.value_or(400));
  }
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return grid;
}

json run_metadata(const RunConfig& rc, const ModelConfig& cfg, const ModelInstance& model) {
  return {{"command", rc.command},
          {"model_source", rc.model_path.empty() ? std::string("paper") : rc.model_path},
          {"seed", rc.seed},
          {"seedA", model.spec_a.seed},
          {"seedB", model.spec_b.seed},
          {"model", to_json(cfg)}};
}

void write_series(const fs::path& dir, const std::string& stem, const TimeSeries& ts,
                  json meta, const PlotStyle& style, bool plot) {
  std::ostringstream csv;
  write_series_csv(csv, ts);
  write_text_file(dir / (stem + "_series.csv"), csv.str());
  meta["grid"] = to_json(ts.metadata.grid);
  write_text_file(dir / (stem + "_meta.json"), dump_json(meta));
  if (plot) emit_plot(ts, style, dir / (stem + "_plot.svg"));
}

// Pads the columns a non-qubit decay run cannot fill.
void fill_missing_columns(TimeSeries& ts) {
  for (const auto& name : series_columns()) {
    if (!ts.has(name)) {
      ts.set_column(name, std::vector<double>(ts.size(), std::numeric_limits<double>::quiet_NaN()));
    }
  }
}

int cmd_decay(const RunConfig& rc, std::ostream& out) {
  const ModelConfig cfg = base_config(rc);
  const ModelInstance model = build_model(cfg, rc.seed);
  const TimeGrid grid = grid_for(rc, model);
  TimeSeries ts = model.dim_a() == 2 ? run_full_series(model, grid) : run_decay_series(model, grid);
  fill_missing_columns(ts);
  const fs::path dir = output_dir(rc);
  write_series(dir, "decay", ts, run_metadata(rc, cfg, model), decay_plot_style(), !rc.no_plot);
  out << "decay: " << ts.size() << " samples on [0, " << format_number(grid.t_max) << "] -> "
      << (dir / "decay_series.csv").string() << '\n';
  return 0;
}

int cmd_mi(const RunConfig& rc, std::ostream& out) {
  const ModelConfig cfg = base_config(rc);
  const ModelInstance model = build_model(cfg, rc.seed);
  if (model.dim_a() != 2) throw ConfigError("mi: the qubit entropy model needs dimA = 2");
  const TimeGrid grid = grid_for(rc, model);
  const TimeSeries ts = run_full_series(model, grid);
  double max_dev = 0.0;
  const auto& num = ts.column(column::kINumeric);
  const auto& mod = ts.column(column::kIModel);
  for (std::size_t n = 0; n < ts.size(); ++n) max_dev = std::max(max_dev, std::abs(num[n] - mod[n]));
  json meta = run_metadata(rc, cfg, model);
  meta["max_abs_I_model_minus_I_numeric"] = max_dev;
  const fs::path dir = output_dir(rc);
  write_series(dir, "mi", ts, meta, mi_plot_style(), !rc.no_plot);
  out << "mi: max |I_model - I_numeric| = " << format_number(max_dev) << " nats -> "
      << (dir / "mi_series.csv").string() << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& rc, std::ostream& out) {
  if (!(rc.target > 0.0 && rc.target < 1.0)) throw ConfigError("--target must lie in (0, 1)");
  const ModelConfig cfg = base_config(rc);
  const std::vector<double> couplings = parse_coupling_list(rc.c_list);
  const std::uint64_t seed = rc.seed;
  const ModelFactory factory = [cfg, seed](double c) {
    return build_model(with_uniform_coupling(cfg, c), seed);
  };
  SweepOptions options;
  options.target = rc.target;
  if (rc.samples) options.samples = *rc.samples;
  options.energy_scale = cfg.pathways.empty() ? 1.0 : cfg.pathways.front().energy_scale;
  const SweepResult sweep = coupling_sweep(factory, couplings, options);

  const ModelInstance reference = build_model(cfg, rc.seed);
  json meta = run_metadata(rc, cfg, reference);
  meta.erase("model");
  meta["model"] = to_json(with_uniform_coupling(cfg, 0.0));
  meta["target"] = rc.target;
  meta["grid"] = {{"span", options.span}, {"samples", options.samples}};
  meta["energy_scale"] = options.energy_scale;
  meta["fit"] = to_json(sweep.fit);
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    json row = {{"c", r.c}, {"valid", r.valid}};
    if (r.valid) {
      row["T_target"] = r.t_target;
      row["K"] = 2.0 * std::log(2.0) / (r.t_target * options.energy_scale * r.c * r.c);
    } else {
      row["error"] = r.error;
    }
    rows.push_back(row);
  }
  meta["rows"] = rows;

  const fs::path dir = output_dir(rc);
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  write_text_file(dir / "sweep.csv", csv.str());
  write_text_file(dir / "sweep_meta.json", dump_json(meta));
  const bool any_valid =
      std::any_of(sweep.rows.begin(), sweep.rows.end(), [](const auto& r) { return r.valid; });
  if (!rc.no_plot && any_valid) emit_plot(sweep, sweep_plot_style(rc.target), dir / "sweep_plot.svg");

  out << "sweep: " << sweep.rows.size() << " couplings, slope " << format_number(sweep.fit.slope)
      << ", intercept " << format_number(sweep.fit.intercept) << ", r2 "
      << format_number(sweep.fit.r_squared) << " -> " << (dir / "sweep.csv").string() << '\n';
  if (!any_valid) throw NumericalError("sweep: target never reached for any coupling");
  return 0;
}

int cmd_additivity(const RunConfig& rc, std::ostream& out) {
  if (!rc.model_path.empty()) throw ConfigError("additivity: only the built-in model is supported");
  if (!(rc.target > 0.0 && rc.target < 1.0)) throw ConfigError("--target must lie in (0, 1)");
  const double c1 = rc.c.value_or(kDefaultCoupling);
  const double c2 = rc.c2.value_or(c1);
  if (c1 < 0.0 || c2 < 0.0) throw ConfigError("additivity: couplings must be non-negative");
  const auto [sa, sb] = split_seed(rc.seed);
  SweepOptions options;
  options.target = rc.target;
  if (rc.samples) options.samples = *rc.samples;
  AdditivityReport report;
  try {
    report = pathway_additivity_check(c1, c2, sa, sb, options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json meta = {{"command", rc.command}, {"seed", rc.seed}, {"seedA", sa}, {"seedB", sb},
               {"target", rc.target},   {"report", to_json(report)}};
  const fs::path dir = output_dir(rc);
  write_text_file(dir / "additivity.json", dump_json(meta));
  out << "additivity: combined/sum of inverse times = " << format_number(report.ratio) << '\n';
  return 0;
}

int cmd_band(const RunConfig& rc, std::ostream& out) {
  const ModelConfig cfg = base_config(rc);
  const ModelInstance model = build_model(cfg, rc.seed);
  const FirstOrder fo(model);
  BandSpec band;
  band.initial = rc.initial.empty() ? std::vector<int>{excited_level(model)} : rc.initial;
  if (rc.final.empty()) {
    for (int k = 0; k < model.dim_a(); ++k) {
      if (std::find(band.initial.begin(), band.initial.end(), k) == band.initial.end()) {
        band.final.push_back(k);
      }
    }
  } else {
    band.final = rc.final;
  }
  for (int k : band.initial) {
    if (k < 0 || k >= model.dim_a()) throw ConfigError("band: initial index out of range");
  }
  for (int k : band.final) {
    if (k < 0 || k >= model.dim_a()) throw ConfigError("band: final index out of range");
  }
  if (band.final.empty()) throw ConfigError("band: final band is empty");
  band.window = fo.default_window();
  const double t = rc.t_band.value_or(1.0 / band.window);
  if (!(t > 0.0)) throw ConfigError("band: --t must be positive");
  const BandRate rate = fo.band_rate_estimate(band, t);

  const TimeGrid grid = grid_for(rc, model);
  TimeSeries ts;
  ts.t = grid.points();
  std::vector<double> s_a(ts.size()), s_b(ts.size()), deficit(ts.size());
  for (std::size_t n = 0; n < ts.size(); ++n) {
    const BandDensities d = band_reduced_densities(fo.amplitude_table(band.initial, ts.t[n]), band);
    s_a[n] = von_neumann_entropy(d.rho_a);
    s_b[n] = von_neumann_entropy(d.rho_b);
    deficit[n] = d.trace_deficit;
  }

  json meta = run_metadata(rc, cfg, model);
  meta["band"] = {{"initial", band.initial},
                  {"final", band.final},
                  {"window", band.window},
                  {"overlapping", band.overlapping()}};
  meta["t"] = t;
  meta["rate"] = rate.rate;
  meta["information_rate"] = rate.information_rate;
  meta["grid"] = to_json(grid);

  const fs::path dir = output_dir(rc);
  std::ostringstream csv;
  csv << "t,S_A_band,S_B_band,trace_deficit\n";
  for (std::size_t n = 0; n < ts.size(); ++n) {
    csv << format_number(ts.t[n]) << ',' << format_number(s_a[n]) << ','
        << format_number(s_b[n]) << ',' << format_number(deficit[n]) << '\n';
  }
  write_text_file(dir / "band.json", dump_json(meta));
  write_text_file(dir / "band_series.csv", csv.str());
  out << "band: rate " << format_number(rate.rate) << ", information rate "
      << format_number(rate.information_rate) << " at t = " << format_number(t) << '\n';
  return 0;
}

void add_common(CLI::App* sub, RunConfig& rc) {
  auto* paper = sub->add_flag("--paper", rc.paper, "Use the built-in qubit + 7-qubit model (default)");
  auto* model = sub->add_option("--model", rc.model_path, "Model configuration file (JSON)");
  paper->excludes(model);
  sub->add_option("--c", rc.c, "Coupling; overrides every pathway of a model file");
  sub->add_option("--seed", rc.seed, "Seed for the Haar eigenbases")->capture_default_str();
  sub->add_option("--tmax", rc.t_max, "Time grid end");
  sub->add_option("--samples", rc.samples, "Time grid points")->check(CLI::PositiveNumber);
  sub->add_option("--out", rc.out_dir,
                  std::string("Output directory (default $") + kOutDirEnv + " or .)");
  sub->add_flag("--no-plot", rc.no_plot, "Skip SVG output");
}

}  // namespace

std::vector<double> parse_coupling_list(const std::string& spec) {
  if (spec == "paper") return default_couplings();
  std::vector<double> c;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("coupling range must be a:b:n, got '" + spec + "'");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    const double n = parse_double(parts[2]);
    if (n < 2 || n != std::floor(n)) throw ConfigError("coupling range needs an integer n >= 2");
    for (int k = 0; k < static_cast<int>(n); ++k) c.push_back(a + (b - a) * k / (n - 1));
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) c.push_back(parse_double(item));
  }
  if (c.empty()) throw ConfigError("empty coupling list");
  for (double v : c) {
    if (!(v > 0.0)) throw ConfigError("couplings must be positive");
  }
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement and information transfer between coupled subsystems", "qxfer"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* decay = app.add_subcommand("decay", "Exact vs first-order decay probability P(t)");
  auto* mi = app.add_subcommand("mi", "Mutual information I(B, Abar) against the qubit model");
  auto* sweep = app.add_subcommand("sweep", "Decay time T_target across couplings, fit against 1/c^2");
  auto* additivity = app.add_subcommand("additivity", "Two pathways vs the sum of single ones");
  auto* band = app.add_subcommand("band", "Band-averaged golden-rule rate and band entropies");
  for (auto* sub : {decay, mi, sweep, additivity, band}) add_common(sub, rc);
  for (auto* sub : {sweep, additivity}) {
    sub->add_option("--target,--targets", rc.target, "Decay probability defining T_target")
        ->capture_default_str();
  }
  sweep->add_option("--c-list", rc.c_list, "paper | a:b:n | c1,c2,...")->capture_default_str();
  additivity->add_option("--c2", rc.c2, "Coupling of the second pathway (default: --c)");
  band->add_option("--t", rc.t_band, "Time for the rate estimate (default 1/window)");
  band->add_option("--initial", rc.initial, "Initial band of A levels")->delimiter(',');
  band->add_option("--final", rc.final, "Final band of A levels")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (decay->parsed()) return rc.command = "decay", cmd_decay(rc, out);
    if (mi->parsed()) return rc.command = "mi", cmd_mi(rc, out);
    if (sweep->parsed()) return rc.command = "sweep", cmd_sweep(rc, out);
    if (additivity->parsed()) return rc.command = "additivity", cmd_additivity(rc, out);
    if (band->parsed()) return rc.command = "band", cmd_band(rc, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  err << "error: no command\n";
  return 1;
}

}  // namespace qxfer
