#include "qxfer/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qxfer/errors.hpp"

namespace qxfer {

namespace {

const char* kSweepHeader = "c,inv_c_squared,T_target,valid";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ConfigError("CSV: not a number: '" + s + "'");
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_series_csv(std::ostream& out, const TimeSeries& ts) {
  out << "t";
  for (const auto& name : series_columns()) out << ',' << name;
  out << '\n';
  std::vector<const std::vector<double>*> cols;
  for (const auto& name : series_columns()) {
    if (!ts.has(name)) throw std::invalid_argument("write_series_csv: missing column " + name);
    cols.push_back(&ts.column(name));
  }
  for (std::size_t n = 0; n < ts.size(); ++n) {
    out << format_number(ts.t[n]);
    for (const auto* c : cols) out << ',' << format_number((*c)[n]);
    out << '\n';
  }
}

TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("series CSV: empty input");
  const auto header = split_csv(strip_cr(line));
  std::vector<std::string> expected{"t"};
  expected.insert(expected.end(), series_columns().begin(), series_columns().end());
  if (header != expected) throw ConfigError("series CSV: unexpected header '" + line + "'");

  TimeSeries ts;
  std::vector<std::vector<double>> cols(series_columns().size());
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != expected.size()) throw ConfigError("series CSV: wrong field count");
    ts.t.push_back(parse_number(fields[0]));
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].push_back(parse_number(fields[c + 1]));
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    ts.set_column(series_columns()[c], std::move(cols[c]));
  }
  return ts;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << kSweepHeader << '\n';
  for (const auto& r : sweep.rows) {
    out << format_number(r.c) << ',' << format_number(r.inv_c_squared) << ','
        << format_number(r.t_target) << ',' << (r.valid ? 1 : 0) << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSweepHeader) {
    throw ConfigError("sweep CSV: unexpected header");
  }
  SweepResult sweep;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4 || (f[3] != "0" && f[3] != "1")) throw ConfigError("sweep CSV: bad row");
    SweepRow row;
    row.c = parse_number(f[0]);
    row.inv_c_squared = parse_number(f[1]);
    row.t_target = parse_number(f[2]);
    row.valid = f[3] == "1";
    sweep.rows.push_back(row);
  }
  return sweep;
}

nlohmann::json to_json(const TimeGrid& grid) {
  return {{"t_max", grid.t_max}, {"samples", grid.samples}};
}

namespace {

// JSON has no NaN; missing values become null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RateFit& fit) {
  return {{"slope", number_or_null(fit.slope)},
          {"intercept", number_or_null(fit.intercept)},
          {"r_squared", number_or_null(fit.r_squared)},
          {"fitted_K", number_or_null(fit.fitted_k)}};
}

nlohmann::json to_json(const AdditivityReport& r) {
  return {{"c1", r.c1},
          {"c2", r.c2},
          {"T_combined", number_or_null(r.t_combined)},
          {"T_first", number_or_null(r.t_first)},
          {"T_second", number_or_null(r.t_second)},
          {"inv_T_combined", number_or_null(r.inv_combined)},
          {"inv_T_sum", number_or_null(r.inv_sum)},
          {"ratio", number_or_null(r.ratio)}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace qxfer
