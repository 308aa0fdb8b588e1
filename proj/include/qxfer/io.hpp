#pragma once

// CSV and metadata files.
//
//   series: t,P_numeric,P_perturbative,I_numeric,I_model,S_A,S_B
//   sweep:  c,inv_c_squared,T_target,valid
//
// Numbers are written with 12 significant digits; `valid` is 1 or 0.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qxfer/experiment.hpp"

namespace qxfer {

std::string format_number(double v);

void write_series_csv(std::ostream& out, const TimeSeries& ts);
TimeSeries read_series_csv(std::istream& in);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
SweepResult read_sweep_csv(std::istream& in);

nlohmann::json to_json(const TimeGrid& grid);
nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const AdditivityReport& report);

/// Writes `content` to `path`, replacing any existing file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Pretty-printed JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace qxfer
