#pragma once

// Model configuration files (JSON syntax):
//
//   {
//     "dimA": 2, "spectrumA": [0, 1],
//     "dimB": 128, "spectrumB": "paper-envB",
//     "pathways": [{"c": 0.0025, "opA": "sigmaX-eigenbasis", "opB": "sigmaX-on-env-qubit-1"}],
//     "seedA": 1, "seedB": 2,
//     "psi0": "groundB"
//   }
//
// "spectrumB" may be a list or the generator name "paper-envB" (a top-level
// "generator": "paper-envB" is accepted too). Operators are either a name or
// an inline matrix literal: a list of rows whose entries are numbers or
// [re, im] pairs. Seeds are optional and fall back to the experiment seed.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qxfer/model.hpp"

namespace qxfer {

using OperatorRef = std::variant<std::string, ComplexMatrix>;

struct PathwayConfig {
  double c = 0.0;
  double energy_scale = 1.0;
  OperatorRef op_a;
  OperatorRef op_b;
};

struct ModelConfig {
  int dim_a = 0;
  std::vector<double> spectrum_a;
  int dim_b = 0;
  std::vector<double> spectrum_b;
  std::vector<PathwayConfig> pathways;
  std::optional<std::uint64_t> seed_a;
  std::optional<std::uint64_t> seed_b;
  Psi0Selector psi0 = Psi0Selector::GroundB;
};

/// Throws ConfigError on any schema violation.
ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::string& path);

/// The built-in model as a config, for metadata and round trips.
ModelConfig reference_model_config(double c, std::uint64_t seed_a, std::uint64_t seed_b);

/// Resolves operator names against the subsystem eigenbases and assembles.
/// `seed` is split into A/B seeds when the config does not carry them.
ModelInstance build_model(const ModelConfig& cfg, std::uint64_t seed);

/// Copy of cfg with every pathway coupling set to c.
ModelConfig with_uniform_coupling(ModelConfig cfg, double c);

nlohmann::json to_json(const ModelConfig& cfg);

}  // namespace qxfer
