#include "qxfer/model_config.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "qxfer/errors.hpp"

namespace qxfer {

using nlohmann::json;

namespace {

constexpr const char* kReferenceEnv = "paper-envB";
constexpr const char* kSigmaXEigen = "sigmaX-eigenbasis";
constexpr const char* kSigmaXQubitPrefix = "sigmaX-on-env-qubit-";

std::vector<double> read_spectrum(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(key) + " must be a list of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ComplexMatrix read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": matrix literal must be a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols || cols == 0) {
      throw ConfigError(where + ": matrix literal rows must be equal-length lists");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = row[c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(where + ": matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

OperatorRef read_operator(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  return read_matrix(j, where);
}

std::uint64_t read_seed(const json& j, const char* key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string(key) + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

ComplexMatrix resolve(const OperatorRef& ref, const SpectralDecomposition& eig, int dim,
                      const std::string& where) {
  if (const auto* m = std::get_if<ComplexMatrix>(&ref)) return *m;
  const auto& name = std::get<std::string>(ref);
  if (name == kSigmaXEigen) {
    if (dim != 2) throw ConfigError(where + ": " + name + " requires a two-level subsystem");
    return sigma_x_in_eigenbasis(eig);
  }
  if (name.rfind(kSigmaXQubitPrefix, 0) == 0) {
    const auto ud = static_cast<unsigned>(dim);
    if (!std::has_single_bit(ud)) {
      throw ConfigError(where + ": " + name + " requires a power-of-two dimension");
    }
    const int n_qubits = std::countr_zero(ud);
    int qubit = 0;
    try {
      qubit = std::stoi(name.substr(std::string(kSigmaXQubitPrefix).size()));
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad qubit number in " + name);
    }
    if (qubit < 1 || qubit > n_qubits) {
      throw ConfigError(where + ": qubit " + std::to_string(qubit) + " outside a register of " +
                        std::to_string(n_qubits));
    }
    return sigma_x_on_qubit(n_qubits, qubit);
  }
  throw ConfigError(where + ": unknown operator name '" + name + "'");
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ModelConfig parse_model_config(const json& j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  ModelConfig cfg;
  try {
    for (const char* key : {"dimA", "spectrumA", "dimB", "pathways"}) {
      if (!j.contains(key)) throw ConfigError(std::string("model config: missing field ") + key);
    }
    cfg.dim_a = j.at("dimA").get<int>();
    cfg.dim_b = j.at("dimB").get<int>();
    cfg.spectrum_a = read_spectrum(j.at("spectrumA"), "spectrumA");

    const json* spec_b = j.contains("spectrumB") ? &j.at("spectrumB") : nullptr;
    const bool generator = (j.contains("generator") && j.at("generator") == kReferenceEnv) ||
                           (spec_b && spec_b->is_string());
    if (spec_b && spec_b->is_string() && *spec_b != kReferenceEnv) {
      throw ConfigError("model config: unknown spectrumB generator " + spec_b->dump());
    }
    if (generator) {
      cfg.spectrum_b = reference_env_spectrum();
    } else if (spec_b) {
      cfg.spectrum_b = read_spectrum(*spec_b, "spectrumB");
    } else {
      throw ConfigError("model config: need spectrumB or generator \"paper-envB\"");
    }

    if (!j.at("pathways").is_array()) throw ConfigError("model config: pathways must be a list");
    int g = 0;
    for (const auto& p : j.at("pathways")) {
      const std::string where = "pathway " + std::to_string(g++);
      if (!p.is_object() || !p.contains("c") || !p.contains("opA") || !p.contains("opB")) {
        throw ConfigError(where + ": needs fields c, opA, opB");
      }
      PathwayConfig pc;
      pc.c = p.at("c").get<double>();
      if (p.contains("energyScale")) pc.energy_scale = p.at("energyScale").get<double>();
      pc.op_a = read_operator(p.at("opA"), where + " opA");
      pc.op_b = read_operator(p.at("opB"), where + " opB");
      cfg.pathways.push_back(std::move(pc));
    }
    if (j.contains("seedA")) cfg.seed_a = read_seed(j.at("seedA"), "seedA");
    if (j.contains("seedB")) cfg.seed_b = read_seed(j.at("seedB"), "seedB");
    if (j.contains("psi0") && j.at("psi0") != "groundB") {
      throw ConfigError("model config: psi0 must be \"groundB\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }

  if (cfg.dim_a < 1 || cfg.dim_b < 1) throw ConfigError("model config: dimensions must be >= 1");
  if (static_cast<int>(cfg.spectrum_a.size()) != cfg.dim_a) {
    throw ConfigError("model config: spectrumA length differs from dimA");
  }
  if (static_cast<int>(cfg.spectrum_b.size()) != cfg.dim_b) {
    throw ConfigError("model config: spectrumB length differs from dimB");
  }
  // Canonical form is ascending.
  std::sort(cfg.spectrum_a.begin(), cfg.spectrum_a.end());
  std::sort(cfg.spectrum_b.begin(), cfg.spectrum_b.end());
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("model file " + path + " is not valid JSON: " + e.what());
  }
  return parse_model_config(j);
}

ModelConfig reference_model_config(double c, std::uint64_t seed_a, std::uint64_t seed_b) {
  ModelConfig cfg;
  cfg.dim_a = 2;
  cfg.spectrum_a = {0.0, 1.0};
  cfg.dim_b = 128;
  cfg.spectrum_b = reference_env_spectrum();
  cfg.pathways.push_back({c, 1.0, std::string(kSigmaXEigen), std::string("sigmaX-on-env-qubit-1")});
  cfg.seed_a = seed_a;
  cfg.seed_b = seed_b;
  return cfg;
}

namespace {

ModelInstance build_model_unchecked(const ModelConfig& cfg, std::uint64_t seed) {
  const auto [derived_a, derived_b] = split_seed(seed);
  SubsystemSpec spec_a{cfg.dim_a, cfg.spectrum_a, cfg.seed_a.value_or(derived_a)};
  SubsystemSpec spec_b{cfg.dim_b, cfg.spectrum_b, cfg.seed_b.value_or(derived_b)};
  const auto eig_a = hamiltonian_from_spectrum(spec_a).second;
  const auto eig_b = hamiltonian_from_spectrum(spec_b).second;
  std::vector<PathwaySpec> pathways;
  int g = 0;
  for (const auto& p : cfg.pathways) {
    const std::string where = "pathway " + std::to_string(g++);
    pathways.push_back({p.c, p.energy_scale, resolve(p.op_a, eig_a, cfg.dim_a, where + " opA"),
                        resolve(p.op_b, eig_b, cfg.dim_b, where + " opB")});
  }
  return assemble_model(std::move(spec_a), std::move(spec_b), std::move(pathways), cfg.psi0);
}

}  // namespace

ModelInstance build_model(const ModelConfig& cfg, std::uint64_t seed) {
  try {
    return build_model_unchecked(cfg, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
}

ModelConfig with_uniform_coupling(ModelConfig cfg, double c) {
  for (auto& p : cfg.pathways) p.c = c;
  return cfg;
}

json to_json(const ModelConfig& cfg) {
  json j;
  j["dimA"] = cfg.dim_a;
  j["spectrumA"] = cfg.spectrum_a;
  j["dimB"] = cfg.dim_b;
  if (cfg.spectrum_b == reference_env_spectrum()) {
    j["spectrumB"] = kReferenceEnv;
  } else {
    j["spectrumB"] = cfg.spectrum_b;
  }
  json paths = json::array();
  for (const auto& p : cfg.pathways) {
    json pj;
    pj["c"] = p.c;
    pj["energyScale"] = p.energy_scale;
    for (auto [key, ref] : {std::pair{"opA", &p.op_a}, std::pair{"opB", &p.op_b}}) {
      if (const auto* name = std::get_if<std::string>(ref)) {
        pj[key] = *name;
      } else {
        pj[key] = matrix_to_json(std::get<ComplexMatrix>(*ref));
      }
    }
    paths.push_back(pj);
  }
  j["pathways"] = paths;
  if (cfg.seed_a) j["seedA"] = *cfg.seed_a;
  if (cfg.seed_b) j["seedB"] = *cfg.seed_b;
  j["psi0"] = "groundB";
  return j;
}

}  // namespace qxfer
