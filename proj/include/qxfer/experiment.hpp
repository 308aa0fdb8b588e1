#pragma once

// Exact-evolution experiments: decay and mutual-information time series,
// decay-time extraction, coupling sweeps and straight-line fits.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qxfer/model.hpp"
#include "qxfer/perturb.hpp"

namespace qxfer {

namespace column {
inline constexpr const char* kPNumeric = "P_numeric";
inline constexpr const char* kPPerturbative = "P_perturbative";
inline constexpr const char* kINumeric = "I_numeric";
inline constexpr const char* kIModel = "I_model";
inline constexpr const char* kSA = "S_A";
inline constexpr const char* kSB = "S_B";
}  // namespace column

/// Series columns in CSV order (after t).
const std::vector<std::string>& series_columns();

/// `samples` uniform points on [0, t_max], both ends included.
struct TimeGrid {
  double t_max = 0.0;
  int samples = 0;

  std::vector<double> points() const;
  void validate() const;
};

/// t_max = span · |log 0.2| / Γ with Γ the golden-rule rate of the top A
/// level in the default window.
TimeGrid default_grid(const ModelInstance& model, double span = 1.5, int samples = 400);

struct SeriesMetadata {
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  double coupling = 0.0;
  TimeGrid grid;
};

class TimeSeries {
 public:
  std::vector<double> t;
  SeriesMetadata metadata;

  bool has(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  void set_column(const std::string& name, std::vector<double> values);
  const std::vector<std::pair<std::string, std::vector<double>>>& columns() const {
    return columns_;
  }
  std::size_t size() const { return t.size(); }

 private:
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// Exact decay of |K⟩|ψ0⟩: P(t) = 1 - ⟨Ψ(t)|Π_K ⊗ I|Ψ(t)⟩.
class DecayEvolution {
 public:
  DecayEvolution(const ModelInstance& model, int k);

  double decay_probability(double t) const;
  /// Probability of finding A in eigenstate `level` at time t.
  double population(int level, double t) const;

 private:
  ComplexMatrix eigvec_a_;
  int dim_b_;
  Propagator propagator_;
  int k_;
};

/// Evolution of Ā⊗A⊗B from the maximally entangled state over `band`; Ā is
/// inert. Partition [dimA, dimA, dimB].
class EntangledEvolution {
 public:
  EntangledEvolution(const ModelInstance& model, const std::vector<int>& band);

  StateVector at(double t) const;

 private:
  Partition partition_;
  std::vector<int> branches_;
  std::vector<Propagator> propagators_;
  double amplitude_;
  Eigen::Index block_;
};

/// Excited level used by the decay experiments: the top eigenstate of H_A.
int excited_level(const ModelInstance& model);

TimeSeries run_decay_series(const ModelInstance& model, const TimeGrid& grid);
TimeSeries run_mi_series(const ModelInstance& model, const TimeGrid& grid);
/// Union of both: every CSV column.
TimeSeries run_full_series(const ModelInstance& model, const TimeGrid& grid);

/// First upward crossing of P_numeric through `target`, refined by
/// bisection on exact evolution. Throws NumericalError when not reached.
double find_decay_time(const ModelInstance& model, double target, const TimeGrid& grid);

/// Exact interaction-picture amplitudes ⟨K'|⟨i|e^{iH0 t}e^{-iHt}|K⟩|ψ0⟩ in
/// the same layout as the first-order table.
AmplitudeTable exact_amplitude_table(const ModelInstance& model, const std::vector<int>& initial,
                                     double t);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double fitted_k = std::numeric_limits<double>::quiet_NaN();
};

/// Ordinary least squares y = slope·x + intercept.
RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  double c = 0.0;
  double inv_c_squared = 0.0;
  double t_target = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by c
  RateFit fit;
  double target = 0.8;
  double energy_scale = 1.0;

  /// 2 log 2 / (T · ℰ · c²) per valid row.
  std::vector<double> row_k() const;
};

struct SweepOptions {
  double target = 0.8;
  double span = 4.0;  // grid length in units of the golden-rule decay scale
  int samples = 1000;
  double energy_scale = 1.0;
  bool parallel = true;
};

using ModelFactory = std::function<ModelInstance(double c)>;

/// One decay time per coupling, every row built by `factory` (which should
/// reuse the same Haar seeds). Rows that fail are kept and marked invalid.
SweepResult coupling_sweep(const ModelFactory& factory, std::vector<double> couplings,
                           const SweepOptions& options = {});

/// c = 1/500 + i/6000, i = 1..10.
std::vector<double> default_couplings();

struct AdditivityReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double t_combined = 0.0;
  double t_first = 0.0;
  double t_second = std::numeric_limits<double>::infinity();
  double inv_combined = 0.0;
  double inv_sum = 0.0;
  double ratio = 0.0;  // inv_combined / inv_sum
};

/// Built-in model with two pathways c1·σx_A σx_{B,q1} + c2·σx_A σx_{B,q2},
/// compared with each pathway alone. A zero coupling contributes rate 0.
AdditivityReport pathway_additivity_check(double c1, double c2, std::uint64_t seed_a,
                                          std::uint64_t seed_b, const SweepOptions& options = {},
                                          std::pair<int, int> env_qubits = {1, 2});

}  // namespace qxfer
