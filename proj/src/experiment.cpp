#include "qxfer/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qxfer/errors.hpp"

namespace qxfer {

namespace {

const double kLogFifth = std::abs(std::log(0.2));

}  // namespace

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols{column::kPNumeric, column::kPPerturbative,
                                             column::kINumeric, column::kIModel,
                                             column::kSA,       column::kSB};
  return cols;
}

std::vector<double> TimeGrid::points() const {
  validate();
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) {
    t[k] = samples == 1 ? 0.0 : t_max * static_cast<double>(k) / (samples - 1);
  }
  return t;
}

void TimeGrid::validate() const {
  if (samples < 2 || !(t_max > 0.0) || !std::isfinite(t_max)) {
    std::ostringstream msg;
    msg << "time grid needs t_max > 0 and at least 2 samples (got t_max=" << t_max
        << ", samples=" << samples << ")";
    throw std::invalid_argument(msg.str());
  }
}

TimeGrid default_grid(const ModelInstance& model, double span, int samples) {
  const FirstOrder fo(model);
  const double rate = fo.fgr_rate(excited_level(model), fo.default_window());
  if (!(rate > 0.0)) {
    throw NumericalError("default_grid: golden-rule rate is zero, pass an explicit t_max");
  }
  return {span * kLogFifth / rate, samples};
}

bool TimeSeries::has(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.first == name) return c.second;
  }
  throw std::out_of_range("TimeSeries: no column " + name);
}

void TimeSeries::set_column(const std::string& name, std::vector<double> values) {
  if (values.size() != t.size()) {
    throw std::invalid_argument("TimeSeries: column " + name + " length differs from t grid");
  }
  for (auto& c : columns_) {
    if (c.first == name) {
      c.second = std::move(values);
      return;
    }
  }
  columns_.emplace_back(name, std::move(values));
}

DecayEvolution::DecayEvolution(const ModelInstance& model, int k)
    : eigvec_a_(model.eig_a.eigenvectors),
      dim_b_(model.dim_b()),
      propagator_(model.eig_total, product_state(model, k)),
      k_(k) {}

double DecayEvolution::population(int level, double t) const {
  const ComplexVector psi = propagator_.at(t);
  const Eigen::Index da = eigvec_a_.rows();
  ComplexVector projected = ComplexVector::Zero(dim_b_);
  for (Eigen::Index a = 0; a < da; ++a) {
    projected += std::conj(eigvec_a_(a, level)) * psi.segment(a * dim_b_, dim_b_);
  }
  return projected.squaredNorm();
}

// Clamped so roundoff never reports a negative probability.
double DecayEvolution::decay_probability(double t) const {
  return std::clamp(1.0 - population(k_, t), 0.0, 1.0);
}

EntangledEvolution::EntangledEvolution(const ModelInstance& model, const std::vector<int>& band)
    : partition_{model.dim_a(), model.dim_a(), model.dim_b()},
      amplitude_(0.0),
      block_(model.dim()) {
  // Validates the band.
  (void)initial_entangled_state(model, band);
  branches_ = band;
  std::sort(branches_.begin(), branches_.end());
  amplitude_ = 1.0 / std::sqrt(static_cast<double>(branches_.size()));
  for (int k : branches_) propagators_.emplace_back(model.eig_total, product_state(model, k));
}

StateVector EntangledEvolution::at(double t) const {
  ComplexVector psi = ComplexVector::Zero(block_ * partition_[0]);
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    psi.segment(branches_[b] * block_, block_) = amplitude_ * propagators_[b].at(t);
  }
  return {std::move(psi), partition_};
}

int excited_level(const ModelInstance& model) { return model.dim_a() - 1; }

TimeSeries run_decay_series(const ModelInstance& model, const TimeGrid& grid) {
  TimeSeries ts;
  ts.t = grid.points();
  ts.metadata.grid = grid;
  ts.metadata.seed_a = model.spec_a.seed;
  ts.metadata.seed_b = model.spec_b.seed;
  ts.metadata.coupling = model.pathways.empty() ? 0.0 : model.pathways.front().c;

  const int k = excited_level(model);
  const DecayEvolution exact(model, k);
  const FirstOrder first_order(model);
  std::vector<double> p_num(ts.size());
  std::vector<double> p_pert(ts.size());
  for (std::size_t n = 0; n < ts.size(); ++n) {
    p_num[n] = exact.decay_probability(ts.t[n]);
    p_pert[n] = first_order.decay_probability(k, ts.t[n]).value;
  }
  ts.set_column(column::kPNumeric, std::move(p_num));
  ts.set_column(column::kPPerturbative, std::move(p_pert));
  return ts;
}

TimeSeries run_mi_series(const ModelInstance& model, const TimeGrid& grid) {
  if (model.dim_a() != 2) {
    throw std::invalid_argument("run_mi_series: the qubit entropy model needs dim A = 2");
  }
  TimeSeries ts;
  ts.t = grid.points();
  ts.metadata.grid = grid;
  ts.metadata.seed_a = model.spec_a.seed;
  ts.metadata.seed_b = model.spec_b.seed;
  ts.metadata.coupling = model.pathways.empty() ? 0.0 : model.pathways.front().c;

  const DecayEvolution decay(model, excited_level(model));
  const EntangledEvolution entangled(model, {0, 1});
  constexpr int kBar = 0;
  constexpr int kA = 1;
  constexpr int kB = 2;
  const std::vector<int> bar{kBar}, a{kA}, b{kB};

  std::vector<double> i_num(ts.size()), i_model(ts.size()), s_a(ts.size()), s_b(ts.size());
  for (std::size_t n = 0; n < ts.size(); ++n) {
    const StateVector psi = entangled.at(ts.t[n]);
    i_num[n] = mutual_information(psi, b, bar);
    s_a[n] = subsystem_entropy(psi, a);
    s_b[n] = subsystem_entropy(psi, b);
    const double p = std::clamp(decay.decay_probability(ts.t[n]), 0.0, 1.0);
    i_model[n] = qubit_model_mutual_information(p);
  }
  ts.set_column(column::kINumeric, std::move(i_num));
  ts.set_column(column::kIModel, std::move(i_model));
  ts.set_column(column::kSA, std::move(s_a));
  ts.set_column(column::kSB, std::move(s_b));
  return ts;
}

TimeSeries run_full_series(const ModelInstance& model, const TimeGrid& grid) {
  TimeSeries ts = run_decay_series(model, grid);
  const TimeSeries mi = run_mi_series(model, grid);
  for (const auto& [name, values] : mi.columns()) ts.set_column(name, values);
  return ts;
}

double find_decay_time(const ModelInstance& model, double target, const TimeGrid& grid) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("find_decay_time: target must lie in (0, 1)");
  }
  const DecayEvolution exact(model, excited_level(model));
  const auto t = grid.points();
  double prev_t = t.front();
  double prev_p = exact.decay_probability(prev_t);
  double max_p = prev_p;
  for (std::size_t n = 1; n < t.size(); ++n) {
    const double p = exact.decay_probability(t[n]);
    max_p = std::max(max_p, p);
    if (prev_p < target && p >= target) {
      double lo = prev_t;
      double hi = t[n];
      while (hi - lo > 1e-4 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (exact.decay_probability(mid) >= target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t[n];
    prev_p = p;
  }
  std::ostringstream msg;
  msg << "decay target " << target << " never reached on [0, " << grid.t_max
      << "]; max P = " << max_p;
  throw NumericalError(msg.str());
}

AmplitudeTable exact_amplitude_table(const ModelInstance& model, const std::vector<int>& initial,
                                     double t) {
  const int da = model.dim_a();
  const int db = model.dim_b();
  const ComplexMatrix& va = model.eig_a.eigenvectors;
  const ComplexMatrix vb_conj = model.eig_b.eigenvectors.conjugate();
  AmplitudeTable table;
  table.t = t;
  table.dim_a = da;
  table.dim_b = db;
  table.psi0_index = model.psi0_index;
  table.initial = initial;
  for (int k : initial) {
    const ComplexVector psi = Propagator(model.eig_total, product_state(model, k)).at(t);
    ComplexMatrix wmat(da, db);
    for (int a = 0; a < da; ++a) wmat.row(a) = psi.segment(static_cast<Eigen::Index>(a) * db, db);
    ComplexMatrix amps = va.adjoint() * wmat * vb_conj;
    Eigen::MatrixXd de(da, db);
    for (int kf = 0; kf < da; ++kf) {
      for (int i = 0; i < db; ++i) {
        const double e_final = model.eig_a.eigenvalues[kf] + model.eig_b.eigenvalues[i];
        amps(kf, i) *= std::polar(1.0, e_final * t);
        de(kf, i) = e_final - model.eig_a.eigenvalues[k] - model.e0();
      }
    }
    table.amplitudes.push_back(std::move(amps));
    table.delta_e.push_back(std::move(de));
  }
  return table;
}

RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values are all equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (fit.slope * x[k] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> SweepResult::row_k() const {
  std::vector<double> k;
  for (const auto& r : rows) {
    if (r.valid) k.push_back(2.0 * std::numbers::ln2 / (r.t_target * energy_scale * r.c * r.c));
  }
  return k;
}

namespace {

SweepRow sweep_row(const ModelFactory& factory, double c, const SweepOptions& options) {
  SweepRow row;
  row.c = c;
  row.inv_c_squared = 1.0 / (c * c);
  try {
    const ModelInstance model = factory(c);
    row.t_target =
        find_decay_time(model, options.target, default_grid(model, options.span, options.samples));
    row.valid = true;
  } catch (const NumericalError& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult coupling_sweep(const ModelFactory& factory, std::vector<double> couplings,
                           const SweepOptions& options) {
  for (double c : couplings) {
    if (!(c > 0.0)) throw std::invalid_argument("coupling_sweep: couplings must be positive");
  }
  std::sort(couplings.begin(), couplings.end());
  SweepResult result;
  result.target = options.target;
  result.energy_scale = options.energy_scale;
  result.rows.resize(couplings.size());
  if (options.parallel) {
    std::vector<std::future<SweepRow>> jobs;
    for (double c : couplings) {
      jobs.push_back(std::async(std::launch::async, sweep_row, std::cref(factory), c,
                                std::cref(options)));
    }
    for (std::size_t n = 0; n < jobs.size(); ++n) result.rows[n] = jobs[n].get();
  } else {
    for (std::size_t n = 0; n < couplings.size(); ++n) {
      result.rows[n] = sweep_row(factory, couplings[n], options);
    }
  }

  std::vector<double> x, y;
  for (const auto& r : result.rows) {
    if (r.valid) {
      x.push_back(r.inv_c_squared);
      y.push_back(r.t_target);
    }
  }
  if (x.size() >= 2) {
    result.fit = linear_fit(x, y);
    result.fit.fitted_k = 2.0 * std::numbers::ln2 / (options.energy_scale * result.fit.slope);
  } else {
    result.fit = RateFit{std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
  }
  return result;
}

std::vector<double> default_couplings() {
  std::vector<double> c;
  for (int i = 1; i <= 10; ++i) c.push_back(1.0 / 500.0 + i / 6000.0);
  return c;
}

AdditivityReport pathway_additivity_check(double c1, double c2, std::uint64_t seed_a,
                                          std::uint64_t seed_b, const SweepOptions& options,
                                          std::pair<int, int> env_qubits) {
  if (env_qubits.first == env_qubits.second) {
    throw std::invalid_argument("pathway_additivity_check: pathways need different environment qubits");
  }
  if (!(c1 > 0.0) && !(c2 > 0.0)) {
    throw std::invalid_argument("pathway_additivity_check: at least one coupling must be positive");
  }
  auto decay_time = [&](const std::vector<EnvCoupling>& couplings) {
    const ModelInstance model = env_qubit_model(couplings, seed_a, seed_b);
    return find_decay_time(model, options.target,
                           default_grid(model, options.span, options.samples));
  };
  AdditivityReport r;
  r.c1 = c1;
  r.c2 = c2;
  r.t_combined = decay_time({{c1, env_qubits.first}, {c2, env_qubits.second}});
  r.t_first = c1 > 0.0 ? decay_time({{c1, env_qubits.first}})
                       : std::numeric_limits<double>::infinity();
  r.t_second = c2 > 0.0 ? decay_time({{c2, env_qubits.second}})
                        : std::numeric_limits<double>::infinity();
  r.inv_combined = 1.0 / r.t_combined;
  r.inv_sum = 1.0 / r.t_first + 1.0 / r.t_second;
  r.ratio = r.inv_combined / r.inv_sum;
  return r;
}

}  // namespace qxfer
