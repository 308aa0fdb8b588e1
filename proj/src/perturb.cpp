#include "qxfer/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qxfer/errors.hpp"

namespace qxfer {

namespace {

// sin(tΔE/2)/ΔE with the resonant limit t/2.
double sinc_factor(double delta_e, double t) {
  if (std::abs(t * delta_e) < kResonanceCutoff) return 0.5 * t;
  return std::sin(0.5 * t * delta_e) / delta_e;
}

// -p log p with 0 log 0 = 0.
double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double checked_probability(double p) {
  constexpr double kSlack = 1e-9;
  if (!(p >= -kSlack && p <= 1.0 + kSlack)) {
    std::ostringstream msg;
    msg << "decay probability " << p << " outside [0, 1]";
    throw std::invalid_argument(msg.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

int AmplitudeTable::slot(int k) const {
  auto it = std::find(initial.begin(), initial.end(), k);
  return it == initial.end() ? -1 : static_cast<int>(it - initial.begin());
}

double AmplitudeTable::transition_weight(int k) const {
  const int s = slot(k);
  if (s < 0) throw std::invalid_argument("AmplitudeTable: initial state not covered");
  return amplitudes[s].cwiseAbs2().sum() - amplitudes[s].row(k).cwiseAbs2().sum();
}

bool AmplitudeTable::conserves_probability(int k) const {
  return transition_weight(k) <= 1.0 + 1e-9;
}

bool BandSpec::overlapping() const {
  return std::any_of(initial.begin(), initial.end(), [&](int k) { return contains(final, k); });
}

FirstOrder::FirstOrder(const ModelInstance& model)
    : energies_a_(model.eig_a.eigenvalues),
      energies_b_(model.eig_b.eigenvalues),
      psi0_index_(model.psi0_index),
      e0_(model.e0()) {
  const int da = model.dim_a();
  const int db = model.dim_b();
  const ComplexMatrix& va = model.eig_a.eigenvectors;
  const ComplexMatrix vb_conj = model.eig_b.eigenvectors.conjugate();
  elements_.reserve(da);
  for (int k = 0; k < da; ++k) {
    const ComplexVector w = model.h_int * product_state(model, k);
    // w as a da x db matrix W(a, b) = w[a*db + b].
    ComplexMatrix wmat(da, db);
    for (int a = 0; a < da; ++a) wmat.row(a) = w.segment(static_cast<Eigen::Index>(a) * db, db);
    elements_.push_back(va.adjoint() * wmat * vb_conj);
  }
}

void FirstOrder::check_indices(int k, int k_final, int i) const {
  if (k < 0 || k >= dim_a() || k_final < 0 || k_final >= dim_a() || i < 0 || i >= dim_b()) {
    std::ostringstream msg;
    msg << "first-order index out of range: K=" << k << " K'=" << k_final << " i=" << i;
    throw std::out_of_range(msg.str());
  }
}

Complex FirstOrder::matrix_element(int k, int k_final, int i) const {
  check_indices(k, k_final, i);
  return elements_[k](k_final, i);
}

double FirstOrder::delta_e(int k, int k_final, int i) const {
  check_indices(k, k_final, i);
  return energies_a_[k_final] + energies_b_[i] - energies_a_[k] - e0_;
}

Complex FirstOrder::amplitude(int k, int k_final, int i, double t) const {
  const double de = delta_e(k, k_final, i);
  const Complex m = elements_[k](k_final, i);
  return Complex(0.0, -2.0) * m * sinc_factor(de, t) * std::polar(1.0, 0.5 * t * de);
}

DecayProbability FirstOrder::decay_probability(int k, double t) const {
  check_indices(k, k, 0);
  double p = 0.0;
  for (int kf = 0; kf < dim_a(); ++kf) {
    if (kf == k) continue;
    for (int i = 0; i < dim_b(); ++i) {
      const double f = sinc_factor(delta_e(k, kf, i), t);
      p += 4.0 * std::norm(elements_[k](kf, i)) * f * f;
    }
  }
  return {p, p <= kPerturbativeLimit};
}

AmplitudeTable FirstOrder::amplitude_table(const std::vector<int>& initial, double t) const {
  AmplitudeTable table;
  table.t = t;
  table.dim_a = dim_a();
  table.dim_b = dim_b();
  table.psi0_index = psi0_index_;
  table.initial = initial;
  for (int k : initial) {
    check_indices(k, k, 0);
    ComplexMatrix amps(dim_a(), dim_b());
    Eigen::MatrixXd de(dim_a(), dim_b());
    for (int kf = 0; kf < dim_a(); ++kf) {
      for (int i = 0; i < dim_b(); ++i) {
        amps(kf, i) = amplitude(k, kf, i, t);
        de(kf, i) = delta_e(k, kf, i);
      }
    }
    table.amplitudes.push_back(std::move(amps));
    table.delta_e.push_back(std::move(de));
  }
  return table;
}

double FirstOrder::fgr_rate(int k, double window) const {
  if (!(window > 0.0)) throw std::invalid_argument("fgr_rate: window must be positive");
  check_indices(k, k, 0);
  double weight = 0.0;
  int count = 0;
  double nearest = std::numeric_limits<double>::infinity();
  for (int kf = 0; kf < dim_a(); ++kf) {
    if (kf == k) continue;
    for (int i = 0; i < dim_b(); ++i) {
      const double de = delta_e(k, kf, i);
      if (std::abs(de) < std::abs(nearest)) nearest = de;
      if (std::abs(de) <= 0.5 * window) {
        weight += std::norm(elements_[k](kf, i));
        ++count;
      }
    }
  }
  if (count == 0) {
    std::ostringstream msg;
    msg << "fgr_rate: no final state within window " << window << " of resonance for K=" << k
        << " (nearest level at detuning " << nearest << ")";
    throw NumericalError(msg.str());
  }
  // 2π · (weight/count) · (count/window)
  return 2.0 * std::numbers::pi * weight / window;
}

double FirstOrder::default_window() const {
  std::vector<double> gaps;
  for (Eigen::Index i = 1; i < energies_b_.size(); ++i) {
    const double g = energies_b_[i] - energies_b_[i - 1];
    if (g > 0.0) gaps.push_back(g);
  }
  if (gaps.empty()) return 1.0;
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return 10.0 * *mid;
}

BandRate FirstOrder::band_rate_estimate(const BandSpec& band, double t) const {
  if (band.initial.empty()) throw std::invalid_argument("band_rate_estimate: empty initial band");
  if (band.final.empty()) throw std::invalid_argument("band_rate_estimate: N' = 0");
  if (!(t > 0.0)) throw std::invalid_argument("band_rate_estimate: t must be positive");
  // Averaged over the initial states that can leave: a state that already
  // belongs to the final band is stationary and has no transition time.
  double total = 0.0;
  int movers = 0;
  for (int k : band.initial) {
    check_indices(k, k, 0);
    if (contains(band.final, k)) continue;
    ++movers;
    double sum = 0.0;
    for (int kf : band.final) {
      if (kf == k) continue;
      check_indices(k, kf, 0);
      for (int i = 0; i < dim_b(); ++i) {
        sum += std::norm(elements_[k](kf, i)) * band_projector_weight(delta_e(k, kf, i), t);
      }
    }
    total += 2.0 * std::numbers::pi * t * sum;
  }
  BandRate r;
  r.rate = movers > 0 ? total / movers : 0.0;
  r.information_rate =
      2.0 * std::log(static_cast<double>(band.initial.size()) / band.final.size()) * r.rate;
  return r;
}

Complex transition_amplitude(const ModelInstance& model, int k, int k_final, int i, double t) {
  return FirstOrder(model).amplitude(k, k_final, i, t);
}

DecayProbability decay_probability_perturbative(const ModelInstance& model, int k, double t) {
  return FirstOrder(model).decay_probability(k, t);
}

double fgr_rate(const ModelInstance& model, int k, double window) {
  return FirstOrder(model).fgr_rate(k, window);
}

BandRate band_rate_estimate(const ModelInstance& model, const BandSpec& band, double t) {
  return FirstOrder(model).band_rate_estimate(band, t);
}

double band_projector_weight(double delta_e, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("band_projector_weight: t must be positive");
  const double x = 0.5 * t * delta_e;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
  return sinc * sinc / (2.0 * std::numbers::pi);
}

QubitEntropies qubit_model_entropies(double p) {
  p = checked_probability(p);
  QubitEntropies s;
  s.s_a = -0.5 * ((1.0 + p) * std::log((1.0 + p) / 2.0) +
                  (p < 1.0 ? (1.0 - p) * std::log((1.0 - p) / 2.0) : 0.0));
  s.s_b = -xlogx(1.0 - p / 2.0) - xlogx(p / 2.0);
  s.s_a = std::max(s.s_a, 0.0);
  s.s_b = std::max(s.s_b, 0.0);
  return s;
}

double qubit_model_mutual_information(double p) {
  const auto s = qubit_model_entropies(p);
  return s.s_b - s.s_a + std::numbers::ln2;
}

BandDensities band_reduced_densities(const AmplitudeTable& amps, const BandSpec& band) {
  if (band.initial.empty() || band.final.empty()) {
    throw std::invalid_argument("band_reduced_densities: empty band");
  }
  const int da = amps.dim_a;
  const int db = amps.dim_b;
  const double inv_n = 1.0 / static_cast<double>(band.initial.size());
  ComplexMatrix rho_a = ComplexMatrix::Zero(da, da);
  ComplexMatrix rho_b = ComplexMatrix::Zero(db, db);
  for (int k : band.initial) {
    const int s = amps.slot(k);
    if (s < 0) {
      throw std::invalid_argument("band_reduced_densities: amplitude table does not cover K=" +
                                  std::to_string(k));
    }
    if (amps.amplitudes[s].rows() != da || amps.amplitudes[s].cols() != db) {
      throw std::invalid_argument("band_reduced_densities: amplitude table has wrong shape");
    }
    // Transitions kept: K' in the final band, K' != K, i != ψ0.
    ComplexMatrix kept = ComplexMatrix::Zero(da, db);
    for (int kf : band.final) {
      if (kf < 0 || kf >= da) throw std::invalid_argument("band_reduced_densities: bad final index");
      if (kf != k) kept.row(kf) = amps.amplitudes[s].row(kf);
    }
    kept.col(amps.psi0_index).setZero();
    const double bk2 = std::max(0.0, 1.0 - kept.cwiseAbs2().sum());

    rho_a(k, k) += inv_n * bk2;
    rho_a += inv_n * kept * kept.adjoint();  // Σ_i |ψ_iK⟩⟨ψ_iK|
    rho_b(amps.psi0_index, amps.psi0_index) += inv_n * bk2;
    rho_b += inv_n * kept.transpose() * kept.conjugate();  // Σ_K' |ψ_K'K⟩⟨ψ_K'K|
  }
  const double tr = trace_real(rho_a);
  BandDensities out;
  out.trace_deficit = tr - 1.0;
  out.rho_a = {rho_a / tr, {da}, {0}};
  out.rho_b = {rho_b / trace_real(rho_b), {db}, {0}};
  return out;
}

}  // namespace qxfer
