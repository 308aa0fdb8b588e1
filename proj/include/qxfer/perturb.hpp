#pragma once

// First-order (Fermi golden rule) treatment of A → B transfer.
//
// All indices refer to eigenstates: K, K' index the eigenvectors of H_A,
// i those of H_B, and ψ0 is eigenvector psi0_index of H_B. Amplitudes are
// interaction-picture amplitudes
//
//   A_{K'i,K0}(t) = -2i M sin(tΔE/2)/ΔE · e^{itΔE/2},
//   M  = ⟨i|⟨K'|H_I|K⟩|ψ0⟩,  ΔE = E_K' + E_i - E_K - E_0.

#include <vector>

#include "qxfer/linalg.hpp"
#include "qxfer/model.hpp"

namespace qxfer {

/// Below this |tΔE| the resonant limit sin(tΔE/2)/ΔE → t/2 is used.
inline constexpr double kResonanceCutoff = 1e-7;
/// First-order probabilities above this are flagged as outside the
/// perturbative regime.
inline constexpr double kPerturbativeLimit = 0.5;

struct DecayProbability {
  double value = 0.0;
  bool valid = true;  // value <= kPerturbativeLimit
};

/// First-order amplitudes at one time for a set of initial A states.
struct AmplitudeTable {
  double t = 0.0;
  int dim_a = 0;
  int dim_b = 0;
  Eigen::Index psi0_index = 0;
  std::vector<int> initial;                 // K covered by the table
  std::vector<ComplexMatrix> amplitudes;    // per K: rows K', cols i
  std::vector<Eigen::MatrixXd> delta_e;     // per K: rows K', cols i

  /// Index of K in `initial`, or -1.
  int slot(int k) const;
  /// Σ_{K'≠K, i} |A|² for initial state K.
  double transition_weight(int k) const;
  /// False when transition_weight(k) exceeds 1 + 1e-9.
  bool conserves_probability(int k) const;
};

struct BandSpec {
  std::vector<int> initial;  // N states
  std::vector<int> final;    // N' states
  double window = 0.0;       // energy window width, informational

  bool overlapping() const;
};

struct BandDensities {
  DensityMatrix rho_a;  // in the H_A eigenbasis
  DensityMatrix rho_b;  // in the H_B eigenbasis
  double trace_deficit = 0.0;  // trace before renormalization, minus 1
};

struct BandRate {
  double information_rate = 0.0;  // 2 log(N/N') · rate
  double rate = 0.0;              // 2π t ⟨H_I 𝒫_{1/t} H_I⟩ averaged over initial states
                                  // outside the final band
};

/// Matrix elements of H_I between |K⟩|ψ0⟩ and |K'⟩|i⟩, computed once per
/// model.
class FirstOrder {
 public:
  explicit FirstOrder(const ModelInstance& model);

  int dim_a() const { return static_cast<int>(energies_a_.size()); }
  int dim_b() const { return static_cast<int>(energies_b_.size()); }

  Complex matrix_element(int k, int k_final, int i) const;
  double delta_e(int k, int k_final, int i) const;

  Complex amplitude(int k, int k_final, int i, double t) const;

  /// Σ_{K'≠K, i} |A_{K'i,K0}(t)|².
  DecayProbability decay_probability(int k, double t) const;

  AmplitudeTable amplitude_table(const std::vector<int>& initial, double t) const;

  /// 2π ⟨|M|²⟩ ρ over final states with |ΔE| <= window/2. Throws
  /// NumericalError when the window contains no final state.
  double fgr_rate(int k, double window) const;

  /// Ten times the median level spacing of H_B.
  double default_window() const;

  BandRate band_rate_estimate(const BandSpec& band, double t) const;

 private:
  void check_indices(int k, int k_final, int i) const;

  RealVector energies_a_;
  RealVector energies_b_;
  Eigen::Index psi0_index_;
  double e0_;
  std::vector<ComplexMatrix> elements_;  // per K: rows K', cols i
};

Complex transition_amplitude(const ModelInstance& model, int k, int k_final, int i, double t);
DecayProbability decay_probability_perturbative(const ModelInstance& model, int k, double t);
double fgr_rate(const ModelInstance& model, int k, double window);
BandRate band_rate_estimate(const ModelInstance& model, const BandSpec& band, double t);

/// (1/2π) sin²(tΔE/2)/(tΔE/2)². Requires t > 0.
double band_projector_weight(double delta_e, double t);

struct QubitEntropies {
  double s_a = 0.0;
  double s_b = 0.0;
};

/// Closed-form entropies of the decaying-qubit model for decay probability P.
QubitEntropies qubit_model_entropies(double p);

/// I(B,Ā) = S_B - S_A + log 2.
double qubit_model_mutual_information(double p);

/// Band density matrices built from an amplitude table. Final-state terms
/// with K' = K or i = ψ0 are left out; |B_K|² = 1 - Σ|A|² over the rest.
BandDensities band_reduced_densities(const AmplitudeTable& amps, const BandSpec& band);

}  // namespace qxfer
