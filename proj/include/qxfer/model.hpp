#pragma once

// Composite systems A ⊗ B with fixed spectra, Haar-random eigenbases and
// product-operator interaction pathways.

#include <cstdint>
#include <utility>
#include <vector>

#include "qxfer/linalg.hpp"

namespace qxfer {

struct SubsystemSpec {
  int dim = 0;
  std::vector<double> spectrum;  // ascending, length dim
  std::uint64_t seed = 0;        // Haar eigenbasis draw

  void validate() const;
};

/// One interaction term C·opA⊗opB with C = c·energy_scale.
struct PathwaySpec {
  double c = 0.0;
  double energy_scale = 1.0;
  ComplexMatrix op_a;
  ComplexMatrix op_b;

  double coefficient() const { return c * energy_scale; }
};

enum class Psi0Selector { GroundB };

struct ModelInstance {
  SubsystemSpec spec_a;
  SubsystemSpec spec_b;
  std::vector<PathwaySpec> pathways;

  ComplexMatrix h_a;
  ComplexMatrix h_b;
  ComplexMatrix h_int;
  ComplexMatrix h_total;
  SpectralDecomposition eig_a;
  SpectralDecomposition eig_b;
  SpectralDecomposition eig_total;

  Eigen::Index psi0_index = 0;  // column of eig_b.eigenvectors
  ComplexVector psi0;

  int dim_a() const { return spec_a.dim; }
  int dim_b() const { return spec_b.dim; }
  int dim() const { return spec_a.dim * spec_b.dim; }
  double e0() const { return eig_b.eigenvalues[psi0_index]; }
};

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal folded into Q. Deterministic in the seed.
ComplexMatrix haar_unitary(int dim, std::uint64_t seed);

/// H = U diag(spectrum) U† with U = haar_unitary(dim, seed). The returned
/// decomposition is (spectrum, U) itself rather than a re-diagonalization.
std::pair<ComplexMatrix, SpectralDecomposition> hamiltonian_from_spectrum(
    const SubsystemSpec& spec);

/// sqrt(Tr(O^2)/N).
double normalized_norm(const ComplexMatrix& o);

ModelInstance assemble_model(SubsystemSpec spec_a, SubsystemSpec spec_b,
                             std::vector<PathwaySpec> pathways,
                             Psi0Selector selector = Psi0Selector::GroundB);

ComplexMatrix pauli_x();

/// σx on qubit `qubit` (1-based, qubit 1 most significant) of an n-qubit
/// register in the computational basis.
ComplexMatrix sigma_x_on_qubit(int n_qubits, int qubit);

/// σx in the eigenbasis of a two-level Hamiltonian, expressed in the
/// computational basis: U σx U†.
ComplexMatrix sigma_x_in_eigenbasis(const SpectralDecomposition& eig);

/// {0} ∪ {1 + i/600 : i = -63..63}, the 128-level environment spectrum.
std::vector<double> reference_env_spectrum();

/// Derives independent A and B eigenbasis seeds from one experiment seed.
std::pair<std::uint64_t, std::uint64_t> split_seed(std::uint64_t seed);

/// Coupling on one environment qubit of the built-in model.
struct EnvCoupling {
  double c = 0.0;
  int env_qubit = 1;
};

/// Qubit A with spectrum {0,1} and a 7-qubit environment with the built-in
/// spectrum; one pathway c·σx_A σx_{B,q} per coupling entry. ℰ = 1.
ModelInstance env_qubit_model(const std::vector<EnvCoupling>& couplings, std::uint64_t seed_a,
                              std::uint64_t seed_b);

/// The single-pathway instance H_I = c σx_A σx_{B1}.
ModelInstance reference_model(double c, std::uint64_t seed_a, std::uint64_t seed_b);

/// |ψ⟩ = N^{-1/2} Σ_{K∈band} |K̄⟩|K⟩|ψ0⟩ on Ā⊗A⊗B, partition [dimA, dimA, dimB].
/// |K⟩ is the K-th eigenvector of H_A, |K̄⟩ the K-th basis vector of Ā.
StateVector initial_entangled_state(const ModelInstance& model, const std::vector<int>& band);

/// |K⟩|ψ0⟩ on A⊗B.
ComplexVector product_state(const ModelInstance& model, int k);

}  // namespace qxfer
