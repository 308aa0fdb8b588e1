#pragma once

// Dense complex linear algebra and quantum-state primitives.
//
// Composite Hilbert spaces are described by a partition: an ordered list of
// factor dimensions, most significant factor first. A state on [2, 2, 128]
// stores amplitude (a, k, i) at flat index (a * 2 + k) * 128 + i.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qxfer {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Partition = std::vector<int>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kEntropyClip = 1e-12;

/// Normalized pure state on a partitioned Hilbert space.
class StateVector {
 public:
  StateVector(ComplexVector amplitudes, Partition partition);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const Partition& partition() const { return partition_; }
  Eigen::Index dim() const { return amplitudes_.size(); }

 private:
  ComplexVector amplitudes_;
  Partition partition_;
};

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
  ComplexMatrix reconstruct() const;
};

/// Unit-trace Hermitian operator. `partition` lists the dimensions of the
/// factors it lives on; `labels` records which factors of the parent
/// partition these were (in the same order).
struct DensityMatrix {
  ComplexMatrix matrix;
  Partition partition;
  std::vector<int> labels;
};

/// Largest entrywise |M - M^dagger|.
double max_hermitian_asymmetry(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hermitian eigensolver. Throws std::invalid_argument with the measured
/// asymmetry when `h` is not Hermitian within kHermitianTolerance.
SpectralDecomposition eig_decompose(const ComplexMatrix& h);

/// e^{-iHt} applied to the whole state.
StateVector evolve(const StateVector& state, const SpectralDecomposition& decomp, double t);

/// (I_lead ⊗ e^{-iHt}) where H acts on the trailing factors whose dimensions
/// multiply to decomp.dim(). Leading factors are left untouched.
StateVector evolve_trailing(const StateVector& state, const SpectralDecomposition& decomp,
                            double t);

/// Repeated evolution of one initial vector: the eigenbasis coefficients are
/// computed once, each call to at() costs O(d^2).
class Propagator {
 public:
  Propagator(const SpectralDecomposition& decomp, const ComplexVector& initial);

  ComplexVector at(double t) const;

 private:
  SpectralDecomposition decomp_;
  ComplexVector coefficients_;
};

/// Reduced density matrix of a pure state on the factors in `keep`.
/// Kept factors appear in ascending index order.
DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep);

/// Partial trace of a density matrix over its own partition.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

double trace_real(const ComplexMatrix& m);

/// -Tr(rho log rho) in nats. Eigenvalues below kEntropyClip contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entropy of the factors in `subset` for a pure global state. The smaller of
/// the subset and its complement is diagonalized.
double subsystem_entropy(const StateVector& state, std::span<const int> subset);

/// I(X,Y) = S(X) + S(Y) - S(XY) in nats. X and Y must be disjoint.
double mutual_information(const StateVector& state, std::span<const int> x,
                          std::span<const int> y);

/// Computational-basis vector e_k of length dim.
ComplexVector basis_vector(Eigen::Index dim, Eigen::Index k);

}  // namespace qxfer
