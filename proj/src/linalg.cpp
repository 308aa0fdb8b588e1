#include "qxfer/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qxfer {

namespace {

Eigen::Index product(const Partition& dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1},
                         [](Eigen::Index acc, int d) { return acc * d; });
}

// Sorted, deduplicated, range-checked copy of a factor index list.
std::vector<int> normalize_indices(std::span<const int> idx, std::size_t nfactors) {
  std::vector<int> out(idx.begin(), idx.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument("partial trace: duplicate subsystem index");
  }
  for (int k : out) {
    if (k < 0 || static_cast<std::size_t>(k) >= nfactors) {
      std::ostringstream msg;
      msg << "partial trace: subsystem index " << k << " outside partition of size " << nfactors;
      throw std::invalid_argument(msg.str());
    }
  }
  return out;
}

// For every flat index, the flat index within the kept factors and within
// the traced factors.
struct SplitIndex {
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> traced;
  Eigen::Index kept_dim = 1;
  Eigen::Index traced_dim = 1;
  Partition kept_partition;
};

SplitIndex split_indices(const Partition& partition, const std::vector<int>& keep) {
  SplitIndex s;
  std::vector<bool> is_kept(partition.size(), false);
  for (int k : keep) {
    is_kept[k] = true;
    s.kept_dim *= partition[k];
    s.kept_partition.push_back(partition[k]);
  }
  const Eigen::Index total = product(partition);
  s.traced_dim = total / s.kept_dim;
  s.kept.resize(total);
  s.traced.resize(total);

  std::vector<int> digits(partition.size(), 0);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index kf = 0;
    Eigen::Index tf = 0;
    for (std::size_t f = 0; f < partition.size(); ++f) {
      if (is_kept[f]) {
        kf = kf * partition[f] + digits[f];
      } else {
        tf = tf * partition[f] + digits[f];
      }
    }
    s.kept[flat] = kf;
    s.traced[flat] = tf;
    // Mixed-radix increment, last factor fastest.
    for (std::size_t f = partition.size(); f-- > 0;) {
      if (++digits[f] < partition[f]) break;
      digits[f] = 0;
    }
  }
  return s;
}

}  // namespace

StateVector::StateVector(ComplexVector amplitudes, Partition partition)
    : amplitudes_(std::move(amplitudes)), partition_(std::move(partition)) {
  if (partition_.empty()) partition_ = {static_cast<int>(amplitudes_.size())};
  for (int d : partition_) {
    if (d < 1) throw std::invalid_argument("StateVector: partition dimensions must be >= 1");
  }
  if (product(partition_) != amplitudes_.size()) {
    throw std::invalid_argument("StateVector: partition does not multiply to the vector length");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm * norm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "StateVector: squared norm " << norm * norm << " differs from 1";
    throw std::invalid_argument(msg.str());
  }
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double max_hermitian_asymmetry(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

SpectralDecomposition eig_decompose(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("eig_decompose: matrix is not square");
  }
  const double asym = max_hermitian_asymmetry(h);
  if (asym > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "eig_decompose: matrix is not Hermitian (max |H - H^dagger| = " << asym << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_decompose: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

StateVector evolve(const StateVector& state, const SpectralDecomposition& decomp, double t) {
  if (decomp.dim() != state.dim()) {
    throw std::invalid_argument("evolve: decomposition dimension differs from state dimension");
  }
  return {Propagator(decomp, state.amplitudes()).at(t), state.partition()};
}

StateVector evolve_trailing(const StateVector& state, const SpectralDecomposition& decomp,
                            double t) {
  const Eigen::Index d = decomp.dim();
  // d must be the product of a suffix of the partition.
  Eigen::Index suffix = 1;
  for (auto it = state.partition().rbegin(); it != state.partition().rend() && suffix < d; ++it) {
    suffix *= *it;
  }
  if (d == 0 || suffix != d) {
    throw std::invalid_argument("evolve_trailing: decomposition does not act on trailing factors");
  }
  const Eigen::Index lead = state.dim() / d;
  // Column-major reshape: column a holds the trailing block of leading index a.
  Eigen::Map<const ComplexMatrix> blocks(state.amplitudes().data(), d, lead);
  ComplexVector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) phases[k] = std::polar(1.0, -decomp.eigenvalues[k] * t);
  ComplexMatrix evolved =
      decomp.eigenvectors * (phases.asDiagonal() * (decomp.eigenvectors.adjoint() * blocks));
  return {Eigen::Map<ComplexVector>(evolved.data(), evolved.size()), state.partition()};
}

Propagator::Propagator(const SpectralDecomposition& decomp, const ComplexVector& initial)
    : decomp_(decomp), coefficients_(decomp.eigenvectors.adjoint() * initial) {
  if (decomp.dim() != initial.size()) {
    throw std::invalid_argument("Propagator: decomposition dimension differs from state dimension");
  }
}

ComplexVector Propagator::at(double t) const {
  ComplexVector phased(coefficients_.size());
  for (Eigen::Index k = 0; k < phased.size(); ++k) {
    phased[k] = std::polar(1.0, -decomp_.eigenvalues[k] * t) * coefficients_[k];
  }
  return decomp_.eigenvectors * phased;
}

DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep) {
  const auto kept = normalize_indices(keep, state.partition().size());
  const SplitIndex s = split_indices(state.partition(), kept);
  ComplexMatrix psi = ComplexMatrix::Zero(s.kept_dim, s.traced_dim);
  const auto& amp = state.amplitudes();
  for (Eigen::Index flat = 0; flat < amp.size(); ++flat) {
    psi(s.kept[flat], s.traced[flat]) = amp[flat];
  }
  return {psi * psi.adjoint(), s.kept_partition, kept};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto kept = normalize_indices(keep, rho.partition.size());
  if (product(rho.partition) != rho.matrix.rows()) {
    throw std::invalid_argument("partial trace: density matrix does not match its partition");
  }
  const SplitIndex s = split_indices(rho.partition, kept);
  // flat index of (kept k, traced r)
  std::vector<Eigen::Index> flat_of(s.kept_dim * s.traced_dim);
  for (Eigen::Index flat = 0; flat < rho.matrix.rows(); ++flat) {
    flat_of[s.kept[flat] * s.traced_dim + s.traced[flat]] = flat;
  }
  ComplexMatrix out = ComplexMatrix::Zero(s.kept_dim, s.kept_dim);
  for (Eigen::Index a = 0; a < s.kept_dim; ++a) {
    for (Eigen::Index b = 0; b < s.kept_dim; ++b) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index r = 0; r < s.traced_dim; ++r) {
        acc += rho.matrix(flat_of[a * s.traced_dim + r], flat_of[b * s.traced_dim + r]);
      }
      out(a, b) = acc;
    }
  }
  std::vector<int> labels;
  for (int k : kept) {
    labels.push_back(rho.labels.empty() ? k : rho.labels[k]);
  }
  return {out, s.kept_partition, labels};
}

double trace_real(const ComplexMatrix& m) { return m.trace().real(); }

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double p = solver.eigenvalues()[k];
    if (p > kEntropyClip) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

double subsystem_entropy(const StateVector& state, std::span<const int> subset) {
  const auto sub = normalize_indices(subset, state.partition().size());
  if (sub.empty() || sub.size() == state.partition().size()) return 0.0;
  std::vector<int> complement;
  Eigen::Index sub_dim = 1;
  for (int f = 0; f < static_cast<int>(state.partition().size()); ++f) {
    if (std::binary_search(sub.begin(), sub.end(), f)) {
      sub_dim *= state.partition()[f];
    } else {
      complement.push_back(f);
    }
  }
  const Eigen::Index comp_dim = state.dim() / sub_dim;
  return von_neumann_entropy(partial_trace(state, comp_dim < sub_dim ? complement : sub));
}

double mutual_information(const StateVector& state, std::span<const int> x,
                          std::span<const int> y) {
  for (int a : x) {
    if (std::find(y.begin(), y.end(), a) != y.end()) {
      throw std::invalid_argument("mutual_information: subsystem sets overlap");
    }
  }
  std::vector<int> xy(x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  return subsystem_entropy(state, x) + subsystem_entropy(state, y) - subsystem_entropy(state, xy);
}

ComplexVector basis_vector(Eigen::Index dim, Eigen::Index k) {
  ComplexVector v = ComplexVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

}  // namespace qxfer
