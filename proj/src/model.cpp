#include "qxfer/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qxfer {

namespace {

// Strict weak order on pathways so that H_I is summed in the same order
// whatever order the caller listed them in.
bool pathway_less(const PathwaySpec& x, const PathwaySpec& y) {
  if (x.coefficient() != y.coefficient()) return x.coefficient() < y.coefficient();
  auto lex = [](const ComplexMatrix& a, const ComplexMatrix& b) -> int {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      const Complex u = a.data()[k];
      const Complex v = b.data()[k];
      if (u.real() != v.real()) return u.real() < v.real() ? -1 : 1;
      if (u.imag() != v.imag()) return u.imag() < v.imag() ? -1 : 1;
    }
    return 0;
  };
  if (int r = lex(x.op_a, y.op_a); r != 0) return r < 0;
  return lex(x.op_b, y.op_b) < 0;
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

void SubsystemSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("SubsystemSpec: dim must be >= 1");
  if (static_cast<int>(spectrum.size()) != dim) {
    std::ostringstream msg;
    msg << "SubsystemSpec: spectrum has " << spectrum.size() << " entries, expected " << dim;
    throw std::invalid_argument(msg.str());
  }
  if (!std::is_sorted(spectrum.begin(), spectrum.end())) {
    throw std::invalid_argument("SubsystemSpec: spectrum must be sorted ascending");
  }
}

ComplexMatrix haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  ComplexMatrix z(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im) * scale;
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  // Q·diag(r_jj/|r_jj|) removes the phase convention of the QR routine.
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

std::pair<ComplexMatrix, SpectralDecomposition> hamiltonian_from_spectrum(
    const SubsystemSpec& spec) {
  spec.validate();
  SpectralDecomposition decomp;
  decomp.eigenvalues = Eigen::Map<const RealVector>(spec.spectrum.data(), spec.dim);
  decomp.eigenvectors = haar_unitary(spec.dim, spec.seed);
  return {hermitize(decomp.reconstruct()), decomp};
}

double normalized_norm(const ComplexMatrix& o) {
  if (o.rows() != o.cols()) throw std::invalid_argument("normalized_norm: matrix is not square");
  if (o.rows() == 0) return 0.0;
  const double tr = (o * o).trace().real();
  return std::sqrt(std::max(tr, 0.0) / static_cast<double>(o.rows()));
}

ModelInstance assemble_model(SubsystemSpec spec_a, SubsystemSpec spec_b,
                             std::vector<PathwaySpec> pathways, Psi0Selector selector) {
  spec_a.validate();
  spec_b.validate();
  for (std::size_t g = 0; g < pathways.size(); ++g) {
    const auto& p = pathways[g];
    if (p.op_a.rows() != spec_a.dim || p.op_a.cols() != spec_a.dim ||
        p.op_b.rows() != spec_b.dim || p.op_b.cols() != spec_b.dim) {
      std::ostringstream msg;
      msg << "assemble_model: pathway " << g << " operators are " << p.op_a.rows() << "x"
          << p.op_a.cols() << " and " << p.op_b.rows() << "x" << p.op_b.cols()
          << ", subsystems are " << spec_a.dim << " and " << spec_b.dim;
      throw std::invalid_argument(msg.str());
    }
    const double asym = std::max(max_hermitian_asymmetry(p.op_a), max_hermitian_asymmetry(p.op_b));
    if (asym > kHermitianTolerance) {
      std::ostringstream msg;
      msg << "assemble_model: pathway " << g << " operator is not Hermitian (asymmetry " << asym
          << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  ModelInstance m;
  m.spec_a = std::move(spec_a);
  m.spec_b = std::move(spec_b);
  m.pathways = std::move(pathways);
  std::tie(m.h_a, m.eig_a) = hamiltonian_from_spectrum(m.spec_a);
  std::tie(m.h_b, m.eig_b) = hamiltonian_from_spectrum(m.spec_b);

  const int da = m.spec_a.dim;
  const int db = m.spec_b.dim;
  std::vector<const PathwaySpec*> order;
  for (const auto& p : m.pathways) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const PathwaySpec* x, const PathwaySpec* y) { return pathway_less(*x, *y); });
  m.h_int = ComplexMatrix::Zero(da * db, da * db);
  for (const PathwaySpec* p : order) {
    m.h_int += p->coefficient() * kron(p->op_a, p->op_b);
  }
  m.h_total = kron(m.h_a, ComplexMatrix::Identity(db, db)) +
              kron(ComplexMatrix::Identity(da, da), m.h_b) + m.h_int;
  m.h_total = hermitize(m.h_total);
  m.eig_total = eig_decompose(m.h_total);

  switch (selector) {
    case Psi0Selector::GroundB:
      m.psi0_index = 0;
      break;
  }
  m.psi0 = m.eig_b.eigenvectors.col(m.psi0_index);
  return m;
}

ComplexMatrix pauli_x() {
  ComplexMatrix sx = ComplexMatrix::Zero(2, 2);
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  return sx;
}

ComplexMatrix sigma_x_on_qubit(int n_qubits, int qubit) {
  if (n_qubits < 1 || qubit < 1 || qubit > n_qubits) {
    std::ostringstream msg;
    msg << "sigma_x_on_qubit: qubit " << qubit << " outside register of " << n_qubits;
    throw std::invalid_argument(msg.str());
  }
  const int before = 1 << (qubit - 1);
  const int after = 1 << (n_qubits - qubit);
  return kron(kron(ComplexMatrix::Identity(before, before), pauli_x()),
              ComplexMatrix::Identity(after, after));
}

ComplexMatrix sigma_x_in_eigenbasis(const SpectralDecomposition& eig) {
  if (eig.dim() != 2) throw std::invalid_argument("sigma_x_in_eigenbasis: needs a two-level system");
  return hermitize(eig.eigenvectors * pauli_x() * eig.eigenvectors.adjoint());
}

std::vector<double> reference_env_spectrum() {
  std::vector<double> spec{0.0};
  for (int i = -63; i <= 63; ++i) spec.push_back(1.0 + i / 600.0);
  return spec;
}

std::pair<std::uint64_t, std::uint64_t> split_seed(std::uint64_t seed) {
  // seed_seq over the two 32-bit halves; four output words give two 64-bit seeds.
  std::seed_seq seq{static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(seed)};
  std::uint32_t w[4];
  seq.generate(std::begin(w), std::end(w));
  return {(std::uint64_t{w[0]} << 32) | w[1], (std::uint64_t{w[2]} << 32) | w[3]};
}

ModelInstance env_qubit_model(const std::vector<EnvCoupling>& couplings, std::uint64_t seed_a,
                              std::uint64_t seed_b) {
  constexpr int kEnvQubits = 7;
  SubsystemSpec spec_a{2, {0.0, 1.0}, seed_a};
  SubsystemSpec spec_b{1 << kEnvQubits, reference_env_spectrum(), seed_b};
  const auto eig_a = hamiltonian_from_spectrum(spec_a).second;
  const ComplexMatrix op_a = sigma_x_in_eigenbasis(eig_a);
  std::vector<PathwaySpec> pathways;
  for (const auto& cp : couplings) {
    pathways.push_back({cp.c, 1.0, op_a, sigma_x_on_qubit(kEnvQubits, cp.env_qubit)});
  }
  return assemble_model(std::move(spec_a), std::move(spec_b), std::move(pathways));
}

ModelInstance reference_model(double c, std::uint64_t seed_a, std::uint64_t seed_b) {
  return env_qubit_model({{c, 1}}, seed_a, seed_b);
}

StateVector initial_entangled_state(const ModelInstance& model, const std::vector<int>& band) {
  if (band.empty()) throw std::invalid_argument("initial_entangled_state: empty band");
  const int da = model.dim_a();
  std::vector<int> sorted = band;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
      sorted.back() >= da) {
    throw std::invalid_argument("initial_entangled_state: band indices invalid for subsystem A");
  }
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(da) * model.dim());
  const double amp = 1.0 / std::sqrt(static_cast<double>(band.size()));
  for (int k : sorted) {
    psi.segment(static_cast<Eigen::Index>(k) * model.dim(), model.dim()) =
        amp * product_state(model, k);
  }
  return {psi, {da, da, model.dim_b()}};
}

ComplexVector product_state(const ModelInstance& model, int k) {
  if (k < 0 || k >= model.dim_a()) throw std::invalid_argument("product_state: invalid A index");
  return kron(model.eig_a.eigenvectors.col(k), model.psi0);
}

}  // namespace qxfer
