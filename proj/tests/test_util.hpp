#pragma once

// Hand-rolled generators and small oracles shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qxfer/linalg.hpp"
#include "qxfer/model.hpp"

namespace qxfer::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Complex complex_normal() { return {normal(), normal()}; }

  ComplexMatrix matrix(int rows, int cols) {
    ComplexMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = complex_normal();
    }
    return m;
  }

  ComplexMatrix hermitian(int n, double scale = 1.0) {
    const ComplexMatrix g = matrix(n, n);
    ComplexMatrix h = 0.5 * scale * (g + g.adjoint());
    for (int i = 0; i < n; ++i) h(i, i) = h(i, i).real();
    return h;
  }

  ComplexVector unit_vector(int n) {
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v[i] = complex_normal();
    return v / v.norm();
  }

  std::vector<double> sorted_spectrum(int n, double lo, double hi) {
    std::vector<double> s(n);
    for (auto& x : s) x = uniform(lo, hi);
    std::sort(s.begin(), s.end());
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// 2 × 4 model with a random Hermitian B-side operator; small enough for
/// quadrature oracles.
inline ModelInstance toy_model(double c, std::uint64_t seed = 11) {
  Gen g(seed);
  SubsystemSpec a{2, {0.0, 1.0}, seed + 1};
  SubsystemSpec b{4, {0.0, 0.93, 1.02, 1.21}, seed + 2};
  const auto eig_a = hamiltonian_from_spectrum(a).second;
  PathwaySpec p;
  p.c = c;
  p.op_a = sigma_x_in_eigenbasis(eig_a);
  p.op_b = g.hermitian(4);
  return assemble_model(a, b, {p});
}

/// ⟨K'|⟨i| H_I |K⟩|ψ0⟩ built from explicit Kronecker products.
inline Complex matrix_element_oracle(const ModelInstance& m, int k, int kf, int i) {
  const ComplexVector& psi0 = m.psi0;
  const ComplexVector in = kron(m.eig_a.eigenvectors.col(k), psi0);
  const ComplexVector out =
      kron(m.eig_a.eigenvectors.col(kf), m.eig_b.eigenvectors.col(i));
  return out.dot(m.h_int * in);
}

/// Composite Simpson rule for a complex integrand on [0, t].
template <typename F>
Complex simpson(F f, double t, int intervals) {
  const double h = t / intervals;
  Complex sum = f(0.0) + f(t);
  for (int n = 1; n < intervals; ++n) sum += (n % 2 ? 4.0 : 2.0) * f(n * h);
  return sum * h / 3.0;
}

}  // namespace qxfer::testing
