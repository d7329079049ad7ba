#pragma once

// Seeded generators shared by the property tests.

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "jcm/linalg.hpp"
#include "jcm/states.hpp"

namespace jcm::gen {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240917);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline ComplexMatrix random_matrix(std::size_t n) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(g(rng()), g(rng()));
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n) {
  const ComplexMatrix a = random_matrix(n);
  ComplexMatrix h = a + adjoint(a);
  h *= Complex(0.5);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return h;
}

// A A^dagger / Tr, generically full rank.
inline DensityMatrix random_density(std::size_t n, std::optional<Bipartite> dims = std::nullopt) {
  const ComplexMatrix a = random_matrix(n);
  ComplexMatrix rho = matmul(a, adjoint(a));
  rho *= Complex(1.0 / trace(rho).real());
  for (std::size_t i = 0; i < n; ++i) rho(i, i) = rho(i, i).real();
  return DensityMatrix::assume_valid(std::move(rho), dims);
}

inline std::vector<Complex> random_unit_vector(std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  double norm = 0.0;
  for (auto& z : v) {
    z = Complex(g(rng()), g(rng()));
    norm += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(norm);
  return v;
}

inline DensityMatrix projector(const std::vector<Complex>& v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return DensityMatrix::assume_valid(std::move(m));
}

// exp(-i H t) through the spectral decomposition; independent of the
// closed-form propagator.
inline ComplexMatrix spectral_exponential(const ComplexMatrix& h, double t) {
  const auto eig = hermitian_eig(h, true);
  const ComplexMatrix& v = *eig.vectors;
  ComplexMatrix phases(h.dim());
  for (std::size_t k = 0; k < h.dim(); ++k) phases(k, k) = std::polar(1.0, -eig.values[k] * t);
  return matmul(matmul(v, phases), adjoint(v));
}

// sigma_+ a + sigma_- a^dagger on the truncated space, atom-major. |e, L>
// has no partner and stays decoupled.
inline ComplexMatrix interaction_hamiltonian(std::size_t n_f) {
  const std::size_t levels = n_f + 2;
  ComplexMatrix h(2 * levels);
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    const double w = std::sqrt(static_cast<double>(n + 1));
    h(n, levels + n + 1) = w;
    h(levels + n + 1, n) = w;
  }
  return h;
}

}  // namespace jcm::gen
