#pragma once

// Exact resonant Jaynes-Cummings propagator in the truncated Fock space.
//
// H = sigma_+ a + sigma_- a^dagger (lambda = hbar = 1) only couples |e,n> to
// |g,n+1>, so U(t) is a direct sum of 2x2 rotations with Rabi frequency
// sqrt(n+1) plus the two uncoupled levels |g,0> and |e,L> (L = n_f + 1 is the
// lump level; a^dagger annihilates it in the truncated space). Matrix
// functions of a a^dagger and a^dagger a act on their truncated spectra, so
// U is exactly unitary at any truncation.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "jcm/error.hpp"
#include "jcm/linalg.hpp"
#include "jcm/states.hpp"

namespace jcm {

// alpha[n]: frequency of |e,n> <-> |g,n+1>; beta[n]: frequency of
// |g,n> <-> |e,n-1>. alpha[n-1] == beta[n] == sqrt(n); alpha[L] == beta[0] == 0.
struct RabiFrequencies {
  std::vector<double> alpha;
  std::vector<double> beta;
};

inline RabiFrequencies rabi_frequencies(std::size_t field_levels) {
  RabiFrequencies out{std::vector<double>(field_levels, 0.0), std::vector<double>(field_levels, 0.0)};
  for (std::size_t n = 0; n < field_levels; ++n) {
    if (n + 1 < field_levels) out.alpha[n] = std::sqrt(static_cast<double>(n + 1));
    out.beta[n] = std::sqrt(static_cast<double>(n));
  }
  return out;
}

struct Propagator {
  std::size_t n_f = 0;
  double t = 0.0;  // lambda t
  ComplexMatrix mat;
};

inline Propagator build_propagator(long long n_f, double t) {
  detail::require(n_f >= 1, ErrorKind::InvalidParameter, "propagator needs n_f >= 1, got " + std::to_string(n_f));
  detail::require(std::isfinite(t), ErrorKind::InvalidParameter, "time must be finite");
  const auto levels = static_cast<std::size_t>(n_f) + 2;
  const auto freq = rabi_frequencies(levels);
  ComplexMatrix u(2 * levels);
  const std::size_t g = levels;  // offset of the ground block
  for (std::size_t n = 0; n < levels; ++n) {
    u(n, n) = freq.alpha[n] == 0.0 ? 1.0 : std::cos(freq.alpha[n] * t);
    u(g + n, g + n) = freq.beta[n] == 0.0 ? 1.0 : std::cos(freq.beta[n] * t);
  }
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    const Complex off(0.0, -std::sin(freq.alpha[n] * t));
    u(n, g + n + 1) = off;
    u(g + n + 1, n) = off;
  }
  return {static_cast<std::size_t>(n_f), t, std::move(u)};
}

namespace detail {

struct SparseRow {
  std::vector<std::pair<std::size_t, Complex>> entries;
};

inline std::vector<SparseRow> sparse_rows(const ComplexMatrix& m) {
  std::vector<SparseRow> rows(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      if (m(i, j) != Complex{}) rows[i].entries.emplace_back(j, m(i, j));
  return rows;
}

// U rho U^dagger exploiting the sparsity of U.
inline ComplexMatrix sandwich(const ComplexMatrix& u, const ComplexMatrix& rho) {
  detail::require(u.dim() == rho.dim(), ErrorKind::DimensionMismatch,
                  "propagator dimension " + std::to_string(u.dim()) + " vs state " + std::to_string(rho.dim()));
  const std::size_t n = u.dim();
  const auto rows = sparse_rows(u);
  ComplexMatrix left(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [k, v] : rows[i].entries)
      for (std::size_t j = 0; j < n; ++j) left(i, j) += v * rho(k, j);
  ComplexMatrix out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& [k, v] : rows[j].entries) {
      const Complex cv = std::conj(v);
      for (std::size_t i = 0; i < n; ++i) out(i, j) += left(i, k) * cv;
    }
  return out;
}

inline void check_joint(const DensityMatrix& rho) {
  const auto& dims = rho.bipartite();
  detail::require(dims.atom_dim == 2 && dims.field_dim >= 3, ErrorKind::DimensionMismatch,
                  "joint state must be 2 x (n_f + 2) with n_f >= 1");
}

}  // namespace detail

// Evolves without re-running the spectral positivity check; Hermiticity and
// trace are still checked since they are cheap.
inline DensityMatrix evolve_unchecked(const DensityMatrix& rho0, const Propagator& u,
                                      const DensityTolerances& tol = {}) {
  detail::check_joint(rho0);
  detail::require(u.mat.dim() == rho0.dim(), ErrorKind::DimensionMismatch, "propagator/state size mismatch");
  ComplexMatrix out = detail::sandwich(u.mat, rho0.matrix());
  const double herm = hermiticity_residual(out);
  detail::require(herm <= tol.hermitian, ErrorKind::NotHermitian,
                  "evolved state Hermiticity residual " + std::to_string(herm));
  const double tr_err = std::abs(trace(out) - 1.0);
  detail::require(tr_err <= tol.trace, ErrorKind::TraceNotOne, "evolved state trace error " + std::to_string(tr_err));
  return DensityMatrix::assume_valid(std::move(out), rho0.factorization());
}

inline DensityMatrix evolve(const DensityMatrix& rho0, const Propagator& u, const DensityTolerances& tol = {}) {
  detail::check_joint(rho0);
  detail::require(u.mat.dim() == rho0.dim(), ErrorKind::DimensionMismatch, "propagator/state size mismatch");
  return validate_density(detail::sandwich(u.mat, rho0.matrix()), rho0.factorization(), tol);
}

inline DensityMatrix evolve(const DensityMatrix& rho0, double t, const DensityTolerances& tol = {}) {
  detail::check_joint(rho0);
  const auto n_f = static_cast<long long>(rho0.bipartite().field_dim) - 2;
  return evolve(rho0, build_propagator(n_f, t), tol);
}

struct DiagonalEvolution {
  double excited = 0.0;       // A(t)
  double ground = 0.0;        // B(t)
  std::vector<double> field;  // C_n(t) + D_n(t)
};

// Closed-form populations for an initial state diagonal in the {e,g} x Fock
// basis, P_e |e><e| (x) rho_f + P_g |g><g| (x) rho_f.
inline DiagonalEvolution diagonal_evolve(double p_e, const FieldDistribution& field, double t) {
  detail::require(p_e >= 0.0 && p_e <= 1.0, ErrorKind::InvalidParameter,
                  "excited population must lie in [0,1], got " + std::to_string(p_e));
  detail::require(field.levels() >= 2, ErrorKind::InvalidParameter, "field distribution is empty");
  const double p_g = 1.0 - p_e;
  const std::size_t levels = field.levels();
  const auto freq = rabi_frequencies(levels);
  const auto& p = field.probs;
  auto prob = [&](std::size_t n) { return n < levels ? p[n] : 0.0; };
  auto cos2 = [&](double w) { return std::pow(std::cos(w * t), 2); };
  auto sin2 = [&](double w) { return std::pow(std::sin(w * t), 2); };

  DiagonalEvolution out;
  out.field.assign(levels, 0.0);
  double a_excited = 0.0;
  double a_ground = 0.0;
  double b_excited = 0.0;
  double b_ground = 0.0;
  for (std::size_t n = 0; n < levels; ++n) {
    const double stay_e = p[n] * cos2(freq.alpha[n]);
    const double back_from_g = n + 1 < levels ? prob(n + 1) * sin2(freq.beta[n + 1]) : 0.0;
    const double left_e = n >= 1 ? p[n - 1] * sin2(freq.alpha[n - 1]) : 0.0;
    const double stay_g = p[n] * cos2(freq.beta[n]);
    a_excited += stay_e;
    a_ground += back_from_g;
    b_excited += left_e;
    b_ground += stay_g;
    out.field[n] = p_e * (stay_e + left_e) + p_g * (back_from_g + stay_g);
  }
  out.excited = p_e * a_excited + p_g * a_ground;
  out.ground = p_e * b_excited + p_g * b_ground;
  return out;
}

// <a^dagger a + sigma_+ sigma_->, the conserved excitation number.
inline double excitation_expectation(const DensityMatrix& rho) {
  detail::check_joint(rho);
  const std::size_t levels = rho.bipartite().field_dim;
  const auto& m = rho.matrix();
  double sum = 0.0;
  for (std::size_t n = 0; n < levels; ++n) {
    sum += static_cast<double>(n + 1) * m(n, n).real();
    sum += static_cast<double>(n) * m(levels + n, levels + n).real();
  }
  return sum;
}

}  // namespace jcm
