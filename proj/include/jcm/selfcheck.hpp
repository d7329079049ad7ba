#pragma once

// Built-in invariant suite run by `jcm selfcheck`. Every check evolves its
// states through SelfcheckFixture::propagator, so a harness can swap in a
// broken builder and watch the suite fail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/entanglement.hpp"
#include "jcm/entropy.hpp"
#include "jcm/linalg.hpp"
#include "jcm/states.hpp"
#include "jcm/sweep.hpp"

namespace jcm {

struct SelfcheckFixture {
  double n_bar = 0.1;
  long long n_f = 12;
  std::vector<double> times{0.0, 0.37, 1.9, 7.3, 24.6};
  BlochParams pure_atom{1.0, 0.4, 1.1};
  BlochParams mixed_atom{0.6, 0.3, 2.0};
  double field_decay = 0.6;  // pure field amplitudes c_n ~ decay^n e^{i n field_phase}
  double field_phase = 0.7;
  std::function<Propagator(long long, double)> propagator = build_propagator;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;  // set when the check threw

  bool passed() const noexcept { return std::isfinite(residual) && residual <= tolerance; }
};

namespace detail {

inline DensityMatrix pure_field_state(const SelfcheckFixture& f) {
  const auto levels = static_cast<std::size_t>(f.n_f) + 2;
  std::vector<Complex> c(levels);
  double norm = 0.0;
  for (std::size_t n = 0; n < levels; ++n) {
    c[n] = std::polar(std::pow(f.field_decay, static_cast<double>(n)), f.field_phase * static_cast<double>(n));
    norm += std::norm(c[n]);
  }
  ComplexMatrix m(levels);
  for (std::size_t i = 0; i < levels; ++i)
    for (std::size_t j = 0; j < levels; ++j) m(i, j) = c[i] * std::conj(c[j]) / norm;
  return DensityMatrix::assume_valid(std::move(m));
}

// No validation: a corrupted propagator must surface as a residual.
inline DensityMatrix propagate(const SelfcheckFixture& f, const DensityMatrix& rho0, double t) {
  return DensityMatrix::assume_valid(sandwich(f.propagator(f.n_f, t).mat, rho0.matrix()), rho0.factorization());
}

inline ComplexMatrix reference_hermitian(std::size_t n) {
  ComplexMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double di = static_cast<double>(i), dj = static_cast<double>(j);
      const Complex v(std::cos(1.3 * di + 0.7 * dj) / (1.0 + di + dj), i == j ? 0.0 : std::sin(0.9 * di - 2.1 * dj));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  return h;
}

}  // namespace detail

inline std::vector<CheckResult> run_selfcheck(const SelfcheckFixture& f = {}) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, double tolerance, auto&& measure) {
    CheckResult r{std::move(name), 0.0, tolerance, {}};
    try {
      r.residual = measure();
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.note = e.what();
    }
    out.push_back(std::move(r));
  };
  const FieldDistribution thermal = thermal_field(f.n_bar, f.n_f);
  const DensityMatrix mixed = product_state(bloch_qubit(f.mixed_atom), thermal);
  const DensityMatrix pure = product_state(bloch_qubit(f.pure_atom), detail::pure_field_state(f));

  check("eigen_reconstruction", 1e-12, [&] {
    const ComplexMatrix h = detail::reference_hermitian(12);
    const auto eig = hermitian_eig(h, true);
    const ComplexMatrix& v = *eig.vectors;
    const ComplexMatrix rebuilt = matmul(matmul(v, ComplexMatrix::diagonal(eig.values)), adjoint(v));
    return frobenius_norm(rebuilt - h) / frobenius_norm(h);
  });
  check("propagator_identity", 1e-14, [&] {
    const auto u = f.propagator(f.n_f, 0.0);
    return frobenius_norm(u.mat - ComplexMatrix::identity(u.mat.dim()));
  });
  check("unitarity", 1e-12, [&] {
    double worst = 0.0;
    for (double t : f.times) {
      const auto u = f.propagator(f.n_f, t);
      worst = std::max(worst, frobenius_norm(matmul(adjoint(u.mat), u.mat) - ComplexMatrix::identity(u.mat.dim())));
    }
    return worst;
  });
  check("composition", 1e-12, [&] {
    double worst = 0.0;
    for (std::size_t k = 1; k < f.times.size(); ++k) {
      const double a = f.times[k - 1], b = f.times[k];
      const auto composed = matmul(f.propagator(f.n_f, a).mat, f.propagator(f.n_f, b).mat);
      worst = std::max(worst, max_abs_difference(composed, f.propagator(f.n_f, a + b).mat));
    }
    return worst;
  });
  check("trace_preservation", 1e-12, [&] {
    double worst = 0.0;
    for (double t : f.times) worst = std::max(worst, std::abs(trace(detail::propagate(f, mixed, t).matrix()) - 1.0));
    return worst;
  });
  check("excitation_conservation", 1e-12, [&] {
    const double n0 = excitation_expectation(mixed);
    double worst = 0.0;
    for (double t : f.times) worst = std::max(worst, std::abs(excitation_expectation(detail::propagate(f, mixed, t)) - n0));
    return worst;
  });
  check("joint_entropy_invariance", 1e-10, [&] {
    const double s0 = von_neumann(mixed);
    double worst = 0.0;
    for (double t : f.times) worst = std::max(worst, std::abs(von_neumann(detail::propagate(f, mixed, t)) - s0));
    return worst;
  });
  check("schmidt_equality", 1e-10, [&] {
    double worst = 0.0;
    for (double t : f.times) {
      const DensityMatrix rho = detail::propagate(f, pure, t);
      worst = std::max(worst, std::abs(von_neumann(partial_trace(rho, Subsystem::Atom)) -
                                       von_neumann(partial_trace(rho, Subsystem::Field))));
    }
    return worst;
  });
  check("oracle_equivalence", 1e-10, [&] {
    const double p_e = 0.3;
    const DensityMatrix rho0 = product_state(bloch_qubit({0.4, -std::numbers::pi / 2, 0.0}), thermal);
    double worst = 0.0;
    for (double t : f.times) {
      const DensityMatrix rho = detail::propagate(f, rho0, t);
      const auto atom = partial_trace(rho, Subsystem::Atom).matrix();
      const auto field = partial_trace(rho, Subsystem::Field).matrix();
      const auto closed = diagonal_evolve(p_e, thermal, t);
      worst = std::max({worst, std::abs(atom(0, 0) - closed.excited), std::abs(atom(1, 1) - closed.ground)});
      for (std::size_t n = 0; n < closed.field.size(); ++n)
        worst = std::max(worst, std::abs(field(n, n) - closed.field[n]));
    }
    return worst;
  });
  check("ppt_trace", 1e-10, [&] {
    double worst = 0.0;
    for (double t : f.times) {
      const auto spectrum = hermitian_eigenvalues(partial_transpose(detail::propagate(f, mixed, t)));
      double sum = 0.0;
      for (double l : spectrum) sum += l;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  });
  check("ppt_involution", 0.0, [&] {
    const DensityMatrix rho = detail::propagate(f, mixed, f.times.back());
    const auto twice = partial_transpose(partial_transpose(rho), rho.bipartite());
    return max_abs_difference(twice, rho.matrix());
  });
  check("fixed_point_stationarity", 1e-9, [&] {
    const DensityMatrix rho0 = product_state(bloch_qubit(fixed_point(f.n_bar)), thermal);
    const double a0 = von_neumann(partial_trace(rho0, Subsystem::Atom));
    const double f0 = von_neumann(partial_trace(rho0, Subsystem::Field));
    double worst = 0.0;
    for (double t : f.times) {
      const DensityMatrix rho = detail::propagate(f, rho0, t);
      worst = std::max({worst, std::abs(von_neumann(partial_trace(rho, Subsystem::Atom)) - a0),
                        std::abs(von_neumann(partial_trace(rho, Subsystem::Field)) - f0)});
    }
    return worst;
  });
  check("thermal_entropy_closed_form", 1e-10, [&] {
    const double n = f.n_bar;
    const auto field = thermal_field(n, static_cast<long long>(auto_truncate(n)));
    const double closed = (n + 1.0) * std::log(n + 1.0) - n * std::log(n);
    return std::abs(von_neumann(field_density(field)) - closed);
  });
  return out;
}

}  // namespace jcm
