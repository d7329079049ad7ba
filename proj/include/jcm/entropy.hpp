#pragma once

// Entropy and purity measures (natural log, k_B = 1), the time-averaged
// entropy exchange parameter P, the mutual-entropy ratio R, and closed-form
// purity rates for diagonal initial states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/error.hpp"
#include "jcm/linalg.hpp"
#include "jcm/states.hpp"

namespace jcm {

// Eigenvalues below this are treated as exact zeros before taking logs.
inline constexpr double kEntropyFloor = 1e-14;
inline constexpr double kRatioEpsilon = 1e-9;

inline double entropy_of_spectrum(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double lambda : eigenvalues)
    if (lambda >= kEntropyFloor) s -= lambda * std::log(lambda);
  return s;
}

inline double von_neumann(const DensityMatrix& rho) {
  if (rho.dim() == 1) return 0.0;
  return entropy_of_spectrum(hermitian_eigenvalues(rho.matrix()));
}

// Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
inline double purity(const DensityMatrix& rho) {
  double sum = 0.0;
  for (const auto& z : rho.matrix().entries()) sum += std::norm(z);
  return sum;
}

inline double tsallis2(const DensityMatrix& rho) { return 1.0 - purity(rho); }

enum class Conditioning { AtomGivenField, FieldGivenAtom };

inline double conditional_entropy(const DensityMatrix& joint, Conditioning which) {
  const double s_joint = von_neumann(joint);
  const Subsystem known = which == Conditioning::AtomGivenField ? Subsystem::Field : Subsystem::Atom;
  return s_joint - von_neumann(partial_trace(joint, known));
}

inline double mutual_entropy(const DensityMatrix& joint) {
  return von_neumann(partial_trace(joint, Subsystem::Atom)) + von_neumann(partial_trace(joint, Subsystem::Field)) -
         von_neumann(joint);
}

struct EntropySeries {
  std::vector<double> t;
  std::vector<double> s_atom;
  std::vector<double> s_field;
  std::vector<double> s_joint;
  std::vector<double> purity_atom;
  std::vector<double> purity_field;

  std::size_t size() const noexcept { return t.size(); }
};

struct ExchangeResult {
  double p = 0.0;
  std::size_t used_steps = 0;
  std::size_t skipped_steps = 0;
};

// Mean over time steps of dS_small / dS_large, where "small" is the partial
// entropy change of smaller magnitude. Steps where both changes are below eps
// are skipped.
inline ExchangeResult exchange_parameter(std::span<const double> s_atom, std::span<const double> s_field,
                                         double eps = kRatioEpsilon) {
  detail::require(s_atom.size() == s_field.size(), ErrorKind::DimensionMismatch, "entropy series lengths differ");
  detail::require(s_atom.size() >= 2, ErrorKind::InvalidParameter, "exchange parameter needs at least two samples");
  detail::require(eps > 0.0, ErrorKind::InvalidParameter, "eps must be positive");
  ExchangeResult out;
  double sum = 0.0;
  for (std::size_t j = 1; j < s_atom.size(); ++j) {
    const double da = s_atom[j] - s_atom[j - 1];
    const double df = s_field[j] - s_field[j - 1];
    const double large = std::abs(da) >= std::abs(df) ? da : df;
    const double small = std::abs(da) >= std::abs(df) ? df : da;
    if (std::abs(large) < eps) {
      ++out.skipped_steps;
      continue;
    }
    sum += small / large;
    ++out.used_steps;
  }
  if (out.used_steps == 0)
    throw Error(ErrorKind::AllStepsSkipped,
                "all " + std::to_string(out.skipped_steps) + " entropy steps fall below eps=" + std::to_string(eps));
  out.p = sum / static_cast<double>(out.used_steps);
  return out;
}

inline ExchangeResult exchange_parameter(const EntropySeries& series, double eps = kRatioEpsilon) {
  return exchange_parameter(series.s_atom, series.s_field, eps);
}

struct MutualRatioResult {
  double r_bar = 0.0;
  std::size_t used_samples = 0;
  std::size_t skipped_samples = 0;
};

// R = S(a:f) / min(S_a, S_f), clamped to its analytic range [0, 2] to absorb
// rounding when the denominator is near eps.
inline double mutual_ratio(double s_atom, double s_field, double s_joint) {
  const double mutual = s_atom + s_field - s_joint;
  return std::clamp(mutual / std::min(s_atom, s_field), 0.0, 2.0);
}

inline MutualRatioResult r_parameter(std::span<const double> s_atom, std::span<const double> s_field,
                                     std::span<const double> s_joint, double eps = kRatioEpsilon) {
  detail::require(s_atom.size() == s_field.size() && s_atom.size() == s_joint.size(), ErrorKind::DimensionMismatch,
                  "entropy series lengths differ");
  detail::require(eps > 0.0, ErrorKind::InvalidParameter, "eps must be positive");
  MutualRatioResult out;
  double sum = 0.0;
  for (std::size_t k = 0; k < s_atom.size(); ++k) {
    if (std::min(s_atom[k], s_field[k]) < eps) {
      ++out.skipped_samples;
      continue;
    }
    sum += mutual_ratio(s_atom[k], s_field[k], s_joint[k]);
    ++out.used_samples;
  }
  if (out.used_samples == 0)
    throw Error(ErrorKind::AllStepsSkipped, "every sample has min(S_a, S_f) below eps=" + std::to_string(eps));
  out.r_bar = sum / static_cast<double>(out.used_samples);
  return out;
}

inline MutualRatioResult r_parameter(const EntropySeries& series, double eps = kRatioEpsilon) {
  return r_parameter(series.s_atom, series.s_field, series.s_joint, eps);
}

enum class InitialAtom { Ground, Excited };

struct PurityRates {
  double atom = 0.0;   // d Tr(rho_a^2) / dt
  double field = 0.0;  // d Tr(rho_f^2) / dt
};

// Exact double sums for |g><g| or |e><e| (x) thermal field, truncated to the
// levels of `field`.
inline PurityRates purity_rate_exact(InitialAtom initial, const FieldDistribution& field, double t) {
  const std::size_t levels = field.levels();
  detail::require(levels >= 2, ErrorKind::InvalidParameter, "field distribution is empty");
  const auto freq = rabi_frequencies(levels);
  auto prob = [&](std::ptrdiff_t n) {
    return n >= 0 && static_cast<std::size_t>(n) < levels ? field.probs[static_cast<std::size_t>(n)] : 0.0;
  };
  auto w_at = [&](const std::vector<double>& w, std::ptrdiff_t n) {
    return n >= 0 && static_cast<std::size_t>(n) < levels ? w[static_cast<std::size_t>(n)] : 0.0;
  };
  const auto n_levels = static_cast<std::ptrdiff_t>(levels);

  PurityRates out;
  if (initial == InitialAtom::Ground) {
    double up = 0.0, up_rate = 0.0, down = 0.0, down_rate = 0.0;
    for (std::ptrdiff_t n = 0; n < n_levels; ++n) {
      const double b1 = w_at(freq.beta, n + 1);
      const double b0 = w_at(freq.beta, n);
      up += prob(n + 1) * std::pow(std::sin(b1 * t), 2);
      up_rate += prob(n + 1) * b1 * std::sin(2 * b1 * t);
      down += prob(n) * std::pow(std::cos(b0 * t), 2);
      down_rate += prob(n) * b0 * std::sin(2 * b0 * t);
      const double level = prob(n) * std::pow(std::cos(b0 * t), 2) + prob(n + 1) * std::pow(std::sin(b1 * t), 2);
      out.field += 2.0 * (prob(n + 1) * b1 * std::sin(2 * b1 * t) - prob(n) * b0 * std::sin(2 * b0 * t)) * level;
    }
    out.atom = 2.0 * up * up_rate - 2.0 * down * down_rate;
    return out;
  }

  double stay = 0.0, stay_rate = 0.0, moved = 0.0, moved_rate = 0.0;
  for (std::ptrdiff_t n = 0; n < n_levels; ++n) {
    const double a0 = w_at(freq.alpha, n);
    const double am = w_at(freq.alpha, n - 1);
    stay += prob(n) * std::pow(std::cos(a0 * t), 2);
    stay_rate += prob(n) * a0 * std::sin(2 * a0 * t);
    moved += prob(n - 1) * std::pow(std::sin(am * t), 2);
    moved_rate += prob(n - 1) * am * std::sin(2 * am * t);
    const double level = prob(n) * std::pow(std::cos(a0 * t), 2) + prob(n - 1) * std::pow(std::sin(am * t), 2);
    out.field += 2.0 * (prob(n - 1) * am * std::sin(2 * am * t) - prob(n) * a0 * std::sin(2 * a0 * t)) * level;
  }
  out.atom = -2.0 * stay_rate * stay + 2.0 * moved * moved_rate;
  return out;
}

// Leading P_i P_j term of the exact rates for a weakly excited thermal field.
inline PurityRates purity_rate_approx(InitialAtom initial, double n_bar, double t) {
  detail::require(n_bar >= 0.0, ErrorKind::InvalidParameter, "n_bar must be non-negative");
  const double p0 = 1.0 / (n_bar + 1.0);
  const double p1 = p0 * n_bar / (n_bar + 1.0);
  if (initial == InitialAtom::Ground) {
    constexpr double beta1 = 1.0;
    const double rate = 2.0 * p0 * p1 * beta1 * std::sin(2.0 * beta1 * t);
    return {-rate, rate};
  }
  constexpr double alpha0 = 1.0;
  const double rate = -p0 * p0 * alpha0 * std::sin(4.0 * alpha0 * t);
  return {rate, rate};
}

}  // namespace jcm
