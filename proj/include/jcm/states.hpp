#pragma once

// Atomic, field and joint density matrices.
//
// Joint states use the atom-major ordering |e>x|0..L> followed by
// |g>x|0..L>, where L = n_f + 1 is the lump level that carries all thermal
// probability beyond n_f.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jcm/error.hpp"
#include "jcm/linalg.hpp"

namespace jcm {

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kTruncationTolerance = 1e-14;

enum class Subsystem { Atom, Field };

struct Bipartite {
  std::size_t atom_dim = 2;
  std::size_t field_dim = 0;

  std::size_t total() const noexcept { return atom_dim * field_dim; }
  friend bool operator==(const Bipartite&, const Bipartite&) = default;
};

struct DensityTolerances {
  double hermitian = kHermitianTolerance;
  double trace = kTraceTolerance;
  double positivity = kPositivityTolerance;
};

class DensityMatrix {
 public:
  // For results of trace- and positivity-preserving maps on validated
  // inputs. Anything else goes through validate_density.
  static DensityMatrix assume_valid(ComplexMatrix mat, std::optional<Bipartite> dims = std::nullopt) {
    return DensityMatrix(std::move(mat), dims);
  }

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.dim(); }
  const std::optional<Bipartite>& factorization() const noexcept { return dims_; }

  const Bipartite& bipartite() const {
    detail::require(dims_.has_value(), ErrorKind::MissingFactorization,
                    "density matrix of dimension " + std::to_string(dim()) + " has no recorded factorization");
    return *dims_;
  }

 private:
  DensityMatrix(ComplexMatrix mat, std::optional<Bipartite> dims) : mat_(std::move(mat)), dims_(dims) {}

  ComplexMatrix mat_;
  std::optional<Bipartite> dims_;
};

inline DensityMatrix validate_density(ComplexMatrix m, std::optional<Bipartite> dims = std::nullopt,
                                      const DensityTolerances& tol = {}) {
  detail::require(m.dim() > 0, ErrorKind::InvalidParameter, "empty matrix");
  if (dims)
    detail::require(dims->total() == m.dim(), ErrorKind::DimensionMismatch,
                    "factorization " + std::to_string(dims->atom_dim) + "x" + std::to_string(dims->field_dim) +
                        " does not match dimension " + std::to_string(m.dim()));
  detail::require(m.is_finite(), ErrorKind::InvalidParameter, "non-finite entries");
  const double herm = hermiticity_residual(m);
  detail::require(herm <= tol.hermitian, ErrorKind::NotHermitian,
                  "Hermiticity violated: max |rho - rho^dagger| = " + std::to_string(herm));
  const double tr_err = std::abs(trace(m) - 1.0);
  detail::require(tr_err <= tol.trace, ErrorKind::TraceNotOne, "unit trace violated: |Tr rho - 1| = " +
                                                                   std::to_string(tr_err));
  const auto eig = hermitian_eigenvalues(m, tol.hermitian);
  detail::require(eig.front() >= -tol.positivity, ErrorKind::NotPositive,
                  "positivity violated: minimum eigenvalue = " + std::to_string(eig.front()));
  return DensityMatrix::assume_valid(std::move(m), dims);
}

// Truncated Planck distribution: probs[n] for n <= n_f, then the lump.
struct FieldDistribution {
  double n_bar = 0.0;
  std::size_t n_f = 0;
  std::vector<double> probs;

  std::size_t levels() const noexcept { return probs.size(); }
  double tail_mass() const noexcept { return probs.empty() ? 0.0 : probs.back(); }
};

struct BlochParams {
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
};

// e^{-hbar omega / k_B T} = n_bar / (n_bar + 1).
class BoltzmannRatio {
 public:
  explicit BoltzmannRatio(double ratio) : ratio_(ratio) {
    detail::require(ratio > 0.0 && ratio < 1.0, ErrorKind::InvalidParameter,
                    "Boltzmann ratio must lie in (0,1), got " + std::to_string(ratio));
  }
  static BoltzmannRatio from_mean_photons(double n_bar) {
    detail::require(n_bar > 0.0, ErrorKind::InvalidParameter, "n_bar must be positive");
    return BoltzmannRatio(n_bar / (n_bar + 1.0));
  }
  double value() const noexcept { return ratio_; }

 private:
  double ratio_;
};

inline FieldDistribution thermal_field(double n_bar, long long n_f) {
  detail::require(n_bar >= 0.0 && std::isfinite(n_bar), ErrorKind::InvalidParameter,
                  "n_bar must be finite and non-negative, got " + std::to_string(n_bar));
  detail::require(n_f >= 0, ErrorKind::InvalidParameter, "n_f must be non-negative, got " + std::to_string(n_f));
  const auto last = static_cast<std::size_t>(n_f);
  const double q = n_bar / (n_bar + 1.0);
  FieldDistribution out{n_bar, last, std::vector<double>(last + 2)};
  double p = 1.0 / (n_bar + 1.0);
  for (std::size_t n = 0; n <= last; ++n) {
    out.probs[n] = p;
    p *= q;
  }
  // Lump mass is the exact geometric tail; 1 - sum would lose all relative
  // precision once the tail drops near machine epsilon.
  out.probs[last + 1] = std::pow(q, static_cast<double>(last + 1));
  return out;
}

namespace detail {

inline double shannon_entropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

}  // namespace detail

// Smallest n_f >= 1 whose field entropy moves by less than tol when one
// more Fock level is split off the lump.
inline std::size_t auto_truncate(double n_bar, double tol = kTruncationTolerance) {
  detail::require(tol > 0.0, ErrorKind::InvalidParameter, "truncation tolerance must be positive");
  detail::require(n_bar >= 0.0 && std::isfinite(n_bar), ErrorKind::InvalidParameter,
                  "n_bar must be finite and non-negative, got " + std::to_string(n_bar));
  constexpr std::size_t kMaxLevels = 20000;
  double current = detail::shannon_entropy(thermal_field(n_bar, 1).probs);
  for (std::size_t n_f = 1; n_f < kMaxLevels; ++n_f) {
    const double next = detail::shannon_entropy(thermal_field(n_bar, static_cast<long long>(n_f + 1)).probs);
    if (std::abs(next - current) < tol) return n_f;
    current = next;
  }
  throw Error(ErrorKind::InvalidParameter, "no truncation below " + std::to_string(kMaxLevels) +
                                               " levels meets tolerance for n_bar=" + std::to_string(n_bar));
}

inline DensityMatrix field_density(const FieldDistribution& field) {
  return DensityMatrix::assume_valid(ComplexMatrix::diagonal(field.probs));
}

inline void validate_bloch(const BlochParams& p) {
  constexpr double slack = 1e-9;
  detail::require(p.r > 0.0 && p.r <= 1.0, ErrorKind::InvalidParameter,
                  "Bloch radius must lie in (0,1], got " + std::to_string(p.r));
  detail::require(p.theta >= -std::numbers::pi / 2 - slack && p.theta <= std::numbers::pi / 2 + slack,
                  ErrorKind::InvalidParameter, "theta must lie in [-pi/2, pi/2], got " + std::to_string(p.theta));
  detail::require(p.phi >= 0.0 && p.phi < 2.0 * std::numbers::pi, ErrorKind::InvalidParameter,
                  "phi must lie in [0, 2pi), got " + std::to_string(p.phi));
}

// rho = (I + x sx + y sy + z sz) / 2 in the (e, g) basis with z = r sin(theta):
// positive theta leans towards the excited state.
inline DensityMatrix bloch_qubit(const BlochParams& p) {
  validate_bloch(p);
  // cos of the double nearest pi/2 is 6e-17, not 0; keep the poles diagonal.
  const double cos_theta = std::abs(std::abs(p.theta) - std::numbers::pi / 2) < 1e-15 ? 0.0 : std::cos(p.theta);
  const double z = p.r * std::sin(p.theta);
  const double x = p.r * cos_theta * std::cos(p.phi);
  const double y = p.r * cos_theta * std::sin(p.phi);
  ComplexMatrix m(2);
  m(0, 0) = 0.5 * (1.0 + z);
  m(1, 1) = 0.5 * (1.0 - z);
  m(0, 1) = Complex(0.5 * x, -0.5 * y);
  m(1, 0) = Complex(0.5 * x, 0.5 * y);
  return DensityMatrix::assume_valid(std::move(m));
}

inline DensityMatrix excited_atom() { return bloch_qubit({1.0, std::numbers::pi / 2, 0.0}); }
inline DensityMatrix ground_atom() { return bloch_qubit({1.0, -std::numbers::pi / 2, 0.0}); }

inline DensityMatrix product_state(const DensityMatrix& atom, const DensityMatrix& field) {
  detail::require(atom.dim() == 2, ErrorKind::DimensionMismatch,
                  "atom must be a qubit, got dimension " + std::to_string(atom.dim()));
  return DensityMatrix::assume_valid(kron(atom.matrix(), field.matrix()), Bipartite{2, field.dim()});
}

inline DensityMatrix product_state(const DensityMatrix& atom, const FieldDistribution& field) {
  return product_state(atom, field_density(field));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  const auto [da, df] = rho.bipartite();
  const auto& m = rho.matrix();
  if (keep == Subsystem::Atom) {
    ComplexMatrix out(da);
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < da; ++b) {
        Complex sum{};
        for (std::size_t n = 0; n < df; ++n) sum += m(a * df + n, b * df + n);
        out(a, b) = sum;
      }
    return DensityMatrix::assume_valid(std::move(out));
  }
  ComplexMatrix out(df);
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t n = 0; n < df; ++n)
      for (std::size_t k = 0; k < df; ++k) out(n, k) += m(a * df + n, a * df + k);
  return DensityMatrix::assume_valid(std::move(out));
}

}  // namespace jcm
