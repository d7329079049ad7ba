#pragma once

// Dense complex matrices and a Hermitian eigensolver sized for the joint
// atom-field spaces used here (dimension up to a few hundred).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jcm/error.hpp"

namespace jcm {

using Complex = std::complex<double>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr int kEigenIterationBudget = 60;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
    entries_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      detail::require(row.size() == dim_, ErrorKind::DimensionMismatch, "matrix literal is not square");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) noexcept { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const noexcept {
    return entries_[row * dim_ + col];
  }

  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<Complex> entries() noexcept { return entries_; }

  bool is_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    check_same_dim(other);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    check_same_dim(other);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    return *this;
  }

  ComplexMatrix& operator*=(Complex scale) noexcept {
    for (auto& z : entries_) z *= scale;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void check_same_dim(const ComplexMatrix& other) const {
    detail::require(other.dim_ == dim_, ErrorKind::DimensionMismatch,
                    "dimensions " + std::to_string(dim_) + " and " + std::to_string(other.dim_));
  }

  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

// Block (i,j) of the result is a(i,j) * b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline Complex trace(const ComplexMatrix& a) {
  Complex sum{};
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a(i, i);
  return sum;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.dim() == b.dim(), ErrorKind::DimensionMismatch,
                  "matmul of " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline double frobenius_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const auto& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

inline double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "max_abs_difference");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
  return worst;
}

// max_ij |A - A^dagger|_ij
inline double hermiticity_residual(const ComplexMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = i; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

namespace detail {

// Householder reduction of a real symmetric row-major matrix to tridiagonal
// form. On return diag/off hold the tridiagonal (off[0] == 0). With
// accumulate, `a` is overwritten by the orthogonal transform.
inline void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& diag,
                           std::vector<double>& off, bool accumulate) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(at(i, k));
      if (scale == 0.0) {
        off[i] = at(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        off[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          if (accumulate) at(j, i) = at(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          off[j] = g / h;
          f += off[j] * at(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = at(i, j);
          off[j] = g = off[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) at(j, k) -= f * off[k] + g * at(i, k);
        }
      }
    } else {
      off[i] = at(i, l);
    }
    diag[i] = h;
  }
  diag[0] = 0.0;
  off[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (accumulate) {
      if (diag[i] != 0.0) {
        for (std::size_t j = 0; j < i; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k < i; ++k) g += at(i, k) * at(k, j);
          for (std::size_t k = 0; k < i; ++k) at(k, j) -= g * at(k, i);
        }
      }
      diag[i] = at(i, i);
      at(i, i) = 1.0;
      for (std::size_t j = 0; j < i; ++j) at(j, i) = at(i, j) = 0.0;
    } else {
      diag[i] = at(i, i);
    }
  }
}

// Eigenvalue-only variant of tridiagonalize. Keeps both triangles of the
// active block so every inner loop runs along contiguous rows.
inline void tridiagonalize_values(std::vector<double>& a, std::size_t n, std::vector<double>& diag,
                                  std::vector<double>& off) {
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  std::vector<double> q(n);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double* row = &a[i * n];
    if (l == 0) {
      off[i] = row[0];
      continue;
    }
    double scale = 0.0;
    for (std::size_t k = 0; k <= l; ++k) scale += std::abs(row[k]);
    if (scale == 0.0) {
      off[i] = row[l];
      continue;
    }
    double h = 0.0;
    for (std::size_t k = 0; k <= l; ++k) {
      row[k] /= scale;
      h += row[k] * row[k];
    }
    const double f = row[l];
    const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
    off[i] = scale * g;
    h -= f * g;
    row[l] = f - g;
    double up = 0.0;
    for (std::size_t j = 0; j <= l; ++j) {
      const double* aj = &a[j * n];
      double s = 0.0;
      for (std::size_t k = 0; k <= l; ++k) s += aj[k] * row[k];
      q[j] = s / h;
      up += q[j] * row[j];
    }
    const double hh = up / (h + h);
    for (std::size_t j = 0; j <= l; ++j) q[j] -= hh * row[j];
    for (std::size_t j = 0; j <= l; ++j) {
      double* aj = &a[j * n];
      const double uj = row[j];
      const double qj = q[j];
      for (std::size_t k = 0; k <= l; ++k) aj[k] -= uj * q[k] + qj * row[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a[i * n + i];
}

// sqrt(a^2 + b^2); std::hypot's extra-precision path dominated QL runtime.
inline double pythag(double a, double b) {
  constexpr double big = 1e150;
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa < big && ab < big) return std::sqrt(a * a + b * b);
  return std::hypot(a, b);
}

// Implicit-shift QL on a symmetric tridiagonal matrix. `vectors`, when
// non-null, is the n x n row-major transform from tridiagonalize and is
// rotated into the eigenvector matrix (eigenvectors in columns).
inline void tridiagonal_ql(std::vector<double>& diag, std::vector<double>& off, std::vector<double>* vectors) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) off[i - 1] = off[i];
  off[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iterations++ == kEigenIterationBudget)
        throw Error(ErrorKind::NoConvergence, "QL iteration exceeded " + std::to_string(kEigenIterationBudget) +
                                                  " sweeps at index " + std::to_string(l));
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = pythag(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool deflated = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * off[ii];
        const double b = c * off[ii];
        off[ii + 1] = r = pythag(f, g);
        if (r == 0.0) {
          diag[ii + 1] -= p;
          off[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[ii + 1] - p;
        r = (diag[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[ii + 1] = g + p;
        g = c * r - b;
        if (vectors != nullptr) {
          auto& z = *vectors;
          for (std::size_t k = 0; k < n; ++k) {
            f = z[k * n + ii + 1];
            z[k * n + ii + 1] = s * z[k * n + ii] + c * f;
            z[k * n + ii] = c * z[k * n + ii] - s * f;
          }
        }
      }
      if (deflated) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    } while (m != l);
  }
}

// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]]; every eigenvalue
// of H appears twice in its spectrum.
inline std::vector<double> real_embedding(const ComplexMatrix& h) {
  const std::size_t n = h.dim();
  const std::size_t m = 2 * n;
  std::vector<double> a(m * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = 0.5 * (h(i, j).real() + h(j, i).real());
      const double im = 0.5 * (h(i, j).imag() - h(j, i).imag());
      a[i * m + j] = re;
      a[(i + n) * m + (j + n)] = re;
      a[i * m + (j + n)] = -im;
      a[(i + n) * m + j] = im;
    }
  return a;
}

}  // namespace detail

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  std::optional<ComplexMatrix> vectors;  // eigenvectors in columns, ordered as values
};

inline EigenDecomposition hermitian_eig(const ComplexMatrix& h, bool want_vectors = false,
                                        double hermitian_tolerance = kHermitianTolerance) {
  const double residual = hermiticity_residual(h);
  detail::require(residual <= hermitian_tolerance, ErrorKind::NotHermitian,
                  "max |H - H^dagger| = " + std::to_string(residual));
  const std::size_t n = h.dim();
  EigenDecomposition out;
  if (n == 0) return out;

  const std::size_t m = 2 * n;
  std::vector<double> a = detail::real_embedding(h);
  std::vector<double> diag;
  std::vector<double> off;
  if (want_vectors)
    detail::tridiagonalize(a, m, diag, off, true);
  else
    detail::tridiagonalize_values(a, m, diag, off);
  detail::tridiagonal_ql(diag, off, want_vectors ? &a : nullptr);

  std::vector<double> doubled = diag;
  std::sort(doubled.begin(), doubled.end());
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = 0.5 * (doubled[2 * k] + doubled[2 * k + 1]);
  if (!want_vectors) return out;

  // Each real eigenvector (u; v) of the embedding maps to an eigenvector
  // u + i v of H; the 2n candidates span each eigenspace twice over. Pick n
  // of them by pivoted Gram-Schmidt on the residual norm.
  std::vector<std::vector<Complex>> residuals(m, std::vector<Complex>(n));
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t i = 0; i < n; ++i) residuals[c][i] = Complex(a[i * m + c], a[(i + n) * m + c]);
  std::vector<bool> taken(m, false);
  std::vector<std::pair<double, std::vector<Complex>>> basis;
  basis.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = m;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (taken[c]) continue;
      double norm = 0.0;
      for (const auto& z : residuals[c]) norm += std::norm(z);
      if (norm > best_norm) {
        best_norm = norm;
        best = c;
      }
    }
    taken[best] = true;
    std::vector<Complex> v = residuals[best];
    const double scale = 1.0 / std::sqrt(best_norm);
    for (auto& z : v) z *= scale;
    for (std::size_t c = 0; c < m; ++c) {
      if (taken[c]) continue;
      Complex overlap{};
      for (std::size_t i = 0; i < n; ++i) overlap += std::conj(v[i]) * residuals[c][i];
      for (std::size_t i = 0; i < n; ++i) residuals[c][i] -= overlap * v[i];
    }
    Complex rayleigh{};
    for (std::size_t i = 0; i < n; ++i) {
      Complex hv{};
      for (std::size_t j = 0; j < n; ++j) hv += h(i, j) * v[j];
      rayleigh += std::conj(v[i]) * hv;
    }
    basis.emplace_back(rayleigh.real(), std::move(v));
  }
  std::stable_sort(basis.begin(), basis.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  ComplexMatrix vectors(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) vectors(i, c) = basis[c].second[i];
  out.vectors = std::move(vectors);
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h,
                                                 double hermitian_tolerance = kHermitianTolerance) {
  return hermitian_eig(h, false, hermitian_tolerance).values;
}

}  // namespace jcm
