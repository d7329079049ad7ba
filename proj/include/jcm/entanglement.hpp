#pragma once

// Peres partial transposition and the negative-eigenvalue entanglement
// measure. Truncating the Fock basis leaves one negative eigenvalue on the
// scale of the discarded tail in otherwise PPT states; eigenvalues with
// magnitude below the artifact threshold are reported separately and do not
// count as entanglement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "jcm/error.hpp"
#include "jcm/linalg.hpp"
#include "jcm/states.hpp"

namespace jcm {

inline constexpr double kArtifactThreshold = 1e-12;

// rho^{T}_{i alpha, j beta} = rho_{i beta, j alpha}, transposing the field
// factor by default.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, const Bipartite& dims,
                                       Subsystem which = Subsystem::Field) {
  detail::require(dims.total() == m.dim(), ErrorKind::DimensionMismatch, "factorization does not match matrix");
  const std::size_t da = dims.atom_dim;
  const std::size_t df = dims.field_dim;
  ComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t alpha = 0; alpha < df; ++alpha)
        for (std::size_t beta = 0; beta < df; ++beta) {
          if (which == Subsystem::Field)
            out(i * df + alpha, j * df + beta) = m(i * df + beta, j * df + alpha);
          else
            out(i * df + alpha, j * df + beta) = m(j * df + alpha, i * df + beta);
        }
  return out;
}

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem which = Subsystem::Field) {
  return partial_transpose(rho.matrix(), rho.bipartite(), which);
}

inline std::vector<double> negative_part(std::span<const double> ascending) {
  std::vector<double> out;
  for (double lambda : ascending) {
    if (lambda >= 0.0) break;
    out.push_back(lambda);
  }
  return out;
}

inline std::vector<double> negative_eigenvalues(const ComplexMatrix& m) {
  const auto eig = hermitian_eigenvalues(m);
  return negative_part(eig);
}

struct ArtifactSplit {
  std::vector<double> artifacts;
  std::vector<double> significant;
};

inline ArtifactSplit filter_artifact(std::span<const double> negatives, double threshold = kArtifactThreshold) {
  detail::require(threshold > 0.0, ErrorKind::InvalidParameter, "artifact threshold must be positive");
  ArtifactSplit out;
  for (double lambda : negatives) (std::abs(lambda) < threshold ? out.artifacts : out.significant).push_back(lambda);
  return out;
}

struct PptReport {
  std::vector<double> eigenvalues;  // ascending spectrum of rho^{T2}
  std::vector<double> negatives;
  std::size_t artifact_count = 0;
  std::vector<double> significant_negatives;
  double lambda_m = 0.0;                // most negative significant eigenvalue, 0 if none
  double max_artifact_magnitude = 0.0;  // largest |lambda| among artifacts, 0 if none
};

inline PptReport analyze_spectrum(std::vector<double> ascending, double threshold = kArtifactThreshold) {
  PptReport out;
  out.negatives = negative_part(ascending);
  auto split = filter_artifact(out.negatives, threshold);
  out.artifact_count = split.artifacts.size();
  for (double a : split.artifacts) out.max_artifact_magnitude = std::max(out.max_artifact_magnitude, std::abs(a));
  out.significant_negatives = std::move(split.significant);
  if (!out.significant_negatives.empty()) out.lambda_m = out.significant_negatives.front();
  out.eigenvalues = std::move(ascending);
  return out;
}

inline PptReport ppt_report(const DensityMatrix& rho, double threshold = kArtifactThreshold) {
  return analyze_spectrum(hermitian_eigenvalues(partial_transpose(rho)), threshold);
}

struct EMeasure {
  double mean_lambda_m = 0.0;
  // log10 |mean lambda_m|; -infinity marks a separable-grade trajectory.
  double value = -std::numeric_limits<double>::infinity();

  bool separable_grade() const noexcept { return mean_lambda_m == 0.0; }
};

// Samples without a significant negative eigenvalue contribute lambda_m = 0.
inline EMeasure e_measure_from_lambdas(std::span<const double> lambda_m) {
  detail::require(!lambda_m.empty(), ErrorKind::InvalidParameter, "E measure needs at least one sample");
  double sum = 0.0;
  for (double l : lambda_m) sum += l;
  EMeasure out;
  out.mean_lambda_m = sum / static_cast<double>(lambda_m.size());
  if (out.mean_lambda_m != 0.0) out.value = std::log10(std::abs(out.mean_lambda_m));
  return out;
}

inline EMeasure e_measure(std::span<const PptReport> reports) {
  std::vector<double> lambdas;
  lambdas.reserve(reports.size());
  for (const auto& r : reports) lambdas.push_back(r.lambda_m);
  return e_measure_from_lambdas(lambdas);
}

// PPT is only necessary for separability in 2 x N with N > 3, so a clean
// spectrum is never reported as separable.
enum class PptVerdict { Entangled, Indeterminate };

inline PptVerdict ppt_verdict(const PptReport& report) {
  return report.significant_negatives.empty() ? PptVerdict::Indeterminate : PptVerdict::Entangled;
}

inline std::string_view to_string(PptVerdict v) {
  return v == PptVerdict::Entangled ? "Entangled" : "Indeterminate";
}

}  // namespace jcm
