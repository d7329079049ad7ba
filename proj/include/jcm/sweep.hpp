#pragma once

// Bloch-sphere sweeps over (theta, r) at phi = 0. Each cell evolves
// bloch_qubit(r, theta) (x) thermal(n_bar) over the whole time grid and
// reduces it to the exchange parameter P, the mutual ratio R_bar and the
// PPT measure E.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/entanglement.hpp"
#include "jcm/entropy.hpp"
#include "jcm/error.hpp"
#include "jcm/states.hpp"
#include "jcm/trajectory.hpp"

namespace jcm {

inline constexpr double kExchangeCutoff = -0.8;
inline constexpr std::size_t kDefaultGridSize = 51;
inline constexpr double kDefaultRadiusMin = 0.02;
// Every kSpotCheckStride-th cell (5%) re-checks unitarity and <N> conservation.
inline constexpr std::size_t kSpotCheckStride = 20;
inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr double kExcitationDriftTolerance = 1e-12;

// Atom populations match the field's Boltzmann ratio, P_e / P_g = n/(n+1).
inline BlochParams fixed_point(double n_bar) {
  detail::require(n_bar > 0.0 && std::isfinite(n_bar), ErrorKind::InvalidParameter,
                  "fixed point needs n_bar > 0, got " + std::to_string(n_bar));
  return {1.0 / (2.0 * n_bar + 1.0), -std::numbers::pi / 2, 0.0};
}

inline std::vector<double> linspace(double first, double last, std::size_t count) {
  detail::require(count >= 1, ErrorKind::InvalidParameter, "linspace needs at least one point");
  if (count == 1) return {first};
  std::vector<double> out(count);
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = first + step * static_cast<double>(k);
  out.back() = last;
  return out;
}

struct SweepGrid {
  std::vector<double> theta_values;
  std::vector<double> r_values;
  double n_bar = 0.1;
  std::size_t n_f = 13;
  std::vector<double> t_grid;
};

inline SweepGrid default_sweep_grid(double n_bar, std::size_t n_f, std::size_t n_theta = kDefaultGridSize,
                                    std::size_t n_r = kDefaultGridSize, std::vector<double> t_grid = uniform_time_grid()) {
  return {linspace(-std::numbers::pi / 2, std::numbers::pi / 2, n_theta), linspace(kDefaultRadiusMin, 1.0, n_r), n_bar,
          n_f, std::move(t_grid)};
}

inline void validate_grid(const SweepGrid& grid) {
  auto strictly_increasing = [](const std::vector<double>& v) {
    return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  detail::require(strictly_increasing(grid.theta_values), ErrorKind::InvalidParameter,
                  "theta axis must be non-empty and strictly increasing");
  detail::require(strictly_increasing(grid.r_values), ErrorKind::InvalidParameter,
                  "r axis must be non-empty and strictly increasing");
  detail::require(grid.r_values.front() > 0.0 && grid.r_values.back() <= 1.0, ErrorKind::InvalidParameter,
                  "r axis must lie in (0, 1]");
  detail::require(grid.n_f >= 1, ErrorKind::InvalidParameter, "sweep needs n_f >= 1");
  detail::require(grid.n_bar >= 0.0, ErrorKind::InvalidParameter, "n_bar must be non-negative");
  validate_time_grid(grid.t_grid);
  detail::require(grid.t_grid.size() >= 2, ErrorKind::InvalidParameter, "sweep needs at least two time samples");
}

struct Diagnostics {
  bool exchange = true;
  bool mutual = true;
  bool ppt = true;
};

struct SweepOptions {
  std::size_t workers = 1;
  double eps = kRatioEpsilon;
  double artifact_threshold = kArtifactThreshold;
};

struct SweepCell {
  double theta = 0.0;
  double r = 0.0;
  double p = 0.0;
  double r_bar = 0.0;
  double e = -std::numeric_limits<double>::infinity();
  std::size_t n_significant_negatives = 0;  // max over time samples
  double max_artifact_magnitude = 0.0;      // max over time samples
  bool p_defined = false;
  bool r_defined = false;
  bool ppt_evaluated = false;
  bool spot_checked = false;
  bool invariant_violation = false;
  std::string error;  // non-empty when the cell could not be evaluated

  std::string status(const Diagnostics& requested) const {
    if (!error.empty()) return "error:" + error;
    std::string s;
    auto add = [&](const char* tag) {
      if (!s.empty()) s += ';';
      s += tag;
    };
    if (requested.exchange && !p_defined) add("P_skipped");
    if (requested.mutual && !r_defined) add("R_skipped");
    if (invariant_violation) add("invariant_violation");
    return s.empty() ? "ok" : s;
  }
};

namespace detail {

inline SweepCell evaluate_cell(const SweepGrid& grid, const FieldDistribution& field, double theta, double r,
                               const Diagnostics& diag, const SweepOptions& options, bool spot_check) {
  SweepCell cell;
  cell.theta = theta;
  cell.r = r;
  cell.spot_checked = spot_check;
  const DensityMatrix rho0 = product_state(bloch_qubit({r, theta, 0.0}), field);
  const auto n_f = static_cast<long long>(grid.n_f);
  const double n0 = excitation_expectation(rho0);
  // S_af is invariant under unitary evolution; trajectories verify this
  // per sample, sweeps use the initial value.
  const double s_joint = diag.mutual ? von_neumann(rho0) : 0.0;

  const std::size_t samples = grid.t_grid.size();
  std::vector<double> s_atom(samples), s_field(samples), lambdas;
  if (diag.ppt) lambdas.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const Propagator u = build_propagator(n_f, grid.t_grid[k]);
    const DensityMatrix rho = evolve_unchecked(rho0, u);
    s_atom[k] = von_neumann(partial_trace(rho, Subsystem::Atom));
    s_field[k] = von_neumann(partial_trace(rho, Subsystem::Field));
    if (diag.ppt) {
      const PptReport report = analyze_spectrum(hermitian_eigenvalues(partial_transpose(rho)), options.artifact_threshold);
      lambdas.push_back(report.lambda_m);
      cell.n_significant_negatives = std::max(cell.n_significant_negatives, report.significant_negatives.size());
      cell.max_artifact_magnitude = std::max(cell.max_artifact_magnitude, report.max_artifact_magnitude);
    }
    if (spot_check) {
      const double unitarity =
          frobenius_norm(matmul(adjoint(u.mat), u.mat) - ComplexMatrix::identity(u.mat.dim()));
      const double drift = std::abs(excitation_expectation(rho) - n0);
      if (unitarity >= kUnitarityTolerance || drift >= kExcitationDriftTolerance) cell.invariant_violation = true;
    }
  }

  if (diag.exchange) {
    try {
      cell.p = exchange_parameter(s_atom, s_field, options.eps).p;
      cell.p_defined = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AllStepsSkipped) throw;
    }
  }
  if (diag.mutual) {
    try {
      const std::vector<double> joint(samples, s_joint);
      cell.r_bar = r_parameter(s_atom, s_field, joint, options.eps).r_bar;
      cell.r_defined = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AllStepsSkipped) throw;
    }
  }
  if (diag.ppt) {
    cell.ppt_evaluated = true;
    cell.e = e_measure_from_lambdas(lambdas).value;
  }
  return cell;
}

}  // namespace detail

// Cells are theta-major: index = i_theta * r_values.size() + i_r. Output is
// independent of the worker count.
inline std::vector<SweepCell> run_sweep(const SweepGrid& grid, const Diagnostics& diagnostics = {},
                                        const SweepOptions& options = {}) {
  validate_grid(grid);
  detail::require(options.eps > 0.0 && options.artifact_threshold > 0.0, ErrorKind::InvalidParameter,
                  "sweep tolerances must be positive");
  const FieldDistribution field = thermal_field(grid.n_bar, static_cast<long long>(grid.n_f));
  const std::size_t n_r = grid.r_values.size();
  const std::size_t total = grid.theta_values.size() * n_r;
  std::vector<SweepCell> cells(total);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const double theta = grid.theta_values[idx / n_r];
      const double r = grid.r_values[idx % n_r];
      try {
        cells[idx] = detail::evaluate_cell(grid, field, theta, r, diagnostics, options, idx % kSpotCheckStride == 0);
      } catch (const Error& e) {
        cells[idx].theta = theta;
        cells[idx].r = r;
        cells[idx].error = std::string(to_string(e.kind()));
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(total, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return cells;
}

inline std::vector<SweepCell> exchange_region(std::span<const SweepCell> cells, double cutoff = kExchangeCutoff) {
  std::vector<SweepCell> out;
  for (const auto& c : cells)
    if (c.p_defined && c.p < cutoff) out.push_back(c);
  return out;
}

}  // namespace jcm
