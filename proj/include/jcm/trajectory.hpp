#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/entanglement.hpp"
#include "jcm/entropy.hpp"
#include "jcm/error.hpp"
#include "jcm/states.hpp"

namespace jcm {

inline constexpr double kDefaultTimeMax = 25.0;
inline constexpr double kDefaultTimeStep = 0.01;

// t_k = k * dt for k = 0..round(t_max / dt); indices, not accumulated sums.
inline std::vector<double> uniform_time_grid(double t_max = kDefaultTimeMax, double dt = kDefaultTimeStep) {
  detail::require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidParameter, "dt must be positive");
  detail::require(t_max >= dt, ErrorKind::InvalidParameter, "t_max must be at least dt");
  const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) * dt;
  return grid;
}

inline void validate_time_grid(std::span<const double> grid) {
  detail::require(!grid.empty(), ErrorKind::InvalidParameter, "time grid is empty");
  detail::require(grid.front() == 0.0, ErrorKind::InvalidParameter, "time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    detail::require(grid[k] > grid[k - 1], ErrorKind::InvalidParameter,
                    "time grid must be strictly increasing (index " + std::to_string(k) + ")");
}

struct TrajectoryOptions {
  bool joint_entropy = true;  // also yields the positivity check of rho(t)
  bool ppt = true;
  double artifact_threshold = kArtifactThreshold;
  DensityTolerances tolerances{};
};

struct TrajectoryRecord {
  double t = 0.0;
  double s_atom = 0.0;
  double s_field = 0.0;
  double s_joint = 0.0;  // NaN when joint_entropy is off
  double purity_atom = 1.0;
  double purity_field = 1.0;
  double n_expect = 0.0;
  double trace_error = 0.0;
  std::optional<PptReport> ppt;
};

// Each sample is evolved from rho0 with its own closed-form propagator, so
// there is no accumulation of step error along the grid.
inline std::vector<TrajectoryRecord> trajectory(const DensityMatrix& rho0, std::span<const double> t_grid,
                                                const TrajectoryOptions& options = {}) {
  validate_time_grid(t_grid);
  detail::check_joint(rho0);
  const auto n_f = static_cast<long long>(rho0.bipartite().field_dim) - 2;
  std::vector<TrajectoryRecord> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const DensityMatrix rho = evolve_unchecked(rho0, build_propagator(n_f, t), options.tolerances);
    const DensityMatrix atom = partial_trace(rho, Subsystem::Atom);
    const DensityMatrix field = partial_trace(rho, Subsystem::Field);
    TrajectoryRecord rec;
    rec.t = t;
    rec.s_atom = von_neumann(atom);
    rec.s_field = von_neumann(field);
    rec.purity_atom = purity(atom);
    rec.purity_field = purity(field);
    rec.n_expect = excitation_expectation(rho);
    rec.trace_error = std::abs(trace(rho.matrix()) - 1.0);
    if (options.joint_entropy) {
      const auto spectrum = hermitian_eigenvalues(rho.matrix());
      detail::require(spectrum.front() >= -options.tolerances.positivity, ErrorKind::NotPositive,
                      "evolved state at t=" + std::to_string(t) + " has eigenvalue " + std::to_string(spectrum.front()));
      rec.s_joint = entropy_of_spectrum(spectrum);
    } else {
      rec.s_joint = std::nan("");
    }
    if (options.ppt) rec.ppt = ppt_report(rho, options.artifact_threshold);
    out.push_back(std::move(rec));
  }
  return out;
}

inline EntropySeries to_entropy_series(std::span<const TrajectoryRecord> records) {
  EntropySeries s;
  for (const auto& r : records) {
    s.t.push_back(r.t);
    s.s_atom.push_back(r.s_atom);
    s.s_field.push_back(r.s_field);
    s.s_joint.push_back(r.s_joint);
    s.purity_atom.push_back(r.purity_atom);
    s.purity_field.push_back(r.purity_field);
  }
  return s;
}

}  // namespace jcm
