#pragma once

// Run configuration, CSV writers and JSON payloads for the command-line
// front end. Data files carry no timestamps; run metadata goes to a sidecar.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "jcm/entanglement.hpp"
#include "jcm/entropy.hpp"
#include "jcm/states.hpp"
#include "jcm/sweep.hpp"
#include "jcm/trajectory.hpp"

namespace jcm::io {

// Invalid user input. field() is the flag name without dashes.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument("invalid " + field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// 17 significant digits round-trip every double.
inline std::string format_real(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

inline double parse_real(std::string_view text, const std::string& field) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "'" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError(field, "'" + s + "' is not a number");
  return v;
}

inline std::size_t parse_count(std::string_view text, const std::string& field) {
  const std::string s(text);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(field, "'" + s + "' is not a non-negative integer");
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw ConfigError(field, "'" + s + "' is out of range");
  }
}

}  // namespace detail

struct AtomChoice {
  enum class Kind { Ground, Excited, Bloch };
  Kind kind = Kind::Ground;
  BlochParams bloch{1.0, -std::numbers::pi / 2, 0.0};

  DensityMatrix state() const {
    switch (kind) {
      case Kind::Ground: return ground_atom();
      case Kind::Excited: return excited_atom();
      default: return bloch_qubit(bloch);
    }
  }
};

// "ground", "excited" or "r=..,theta=..,phi=.." (phi optional, default 0).
inline AtomChoice parse_atom(std::string_view text) {
  const auto s = detail::trim(text);
  if (s == "ground") return {AtomChoice::Kind::Ground, {1.0, -std::numbers::pi / 2, 0.0}};
  if (s == "excited") return {AtomChoice::Kind::Excited, {1.0, std::numbers::pi / 2, 0.0}};
  AtomChoice out{AtomChoice::Kind::Bloch, {0.0, 0.0, 0.0}};
  bool has_r = false, has_theta = false;
  for (auto item : detail::split(s, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("atom", "expected ground, excited or r=..,theta=..,phi=.., got '" + std::string(s) + "'");
    const auto key = detail::trim(item.substr(0, eq));
    const auto value = detail::trim(item.substr(eq + 1));
    if (key == "r") {
      out.bloch.r = detail::parse_real(value, "atom.r");
      has_r = true;
    } else if (key == "theta") {
      out.bloch.theta = detail::parse_real(value, "atom.theta");
      has_theta = true;
    } else if (key == "phi") {
      out.bloch.phi = detail::parse_real(value, "atom.phi");
    } else {
      throw ConfigError("atom", "unknown key '" + std::string(key) + "'");
    }
  }
  if (!has_r || !has_theta) throw ConfigError("atom", "Bloch form needs both r and theta");
  try {
    validate_bloch(out.bloch);
  } catch (const Error& e) {
    throw ConfigError("atom", e.what());
  }
  return out;
}

inline std::string describe(const AtomChoice& atom) {
  switch (atom.kind) {
    case AtomChoice::Kind::Ground: return "ground";
    case AtomChoice::Kind::Excited: return "excited";
    default:
      return "r=" + format_real(atom.bloch.r) + ",theta=" + format_real(atom.bloch.theta) +
             ",phi=" + format_real(atom.bloch.phi);
  }
}

inline Diagnostics parse_diagnostics(std::string_view text) {
  Diagnostics out{false, false, false};
  for (auto item : detail::split(text, ',')) {
    if (item == "exchange") out.exchange = true;
    else if (item == "mutual") out.mutual = true;
    else if (item == "ppt") out.ppt = true;
    else throw ConfigError("diagnostics", "unknown diagnostic '" + std::string(item) + "' (exchange, mutual, ppt)");
  }
  return out;
}

inline std::string describe(const Diagnostics& d) {
  std::string s;
  for (auto [on, name] : {std::pair{d.exchange, "exchange"}, std::pair{d.mutual, "mutual"}, std::pair{d.ppt, "ppt"}})
    if (on) s += (s.empty() ? "" : ",") + std::string(name);
  return s;
}

// "NxM": N theta values by M radii.
inline std::pair<std::size_t, std::size_t> parse_grid(std::string_view text) {
  const auto parts = detail::split(text, 'x');
  if (parts.size() != 2) throw ConfigError("grid", "expected NxM, got '" + std::string(text) + "'");
  const auto n_theta = detail::parse_count(parts[0], "grid");
  const auto n_r = detail::parse_count(parts[1], "grid");
  if (n_theta == 0 || n_r == 0) throw ConfigError("grid", "both grid sizes must be at least 1");
  return {n_theta, n_r};
}

// nullopt selects auto_truncate.
inline std::optional<std::size_t> parse_n_f(std::string_view text) {
  if (detail::trim(text) == "auto") return std::nullopt;
  const auto n = detail::parse_count(detail::trim(text), "n-f");
  if (n < 1) throw ConfigError("n-f", "must be at least 1 or 'auto'");
  return n;
}

struct RunConfig {
  double n_bar = 0.1;
  std::optional<std::size_t> n_f;  // empty: auto
  AtomChoice atom{};
  double t_max = kDefaultTimeMax;
  double dt = kDefaultTimeStep;
  double eps = kRatioEpsilon;
  double artifact_threshold = kArtifactThreshold;
  Diagnostics diagnostics{};
  std::string output_path;
  std::size_t grid_theta = kDefaultGridSize;
  std::size_t grid_r = kDefaultGridSize;
  double r_min = kDefaultRadiusMin;
  double r_max = 1.0;
  double theta_min = -std::numbers::pi / 2;
  double theta_max = std::numbers::pi / 2;
  std::size_t workers = 1;
};

inline void validate(const RunConfig& c) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(c.n_bar) || c.n_bar < 0.0) throw ConfigError("n-bar", "must be finite and non-negative");
  if (!finite(c.dt) || c.dt <= 0.0) throw ConfigError("dt", "must be positive");
  if (!finite(c.t_max) || c.t_max < c.dt) throw ConfigError("t-max", "must be at least dt");
  if (!finite(c.eps) || c.eps <= 0.0) throw ConfigError("eps", "must be positive");
  if (!finite(c.artifact_threshold) || c.artifact_threshold <= 0.0)
    throw ConfigError("artifact-threshold", "must be positive");
  if (c.n_f && *c.n_f < 1) throw ConfigError("n-f", "must be at least 1 or 'auto'");
  if (c.grid_theta < 1 || c.grid_r < 1) throw ConfigError("grid", "both grid sizes must be at least 1");
  if (!finite(c.r_min) || c.r_min <= 0.0 || c.r_min > 1.0) throw ConfigError("r-min", "must lie in (0, 1]");
  if (!finite(c.r_max) || c.r_max > 1.0 || c.r_max < c.r_min) throw ConfigError("r-max", "must lie in [r-min, 1]");
  constexpr double pole = std::numbers::pi / 2 + 1e-9;
  if (!finite(c.theta_min) || c.theta_min < -pole) throw ConfigError("theta-min", "must be at least -pi/2");
  if (!finite(c.theta_max) || c.theta_max > pole || c.theta_max < c.theta_min)
    throw ConfigError("theta-max", "must lie in [theta-min, pi/2]");
  if (c.grid_theta > 1 && c.theta_max == c.theta_min) throw ConfigError("theta-max", "theta range is empty");
  if (c.grid_r > 1 && c.r_max == c.r_min) throw ConfigError("r-max", "radius range is empty");
  if (c.workers < 1) throw ConfigError("workers", "must be at least 1");
}

inline std::size_t resolve_n_f(const RunConfig& c) {
  return c.n_f ? *c.n_f : auto_truncate(c.n_bar, kTruncationTolerance);
}

// A single-point axis sits at its lower bound.
inline SweepGrid sweep_grid(const RunConfig& c, std::size_t n_f) {
  return {linspace(c.theta_min, c.theta_max, c.grid_theta), linspace(c.r_min, c.r_max, c.grid_r), c.n_bar, n_f,
          uniform_time_grid(c.t_max, c.dt)};
}

inline constexpr std::string_view kTrajectoryHeader =
    "lambda_t,S_a,S_f,S_af,dS_a,dS_f,dS_sum,purity_a,purity_f,N_expect,lambda_m,n_neg_sig";
inline constexpr std::string_view kSweepHeader = "theta,r,P,R_bar,E,n_neg_sig,status";

// Without PPT data lambda_m and n_neg_sig are written as 0.
inline void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRecord> records) {
  os << kTrajectoryHeader << '\n';
  if (records.empty()) return;
  const double a0 = records.front().s_atom;
  const double f0 = records.front().s_field;
  for (const auto& r : records) {
    const double da = r.s_atom - a0;
    const double df = r.s_field - f0;
    const double lambda_m = r.ppt ? r.ppt->lambda_m : 0.0;
    const std::size_t n_neg = r.ppt ? r.ppt->significant_negatives.size() : 0;
    os << format_real(r.t) << ',' << format_real(r.s_atom) << ',' << format_real(r.s_field) << ','
       << format_real(r.s_joint) << ',' << format_real(da) << ',' << format_real(df) << ',' << format_real(da + df)
       << ',' << format_real(r.purity_atom) << ',' << format_real(r.purity_field) << ',' << format_real(r.n_expect)
       << ',' << format_real(lambda_m) << ',' << n_neg << '\n';
  }
}

// Quantities that were not requested, skipped or failed are written as 0 and
// explained by the status column; E keeps its -inf sentinel.
inline void write_sweep_csv(std::ostream& os, std::span<const SweepCell> cells, const Diagnostics& requested) {
  os << kSweepHeader << '\n';
  for (const auto& c : cells) {
    const bool ok = c.error.empty();
    const double p = ok && c.p_defined ? c.p : 0.0;
    const double r_bar = ok && c.r_defined ? c.r_bar : 0.0;
    const double e = ok && c.ppt_evaluated ? c.e : 0.0;
    os << format_real(c.theta) << ',' << format_real(c.r) << ',' << format_real(p) << ',' << format_real(r_bar)
       << ',' << format_real(e) << ',' << c.n_significant_negatives << ',' << c.status(requested) << '\n';
  }
}

inline nlohmann::json config_json(const RunConfig& c) {
  return {{"n_bar", c.n_bar},
          {"n_f", c.n_f ? nlohmann::json(*c.n_f) : nlohmann::json("auto")},
          {"atom", describe(c.atom)},
          {"t_max", c.t_max},
          {"dt", c.dt},
          {"eps", c.eps},
          {"artifact_threshold", c.artifact_threshold},
          {"diagnostics", describe(c.diagnostics)},
          {"out", c.output_path},
          {"grid", std::to_string(c.grid_theta) + "x" + std::to_string(c.grid_r)},
          {"r_min", c.r_min},
          {"r_max", c.r_max},
          {"theta_min", c.theta_min},
          {"theta_max", c.theta_max},
          {"workers", c.workers}};
}

inline nlohmann::json fixed_point_json(double n_bar) {
  const BlochParams p = fixed_point(n_bar);
  const double p_g = (n_bar + 1.0) / (2.0 * n_bar + 1.0);
  const double p_e = n_bar / (2.0 * n_bar + 1.0);
  return {{"r", p.r}, {"theta", p.theta}, {"P_e", p_e}, {"P_g", p_g}};
}

}  // namespace jcm::io
