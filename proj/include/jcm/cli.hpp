#pragma once

// The `jcm` command line: evolve, sweep, fixed-point and selfcheck.
// Exit codes: 0 success, 1 selfcheck failure, 2 config error,
// 3 numerical validation failure.

#include <chrono>
#include <cstddef>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jcm/entanglement.hpp"
#include "jcm/entropy.hpp"
#include "jcm/error.hpp"
#include "jcm/io.hpp"
#include "jcm/selfcheck.hpp"
#include "jcm/states.hpp"
#include "jcm/sweep.hpp"
#include "jcm/trajectory.hpp"

namespace jcm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSelfcheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct EvolveSummary {
  std::size_t n_f = 0;
  std::size_t samples = 0;
  std::optional<double> p;
  std::optional<double> r_bar;
  std::optional<double> e;
};

struct SweepSummary {
  std::size_t n_f = 0;
  std::size_t cells = 0;
  std::size_t failed_cells = 0;
};

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  if (path.empty()) throw io::ConfigError("out", "an output path is required");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io::ConfigError("out", "cannot open '" + path + "' for writing");
  return os;
}

inline void write_sidecar(const io::RunConfig& config, const std::string& command, std::size_t n_f,
                          double seconds, nlohmann::json extra) {
  nlohmann::json meta = {{"command", command},
                         {"config", io::config_json(config)},
                         {"n_f", n_f},
                         {"n_f_mode", config.n_f ? "fixed" : "auto"},
                         {"tail_mass", thermal_field(config.n_bar, static_cast<long long>(n_f)).tail_mass()},
                         {"wall_time_s", seconds},
                         {"workers", config.workers}};
  meta.update(extra);
  std::ofstream os(config.output_path + ".meta.json", std::ios::binary | std::ios::trunc);
  if (!os) throw io::ConfigError("out", "cannot write sidecar next to '" + config.output_path + "'");
  os << meta.dump(2) << '\n';
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
std::optional<double> unless_skipped(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllStepsSkipped) throw;
    return std::nullopt;
  }
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return io::format_real(*v);
  return *v;
}

}  // namespace detail

inline EvolveSummary cmd_evolve(const io::RunConfig& config) {
  io::validate(config);
  const auto start = std::chrono::steady_clock::now();
  EvolveSummary summary;
  summary.n_f = io::resolve_n_f(config);
  const DensityMatrix rho0 =
      product_state(config.atom.state(), thermal_field(config.n_bar, static_cast<long long>(summary.n_f)));
  const auto t_grid = uniform_time_grid(config.t_max, config.dt);
  TrajectoryOptions options;
  options.ppt = config.diagnostics.ppt;
  options.artifact_threshold = config.artifact_threshold;
  std::ofstream os = detail::open_output(config.output_path);
  const auto records = trajectory(rho0, t_grid, options);
  summary.samples = records.size();
  io::write_trajectory_csv(os, records);
  os.close();
  if (!os) throw io::ConfigError("out", "failed writing '" + config.output_path + "'");

  const EntropySeries series = to_entropy_series(records);
  if (config.diagnostics.exchange)
    summary.p = detail::unless_skipped([&] { return exchange_parameter(series, config.eps).p; });
  if (config.diagnostics.mutual)
    summary.r_bar = detail::unless_skipped([&] { return r_parameter(series, config.eps).r_bar; });
  if (config.diagnostics.ppt) {
    std::vector<PptReport> reports;
    for (const auto& r : records) reports.push_back(*r.ppt);
    summary.e = e_measure(reports).value;
  }
  detail::write_sidecar(config, "evolve", summary.n_f, detail::seconds_since(start),
                        {{"samples", summary.samples},
                         {"P", detail::optional_json(summary.p)},
                         {"R_bar", detail::optional_json(summary.r_bar)},
                         {"E", detail::optional_json(summary.e)}});
  return summary;
}

inline SweepSummary cmd_sweep(const io::RunConfig& config) {
  io::validate(config);
  const auto start = std::chrono::steady_clock::now();
  SweepSummary summary;
  summary.n_f = io::resolve_n_f(config);
  const SweepGrid grid = io::sweep_grid(config, summary.n_f);
  std::ofstream os = detail::open_output(config.output_path);
  const auto cells = run_sweep(grid, config.diagnostics, {config.workers, config.eps, config.artifact_threshold});
  io::write_sweep_csv(os, cells, config.diagnostics);
  os.close();
  if (!os) throw io::ConfigError("out", "failed writing '" + config.output_path + "'");
  summary.cells = cells.size();
  for (const auto& c : cells) summary.failed_cells += c.error.empty() ? 0 : 1;
  detail::write_sidecar(config, "sweep", summary.n_f, detail::seconds_since(start),
                        {{"cells", summary.cells}, {"failed_cells", summary.failed_cells}});
  return summary;
}

inline nlohmann::json cmd_fixed_point(double n_bar) {
  if (!(n_bar > 0.0) || !std::isfinite(n_bar)) throw io::ConfigError("n-bar", "fixed point needs n_bar > 0");
  return io::fixed_point_json(n_bar);
}

inline int cmd_selfcheck(std::ostream& out, const SelfcheckFixture& fixture = {}) {
  const auto results = run_selfcheck(fixture);
  std::size_t failed = 0;
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %s  residual=%.3e  tol=%.1e", r.name.c_str(), r.passed() ? "PASS" : "FAIL",
                  r.residual, r.tolerance);
    out << line;
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << '\n';
    failed += r.passed() ? 0 : 1;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitSelfcheckFailed;
}

// Maps a failure to its exit code: bad input is a config error, anything
// the numerics reject is a validation failure.
inline int report_failure(std::exception_ptr failure, std::ostream& err) {
  try {
    std::rethrow_exception(failure);
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidParameter) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    err << "numerical failure (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

// Parses argv and dispatches. Run options live on the top-level app and
// subcommands fall through to it, so a flat config file can set any of them.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const SelfcheckFixture& fixture = {}) {
  CLI::App app{"Entropy exchange and entanglement in the resonant Jaynes-Cummings model", "jcm"};
  app.set_config("--config", "", "flat key = value file; keys mirror flag names, flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  io::RunConfig config;
  std::string n_f_text = "auto", atom_text = "ground", diagnostics_text = "exchange,mutual,ppt", grid_text;
  app.add_option("--n-bar", config.n_bar, "mean thermal photon number")->capture_default_str();
  app.add_option("--n-f", n_f_text, "highest explicit Fock level, or 'auto'")->capture_default_str();
  app.add_option("--atom", atom_text, "ground | excited | r=..,theta=..,phi=..")->capture_default_str();
  app.add_option("--t-max", config.t_max, "end of the lambda*t grid")->capture_default_str();
  app.add_option("--dt", config.dt, "lambda*t step")->capture_default_str();
  app.add_option("--eps", config.eps, "denominator floor for P and R")->capture_default_str();
  app.add_option("--artifact-threshold", config.artifact_threshold, "truncation artifact bound")
      ->capture_default_str();
  app.add_option("--diagnostics", diagnostics_text, "subset of exchange,mutual,ppt")->capture_default_str();
  app.add_option("--grid", grid_text, "sweep grid NxM (theta x r), default 51x51");
  app.add_option("--r-min", config.r_min, "smallest sweep radius")->capture_default_str();
  app.add_option("--r-max", config.r_max, "largest sweep radius")->capture_default_str();
  app.add_option("--theta-min", config.theta_min, "first sweep polar angle")->capture_default_str();
  app.add_option("--theta-max", config.theta_max, "last sweep polar angle")->capture_default_str();
  app.add_option("--workers", config.workers, "sweep worker threads")->capture_default_str();
  app.add_option("--out", config.output_path, "output CSV path (data commands)");

  auto* evolve = app.add_subcommand("evolve", "trajectory CSV for one initial atom state")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "P, R_bar and E over a (theta, r) grid")->fallthrough();
  auto* fixed = app.add_subcommand("fixed-point", "Bloch parameters of the stationary atom state")->fallthrough();
  auto* check = app.add_subcommand("selfcheck", "run the built-in invariant suite")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*check) return cmd_selfcheck(out, fixture);
    if (*fixed) {
      out << cmd_fixed_point(config.n_bar).dump() << '\n';
      return kExitOk;
    }
    config.n_f = io::parse_n_f(n_f_text);
    config.atom = io::parse_atom(atom_text);
    config.diagnostics = io::parse_diagnostics(diagnostics_text);
    if (!grid_text.empty()) std::tie(config.grid_theta, config.grid_r) = io::parse_grid(grid_text);
    if (*evolve) {
      const auto s = cmd_evolve(config);
      auto show = [](const std::optional<double>& v) { return v ? io::format_real(*v) : std::string("undefined"); };
      out << "n_f=" << s.n_f << " samples=" << s.samples << " P=" << show(s.p) << " R_bar=" << show(s.r_bar)
          << " E=" << show(s.e) << '\n';
    } else if (*sweep) {
      const auto s = cmd_sweep(config);
      out << "n_f=" << s.n_f << " cells=" << s.cells << " failed=" << s.failed_cells << '\n';
    }
    return kExitOk;
  } catch (...) {
    return report_failure(std::current_exception(), err);
  }
}

}  // namespace jcm::cli
