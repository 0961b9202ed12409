#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swd/core.hpp"
#include "swd/dwell.hpp"
#include "swd/sampling.hpp"
#include "swd/sim.hpp"

namespace swd {

struct AnalysisFlags {
  bool certify = false;
  bool dwell_table = false;
  bool simulate = false;
  bool trapping = false;
  bool w_monitor = false;
  bool convergence = false;
  bool triangle = false;
  bool tube = false;
  bool plot_data = false;

  [[nodiscard]] bool any() const {
    return certify || dwell_table || simulate || trapping || w_monitor || convergence ||
           triangle || tube || plot_data;
  }
  [[nodiscard]] bool needs_trajectories() const {
    return simulate || trapping || w_monitor || convergence || plot_data;
  }
};

struct NumericSettings {
  double step = kDefaultStep;
  std::uint64_t seed = 42;
  std::size_t samples = 10000;  // certificate samples per subsystem
  double membership_tolerance = kMembershipTolerance;
  std::size_t mu_samples = 1000000;
  std::optional<double> mu_radius;  // default 2 (max distance + beta^{-1}(eps))
};

/// One switching signal together with the initial states it is simulated from.
struct SignalSpec {
  std::string name;
  SwitchingSignal signal;
  double horizon;
  std::vector<Vec> initial_states;
  double transient = 0.0;
  bool verify = true;        // trapping outcome counts toward the exit status
  bool convergence = false;  // run the product analysis on this signal
};

struct TubeSpec {
  Label from;
  Label to;
  std::vector<double> times;
  std::size_t count = 360;
};

struct Scenario {
  std::string name;
  SwitchedSystem system;
  double eps;
  std::vector<SignalSpec> signals;
  AnalysisFlags analyses;
  std::size_t i_max = 10;
  std::vector<Transition> transitions;  // empty: taken from the signals
  std::optional<std::array<Label, 3>> triangle_modes;
  std::optional<TubeSpec> tube;
  Box certify_box;
  NumericSettings numeric;
};

/// Command-line replacements applied before anything that depends on them is derived.
struct ScenarioOverrides {
  std::optional<double> eps;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
};

/// Parses and validates a scenario document; all defaults applied, unknown keys rejected.
/// Throws Error(ParseError) with a line number or Error(ValidationError) with a key path.
[[nodiscard]] Scenario parse_scenario(std::string_view text, const ScenarioOverrides& overrides = {});
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path,
                                     const ScenarioOverrides& overrides = {});

/// Writes a signal as an explicit `[signal.<name>]` section with 17-digit switch times.
[[nodiscard]] std::string serialize_signal(const SwitchingSignal& signal, std::string_view name);

// ------------------------------------------------------------------ outputs

struct ManifestEntry {
  std::string path;  // relative to the output directory, '/' separated
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunResult {
  int exit_status = 0;
  std::vector<ManifestEntry> files;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitVerificationFailure = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitNumericFailure = 4;

/// Runs the requested analyses (certify, dwell, simulate, verify) and writes one CSV per
/// trajectory, one JSON report per analysis and manifest.json with SHA-256 hashes.
/// The exit status is nonzero iff a gating verification fails. Progress goes to `log`.
[[nodiscard]] RunResult run_scenario(const Scenario& scenario,
                                     const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// trajectory.csv, switch_points.csv and region_<label>.csv for a planar system.
std::vector<std::filesystem::path> emit_plot_data(const Trajectory& traj,
                                                  const SwitchedSystem& system, double eps,
                                                  const std::filesystem::path& out_dir);

/// `t,x1..xn,mode,V_active` with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SwitchedSystem& system);

[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

}  // namespace swd
