// swdwell: command-line front end for scenario files.
//
//   swdwell run --scenario examples1.scenario --out results
//   swdwell dwell --scenario example1.scenario --eps 0.1
//
// Every subcommand reads one scenario, restricts it to the matching analyses and writes
// its reports plus manifest.json into --out. Exit codes: 0 all checks pass, 2 a
// verification failed, 3 input error, 4 numeric failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "swd/scenario.hpp"

namespace {

struct Options {
  std::string scenario;
  std::string out = "swdwell_out";
  std::optional<double> step;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
};

enum class Command { Run, Dwell, Simulate, Verify, Certify, Triangle, PlotData };

int exit_code_for(swd::ErrorKind kind) {
  return kind == swd::ErrorKind::NonfiniteState ? swd::kExitNumericFailure
                                                : swd::kExitInputError;
}

void restrict_analyses(swd::Scenario& sc, Command cmd) {
  swd::AnalysisFlags& f = sc.analyses;
  const swd::AnalysisFlags requested = f;
  f = {};
  switch (cmd) {
    case Command::Run:
      f = requested;
      break;
    case Command::Dwell:
      f.dwell_table = true;
      break;
    case Command::Simulate:
      f.simulate = true;
      break;
    case Command::Verify:
      f.trapping = requested.trapping;
      f.w_monitor = requested.w_monitor;
      f.convergence = requested.convergence;
      if (!f.trapping && !f.w_monitor && !f.convergence) f.trapping = true;
      break;
    case Command::Certify:
      f.certify = true;
      break;
    case Command::Triangle:
      f.triangle = true;
      break;
    case Command::PlotData:
      f.plot_data = true;
      break;
  }
}

int execute(const Options& opt, Command cmd) {
  try {
    swd::Scenario sc = swd::load_scenario(opt.scenario, {opt.eps, opt.step, opt.seed});
    restrict_analyses(sc, cmd);
    if (cmd == Command::Triangle && !sc.triangle_modes) {
      throw swd::Error(swd::ErrorKind::ValidationError,
                       "analysis.triangle_modes: required by the triangle command");
    }
    if (sc.analyses.needs_trajectories() && sc.signals.empty()) {
      throw swd::Error(swd::ErrorKind::ValidationError, "signal: no signal to simulate");
    }
    const swd::RunResult result = swd::run_scenario(sc, opt.out, &std::cout);
    std::cout << "wrote " << result.files.size() << " files and manifest.json to " << opt.out
              << '\n';
    for (const auto& f : result.failures) std::cerr << "verification failed: " << f << '\n';
    return result.exit_status;
  } catch (const swd::Error& e) {
    std::cerr << "swdwell: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "swdwell: IoError: " << e.what() << '\n';
    return swd::kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dwell times, switched simulation and verification for scenario files"};
  app.require_subcommand(1);
  Options opt;
  std::optional<Command> chosen;

  auto add = [&](const std::string& name, const std::string& help, Command cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--step", opt.step, "RK4 step, overrides [numeric] step")
        ->check(CLI::PositiveNumber);
    sub->add_option("--eps", opt.eps, "trapping level, overrides [analysis] eps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "sampling seed, overrides [numeric] seed");
    sub->callback([&chosen, cmd] { chosen = cmd; });
  };
  add("run", "run every analysis requested by the scenario", Command::Run);
  add("dwell", "pairwise dwell table, mu(eps) and T_glob", Command::Dwell);
  add("simulate", "write one CSV per trajectory", Command::Simulate);
  add("verify", "trapping, W-monitor and convergence checks", Command::Verify);
  add("certify", "sampled Lyapunov certificate check", Command::Certify);
  add("triangle", "direct versus detour travel time", Command::Triangle);
  add("plot-data", "trajectory, switch point and region polylines (2-D)", Command::PlotData);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return swd::kExitInputError;
  }
  return execute(opt, *chosen);
}
