#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "swd/config_doc.hpp"
#include "swd/report_json.hpp"
#include "swd/scenario.hpp"

namespace swd {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error(ErrorKind::IoError, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

namespace {

void write_text(const fs::path& path, std::string_view content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double x) { return config::format_precise(x); }

std::string run_name(const std::string& signal, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", k);
  return signal + "_" + buf;
}

/// Collects written files; the manifest hashes them from disk at the end.
class OutputTree {
 public:
  explicit OutputTree(fs::path root) : root_(std::move(root)) {}

  [[nodiscard]] const fs::path& root() const { return root_; }

  void write(const std::string& rel, std::string_view content) {
    write_text(root_ / rel, content);
    record(root_ / rel);
  }

  void record(const fs::path& absolute) {
    paths_.insert(fs::relative(absolute, root_).generic_string());
  }

  [[nodiscard]] std::vector<ManifestEntry> manifest() const {
    std::vector<ManifestEntry> out;
    for (const auto& rel : paths_) {
      const fs::path p = root_ / rel;
      out.push_back({rel, sha256_file(p), fs::file_size(p)});
    }
    return out;
  }

 private:
  fs::path root_;
  std::set<std::string> paths_;
};

struct Context {
  const Scenario& sc;
  OutputTree& tree;
  RunResult& result;
  std::ostream* log;

  void say(const std::string& line) const {
    if (log) *log << line << '\n';
  }
  void fail(const std::string& what) const {
    result.failures.push_back(what);
    say("FAIL " + what);
  }
  void note(const std::string& what) const {
    result.notes.push_back(what);
    say("note: " + what);
  }
};

void run_certificates(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  Json reports = Json::array();
  for (const auto& sub : sc.system.subsystems()) {
    const auto report =
        check_certificate(sub, sc.certify_box, sc.numeric.samples, sc.numeric.seed);
    ctx.say("certificate " + sub.label() + ": " + (report.passed() ? "passed" : "VIOLATED") +
            " on " + std::to_string(report.samples_tested) + " samples (" +
            std::to_string(report.sandwich_violations.size()) + " sandwich, " +
            std::to_string(report.decay_violations.size()) + " decay violations)");
    if (!report.passed()) {
      const std::string msg = "certificate " + sub.label() + " violated on samples";
      if (sc.analyses.certify) {
        ctx.fail(msg);
      } else {
        ctx.note(msg);
      }
    }
    reports.push_back(to_json(report));
  }
  if (sc.analyses.certify) {
    Json out = {{"eps", sc.eps},
                {"samples", sc.numeric.samples},
                {"seed", sc.numeric.seed},
                {"box", {{"lower", to_json(sc.certify_box.lower)},
                         {"upper", to_json(sc.certify_box.upper)}}},
                {"reports", std::move(reports)}};
    ctx.tree.write("certificates.json", dump(out));
  }
}

std::vector<Transition> scenario_transitions(const Scenario& sc) {
  if (!sc.transitions.empty()) return sc.transitions;
  std::vector<Transition> out;
  for (const auto& s : sc.signals) {
    for (auto& t : signal_transitions(s.signal)) {
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
    }
  }
  return out;
}

double default_mu_radius(const Scenario& sc) {
  double reach = 0.0;
  double spread = 0.0;
  const auto subs = sc.system.subsystems();
  for (const auto& a : subs) {
    reach = std::max(reach, a.beta().inverse(sc.eps));
    for (const auto& b : subs) spread = std::max(spread, (a.equilibrium() - b.equilibrium()).norm());
  }
  return 2.0 * (spread + reach);
}

void run_dwell(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const auto transitions = scenario_transitions(sc);
  Json out = Json::object();
  if (!transitions.empty()) {
    const DwellTable table = local_dwell(sc.eps, sc.system, transitions);
    out = to_json(table);
    ctx.say("t_loc = " + config::format_precise(table.t_loc));
  } else {
    out = {{"eps", sc.eps}, {"t_loc", nullptr}, {"entries", Json::array()}};
  }

  const auto subs = sc.system.subsystems();
  double k_min = subs.front().decay_rate();
  bool closed_available = true;
  for (const auto& s : subs) {
    k_min = std::min(k_min, s.decay_rate());
    closed_available = closed_available && s.is_identity_quadratic();
  }
  const MuSampled sampled{sc.numeric.mu_samples, sc.numeric.mu_radius.value_or(default_mu_radius(sc)),
                          sc.numeric.seed};
  const double mu_sampled = mu_bound(sc.eps, sc.system, sampled);
  const double mu_closed = closed_available ? mu_bound(sc.eps, sc.system, MuClosedForm{}) : 0.0;
  const double mu = closed_available ? mu_closed : mu_sampled;
  out["mu_closed_form"] = closed_available ? Json(mu_closed) : Json(nullptr);
  out["mu_sampled"] = mu_sampled;
  out["mu_sampled_settings"] = {
      {"samples", sampled.n_samples}, {"radius", sampled.radius}, {"seed", sampled.seed}};
  if (closed_available) {
    out["mu_relative_difference"] = std::abs(mu_sampled - mu_closed) / mu_closed;
  }
  out["k_min"] = k_min;
  if (mu > 1.0) {
    const double t_glob = global_dwell(mu, k_min);
    out["t_glob"] = t_glob;
    out["t_dwell"] = transitions.empty() ? t_glob : std::max(t_glob, out["t_loc"].get<double>());
    ctx.say("mu = " + config::format_precise(mu) + ", t_glob = " + config::format_precise(t_glob));
  } else {
    out["t_glob"] = nullptr;
    out["t_dwell"] = out["t_loc"];
  }
  ctx.tree.write("dwell_table.json", dump(out));
}

void run_triangle(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const auto& modes = *sc.triangle_modes;
  const Subsystem& u0 = sc.system.at(modes[0]);
  const Subsystem& v = sc.system.at(modes[1]);
  const Subsystem& u1 = sc.system.at(modes[2]);
  TriangleAnalysis analysis = triangle_gap(sc.eps, u0, v, u1);
  const double d = std::max(u0.equilibrium().norm(), u1.equilibrium().norm());
  const double r = std::min((u0.equilibrium() - v.equilibrium()).norm(),
                            (v.equilibrium() - u1.equilibrium()).norm());
  try {
    analysis.eps0 = epsilon0_search(d, r, u0.alpha(), u0.beta(), u0.decay_rate());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyConfiguration && e.kind() != ErrorKind::NoThreshold &&
        e.kind() != ErrorKind::InvalidArgument) {
      throw;
    }
    ctx.note(std::string("triangle eps0 unavailable: ") + e.what());
  }
  Json out = to_json(analysis);
  out["modes"] = {modes[0], modes[1], modes[2]};
  out["d"] = d;
  out["r"] = r;
  ctx.tree.write("triangle.json", dump(out));
  ctx.say("triangle gap = " + config::format_precise(analysis.gap));
}

void run_tube(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  const TubeSpec& spec = *sc.tube;
  const auto slices = tube_sample(sc.system, spec.from, spec.to, sc.eps, spec.times, spec.count,
                                  sc.numeric.step);
  const Subsystem& target = sc.system.at(spec.to);
  const double dwell = pairwise_dwell(sc.eps, sc.system.at(spec.from), target);

  std::ostringstream csv;
  csv << "t,point";
  for (std::size_t i = 1; i <= sc.system.dimension(); ++i) csv << ",x" << i;
  csv << ",V_to\n";
  Json summary = Json::array();
  bool arrived = true;
  for (const auto& slice : slices) {
    double max_v = 0.0;
    for (std::size_t j = 0; j < slice.points.size(); ++j) {
      const double v = v_eval(target, slice.points[j]);
      max_v = std::max(max_v, v);
      csv << csv_number(slice.t) << ',' << j;
      for (Eigen::Index c = 0; c < slice.points[j].size(); ++c) {
        csv << ',' << csv_number(slice.points[j][c]);
      }
      csv << ',' << csv_number(v) << '\n';
    }
    const bool inside = max_v <= sc.eps + sc.numeric.membership_tolerance;
    if (slice.t >= dwell && !inside) arrived = false;
    summary.push_back({{"t", slice.t}, {"max_v_to", max_v}, {"inside_target", inside}});
  }
  Json out = {{"from", spec.from},     {"to", spec.to},         {"eps", sc.eps},
              {"dwell", dwell},        {"count", spec.count},   {"arrived", arrived},
              {"slices", std::move(summary)}};
  ctx.tree.write("tube.json", dump(out));
  ctx.tree.write("tube.csv", csv.str());
  if (!arrived) ctx.fail("tube " + spec.from + "->" + spec.to + " leaves N_" + spec.to);
}

std::string trajectory_csv(const Trajectory& traj, const SwitchedSystem& system) {
  std::ostringstream out;
  write_trajectory_csv(out, traj, system);
  return out.str();
}

void run_signal(const Context& ctx, const SignalSpec& spec) {
  const Scenario& sc = ctx.sc;
  const auto& flags = sc.analyses;
  const auto trajectories = simulate_batch(sc.system, spec.signal, spec.initial_states,
                                           spec.horizon, sc.numeric.step);
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    ctx.tree.write("trajectories/" + run_name(spec.name, k) + ".csv",
                   trajectory_csv(trajectories[k], sc.system));
  }
  ctx.say("signal " + spec.name + ": " + std::to_string(trajectories.size()) +
          " trajectories to t = " + config::format_precise(spec.horizon));

  if (flags.trapping) {
    const auto violations = validate_dwell(spec.signal, [&](const Label& a, const Label& b) {
      return pairwise_dwell(sc.eps, sc.system.at(a), sc.system.at(b));
    });
    Json dv = Json::array();
    for (const auto& v : violations) dv.push_back(to_json(v));
    if (!violations.empty()) {
      ctx.note("signal " + spec.name + " violates the pairwise dwell time at " +
               std::to_string(violations.size()) + " switch(es)");
    }
    Json runs = Json::array();
    bool all_pass = true;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
      const auto report = verify_trapping(trajectories[k], sc.system, spec.signal, sc.eps,
                                          {spec.transient, sc.numeric.membership_tolerance});
      all_pass = all_pass && report.overall_pass;
      Json r = to_json(report);
      r["run"] = run_name(spec.name, k);
      r["x0"] = to_json(spec.initial_states[k]);
      runs.push_back(std::move(r));
    }
    Json out = {{"signal", spec.name},       {"eps", sc.eps},
                {"transient", spec.transient}, {"gating", spec.verify},
                {"overall_pass", all_pass},  {"dwell_violations", std::move(dv)},
                {"runs", std::move(runs)}};
    ctx.tree.write("trapping_" + spec.name + ".json", dump(out));
    ctx.say("trapping " + spec.name + ": " + (all_pass ? "pass" : "fail") +
            (spec.verify ? "" : " (not gating)"));
    if (!all_pass && spec.verify) ctx.fail("trapping on signal " + spec.name);
  }

  if (flags.w_monitor) {
    Json runs = Json::array();
    bool all_ok = true;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
      const auto verdicts = w_monitor(trajectories[k], sc.system, spec.signal);
      Json intervals = Json::array();
      bool ok = true;
      for (const auto& v : verdicts) {
        ok = ok && v.nonincreasing;
        intervals.push_back(to_json(v));
      }
      all_ok = all_ok && ok;
      runs.push_back({{"run", run_name(spec.name, k)},
                      {"nonincreasing", ok},
                      {"intervals", std::move(intervals)}});
    }
    Json out = {{"signal", spec.name},
                {"tolerance", kMonotoneTolerance},
                {"nonincreasing", all_ok},
                {"runs", std::move(runs)}};
    ctx.tree.write("w_monitor_" + spec.name + ".json", dump(out));
    ctx.say("w_monitor " + spec.name + ": " + (all_ok ? "nonincreasing" : "INCREASE"));
    if (!all_ok) ctx.fail("W increases on signal " + spec.name);
  }

  if (flags.convergence && spec.convergence) {
    Json runs = Json::array();
    bool all_ok = true;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
      const auto report =
          convergence_product(sc.system, spec.signal, trajectories[k], sc.eps, sc.i_max);
      const bool intervals_ok = std::all_of(report.intervals.begin(), report.intervals.end(),
                                            [](const auto& v) { return v.nonincreasing; });
      const bool ok = report.products_decreasing && report.entry_index.has_value() && intervals_ok;
      all_ok = all_ok && ok;
      Json r = to_json(report);
      r["run"] = run_name(spec.name, k);
      r["x0"] = to_json(spec.initial_states[k]);
      runs.push_back(std::move(r));
    }
    Json out = {{"signal", spec.name},
                {"i_max", sc.i_max},
                {"pass", all_ok},
                {"runs", std::move(runs)}};
    ctx.tree.write("convergence_" + spec.name + ".json", dump(out));
    ctx.say("convergence " + spec.name + ": " + (all_ok ? "pass" : "fail"));
    if (!all_ok) ctx.fail("convergence on signal " + spec.name);
  }

  if (flags.plot_data) {
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
      const fs::path dir = ctx.tree.root() / "plot" / run_name(spec.name, k);
      for (const auto& p : emit_plot_data(trajectories[k], sc.system, sc.eps, dir)) {
        ctx.tree.record(p);
      }
    }
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SwitchedSystem& system) {
  out << 't';
  for (std::size_t i = 1; i <= system.dimension(); ++i) out << ",x" << i;
  out << ",mode,V_active\n";
  for (const auto& s : traj.samples) {
    out << csv_number(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << csv_number(s.x[i]);
    out << ',' << s.mode << ',' << csv_number(v_eval(system.at(s.mode), s.x)) << '\n';
  }
}

std::vector<fs::path> emit_plot_data(const Trajectory& traj, const SwitchedSystem& system,
                                     double eps, const fs::path& out_dir) {
  if (system.dimension() != 2) {
    throw Error(ErrorKind::UnsupportedDimension, "plot data needs a planar system");
  }
  std::vector<fs::path> written;
  const fs::path traj_path = out_dir / "trajectory.csv";
  write_text(traj_path, trajectory_csv(traj, system));
  written.push_back(traj_path);

  std::ostringstream sw;
  sw << "index,t,x1,x2,prev_mode,next_mode,V_next\n";
  for (const auto& e : traj.switch_events) {
    sw << e.index << ',' << csv_number(e.t) << ',' << csv_number(e.x[0]) << ','
       << csv_number(e.x[1]) << ',' << e.prev_mode << ',' << e.next_mode << ','
       << csv_number(v_eval(system.at(e.next_mode), e.x)) << '\n';
  }
  const fs::path sw_path = out_dir / "switch_points.csv";
  write_text(sw_path, sw.str());
  written.push_back(sw_path);

  for (const auto& sub : system.subsystems()) {
    const auto points = region_boundary_points(sub, eps, 360);
    std::ostringstream region;
    region << "x1,x2\n";
    for (std::size_t j = 0; j <= points.size(); ++j) {
      const Vec& p = points[j % points.size()];  // closed polyline
      region << csv_number(p[0]) << ',' << csv_number(p[1]) << '\n';
    }
    const fs::path region_path = out_dir / ("region_" + sub.label() + ".csv");
    write_text(region_path, region.str());
    written.push_back(region_path);
  }
  return written;
}

RunResult run_scenario(const Scenario& scenario, const fs::path& out_dir, std::ostream* log) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + out_dir.string());
  }
  OutputTree tree(out_dir);
  RunResult result;
  const Context ctx{scenario, tree, result, log};

  std::string stage;
  try {
    stage = "certify";
    run_certificates(ctx);
    if (scenario.analyses.dwell_table) {
      stage = "dwell";
      run_dwell(ctx);
    }
    if (scenario.analyses.triangle) {
      stage = "triangle";
      run_triangle(ctx);
    }
    if (scenario.analyses.tube) {
      stage = "tube";
      run_tube(ctx);
    }
    if (scenario.analyses.needs_trajectories()) {
      for (const auto& spec : scenario.signals) {
        stage = "signal " + spec.name;
        run_signal(ctx, spec);
      }
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "scenario '" + scenario.name + "', " + stage + ": " + e.what());
  }

  result.files = tree.manifest();
  result.exit_status = result.failures.empty() ? kExitSuccess : kExitVerificationFailure;
  Json files = Json::array();
  for (const auto& f : result.files) {
    files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  Json manifest = {{"scenario", scenario.name},
                   {"exit_status", result.exit_status},
                   {"failures", result.failures},
                   {"notes", result.notes},
                   {"files", std::move(files)}};
  write_text(out_dir / "manifest.json", dump(manifest));
  return result;
}

}  // namespace swd
