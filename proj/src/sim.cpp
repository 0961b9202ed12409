#include "swd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "swd/dwell.hpp"

namespace swd {

namespace detail {

Vec rk4_increment(const Subsystem& sub, const Vec& x, double h) {
  const Vec k1 = sub.field(x);
  const Vec k2 = sub.field(x + 0.5 * h * k1);
  const Vec k3 = sub.field(x + 0.5 * h * k2);
  const Vec k4 = sub.field(x + h * k3);
  return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec advance(const Subsystem& sub, Vec x, double a, double b, double h,
            const std::function<void(double, const Vec&)>& on_sample) {
  if (!(b > a)) return x;
  // The (1 - 1e-12) factor keeps a representation-error sliver from becoming its own step.
  const auto steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil((b - a) / h * (1.0 - 1e-12))));
  double t = a;
  Vec carry = Vec::Zero(x.size());
  for (std::size_t k = 1; k <= steps; ++k) {
    const double next = k == steps ? b : a + static_cast<double>(k) * h;
    const Vec y = rk4_increment(sub, x, next - t) - carry;
    const Vec sum = x + y;
    carry = (sum - x) - y;
    x = sum;
    if (!x.allFinite()) {
      throw Error(ErrorKind::NonfiniteState,
                  "state of '" + sub.label() + "' became non-finite at t=" + std::to_string(next));
    }
    t = next;
    if (on_sample) on_sample(t, x);
  }
  return x;
}

}  // namespace detail

const Vec& Trajectory::state_at(double t) const {
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const TrajectorySample& s, double v) { return s.t < v; });
  if (it == samples.end() || it->t != t) {
    throw Error(ErrorKind::InvalidArgument, "time is not a trajectory sample");
  }
  return it->x;
}

namespace {

void require_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidArgument, "step must be positive");
  }
}

void require_state(const Vec& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "initial state has wrong dimension");
  }
  if (!x.allFinite()) throw Error(ErrorKind::InvalidArgument, "initial state is not finite");
}

/// Throws SignalMismatch unless the trajectory's switch events are exactly the signal's.
void check_events(const Trajectory& traj, const SwitchingSignal& signal) {
  if (traj.samples.empty()) throw Error(ErrorKind::SignalMismatch, "empty trajectory");
  if (traj.samples.front().t != signal.t0()) {
    throw Error(ErrorKind::SignalMismatch, "trajectory does not start at the signal's t0");
  }
  const auto expected = signal.switches_until(traj.samples.back().t);
  if (expected.size() != traj.switch_events.size()) {
    throw Error(ErrorKind::SignalMismatch, "switch count differs from the signal");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& e = traj.switch_events[i];
    if (e.t != expected[i].time || e.prev_mode != expected[i].from ||
        e.next_mode != expected[i].to) {
      throw Error(ErrorKind::SignalMismatch,
                  "switch " + std::to_string(i + 1) + " differs from the signal");
    }
  }
}

}  // namespace

Trajectory integrate(const Subsystem& sub, const Vec& x0, double t0, double t1, double step) {
  require_step(step);
  require_state(x0, sub.dimension());
  if (!(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "t1 must not precede t0");
  Trajectory traj;
  traj.step = step;
  traj.samples.push_back({t0, x0, sub.label()});
  (void)detail::advance(sub, x0, t0, t1, step, [&](double t, const Vec& x) {
    traj.samples.push_back({t, x, sub.label()});
  });
  return traj;
}

Trajectory simulate_switched(const SwitchedSystem& system, const SwitchingSignal& signal,
                             const Vec& x0, double horizon, double step) {
  require_step(step);
  require_state(x0, system.dimension());
  signal.check_labels(system);
  if (!(horizon > signal.t0())) throw Error(ErrorKind::InvalidArgument, "horizon must exceed t0");

  const auto switches = signal.switches_until(horizon);
  Trajectory traj;
  traj.step = step;
  traj.samples.push_back({signal.t0(), x0, signal.mode_at(signal.t0())});

  Vec x = x0;
  double a = signal.t0();
  auto run_to = [&](double b) {
    const Subsystem& driver = system.at(signal.driving_mode(a));
    x = detail::advance(driver, x, a, b, step, [&](double t, const Vec& state) {
      traj.samples.push_back({t, state, signal.mode_at(t)});
    });
    a = b;
  };
  for (const auto& sw : switches) {
    run_to(sw.time);
    traj.switch_events.push_back({sw.index, sw.time, sw.from, sw.to, x});
  }
  if (horizon > a) run_to(horizon);
  return traj;
}

std::vector<Trajectory> simulate_batch(const SwitchedSystem& system, const SwitchingSignal& signal,
                                       std::span<const Vec> initial_states, double horizon,
                                       double step) {
  std::vector<Trajectory> out(initial_states.size());
  detail::LoopErrors errors(initial_states.size());
  const auto n = static_cast<std::ptrdiff_t>(initial_states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx] = simulate_switched(system, signal, initial_states[idx], horizon, step);
    } catch (...) {
      errors.capture(idx);
    }
  }
  errors.rethrow();
  return out;
}

TrappingReport verify_trapping(const Trajectory& traj, const SwitchedSystem& system,
                               const SwitchingSignal& signal, double eps,
                               const TrappingOptions& options) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "eps must be positive");
  check_events(traj, signal);
  TrappingReport report;
  report.eps = eps;
  {
    const auto& first = traj.samples.front();
    const auto m = membership(system.at(signal.initial_mode()), eps, first.x, options.tolerance);
    report.initial = {0, first.t, signal.initial_mode(), m.value, m.member, m.strict};
  }
  for (const auto& e : traj.switch_events) {
    if (e.t - signal.t0() < options.transient) continue;
    const auto m = membership(system.at(e.next_mode), eps, e.x, options.tolerance);
    report.records.push_back({e.index, e.t, e.next_mode, m.value, m.member, m.strict});
    report.overall_pass = report.overall_pass && m.member;
  }
  return report;
}

std::vector<IntervalVerdict> w_monitor(const Trajectory& traj, const SwitchedSystem& system,
                                       const SwitchingSignal& signal) {
  check_events(traj, signal);
  // Interval boundaries: t0, every switch, and the final sample.
  std::vector<double> bounds{traj.samples.front().t};
  for (const auto& e : traj.switch_events) bounds.push_back(e.t);
  if (traj.samples.back().t > bounds.back()) bounds.push_back(traj.samples.back().t);

  std::vector<IntervalVerdict> out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double a = bounds[i];
    const double b = bounds[i + 1];
    const Label& mode = signal.driving_mode(a);
    const Subsystem& sub = system.at(mode);
    const double k = sub.decay_rate();
    IntervalVerdict verdict{i, a, b, mode, true, 0.0};
    while (traj.samples[cursor].t < a) ++cursor;
    // W is rescaled by e^{-k a} on each interval; monotonicity is unaffected.
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = cursor; j < traj.samples.size() && traj.samples[j].t <= b; ++j) {
      const auto& s = traj.samples[j];
      const double w = std::exp(k * (s.t - a)) * sub.lyapunov(s.x);
      if (!std::isnan(prev)) {
        const double increase = (w - prev) / std::max(prev, 1e-300);
        verdict.max_relative_increase = std::max(verdict.max_relative_increase, increase);
        // 1e-15 absolute floor: round-off around V = 0
        if (w > prev * (1.0 + kMonotoneTolerance) + 1e-15) verdict.nonincreasing = false;
      }
      prev = w;
    }
    out.push_back(std::move(verdict));
  }
  return out;
}

ConvergenceReport convergence_product(const SwitchedSystem& system, const SwitchingSignal& signal,
                                      const Trajectory& traj, double eps, std::size_t i_max) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "eps must be positive");
  if (i_max == 0) throw Error(ErrorKind::InvalidArgument, "i_max must be >= 1");
  check_events(traj, signal);
  if (traj.switch_events.size() < i_max) {
    throw Error(ErrorKind::InsufficientSwitches,
                "trajectory has " + std::to_string(traj.switch_events.size()) +
                    " switches, need " + std::to_string(i_max));
  }
  ConvergenceReport report;
  report.eps = eps;
  report.intervals = w_monitor(traj, system, signal);

  bool closed_form = true;
  for (const auto& sub : system.subsystems()) closed_form = closed_form && sub.is_identity_quadratic();
  report.sampled_mu = !closed_form;

  double log_product = 0.0;
  double prev_time = signal.t0();
  for (std::size_t i = 0; i < i_max; ++i) {
    const double t_next = traj.switch_events[i].t;
    const Label& from = signal.driving_mode(prev_time);
    const Label& to = signal.driving_mode(t_next);
    const Subsystem& a = system.at(from);
    const Subsystem& b = system.at(to);
    double mu = 1.0;
    if (&a != &b) {
      if (closed_form) {
        mu = pair_mu_closed_form(eps, b, a);
      } else {
        const double reach = (a.equilibrium() - b.equilibrium()).norm() + a.beta().inverse(eps);
        mu = std::max(1.0, pair_mu_sampled(eps, b, a, MuSampled{100000, 10.0 * reach, 42}));
      }
    }
    log_product += std::log(mu) - a.decay_rate() * (t_next - prev_time);
    const double log_mu_tilde = std::log(mu) + (b.decay_rate() - a.decay_rate()) * t_next;
    report.terms.push_back({i, from, to, mu, log_mu_tilde, log_product});
    prev_time = t_next;
  }

  report.products_decreasing = true;
  for (std::size_t i = 1; i < report.terms.size(); ++i) {
    if (!(report.terms[i].log_product < report.terms[i - 1].log_product)) {
      report.products_decreasing = false;
    }
  }
  const double first = report.terms.front().log_product;
  report.certified = std::any_of(report.terms.begin(), report.terms.end(), [&](const auto& t) {
    return t.log_product < first + std::log(1e-6);
  });

  for (std::size_t i = 0; i < i_max; ++i) {
    const auto& e = traj.switch_events[i];
    if (in_region(system.at(e.next_mode), eps, e.x)) {
      report.entry_index = e.index;
      break;
    }
  }
  return report;
}

std::vector<TubeSlice> tube_sample(const SwitchedSystem& system, const Label& from,
                                   const Label& to, double eps, std::span<const double> t_grid,
                                   std::size_t boundary_count, double step) {
  require_step(step);
  const Subsystem& source = system.at(from);
  const Subsystem& flow = system.at(to);
  if (boundary_count < 3) throw Error(ErrorKind::InvalidArgument, "boundary_count must be >= 3");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "t_grid must be nonnegative and increasing");
    }
  }
  const auto boundary = region_boundary_points(source, eps, boundary_count);

  std::vector<TubeSlice> slices;
  for (double t : t_grid) slices.push_back({t, std::vector<Vec>(boundary.size())});
  detail::LoopErrors errors(boundary.size());
  const auto n = static_cast<std::ptrdiff_t>(boundary.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    const auto idx = static_cast<std::size_t>(p);
    try {
      Vec x = boundary[idx];
      double t = 0.0;
      for (auto& slice : slices) {
        x = detail::advance(flow, x, t, slice.t, step);
        t = slice.t;
        slice.points[idx] = x;
      }
    } catch (...) {
      errors.capture(idx);
    }
  }
  errors.rethrow();
  return slices;
}

}  // namespace swd
