#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swd/core.hpp"
#include "swd/lyapunov.hpp"

namespace swd {

inline constexpr double kDefaultStep = 1e-3;
/// Relative slack allowed between consecutive W samples.
inline constexpr double kMonotoneTolerance = 1e-7;

struct TrajectorySample {
  double t;
  Vec x;
  Label mode;  // signal label u(t), right-continuous
};

struct SwitchEvent {
  std::size_t index;  // i >= 1
  double t;
  Label prev_mode;
  Label next_mode;
  Vec x;
};

/// Time-stamped states. Every switch instant is itself a sample.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<SwitchEvent> switch_events;
  double step = kDefaultStep;

  [[nodiscard]] const Vec& final_state() const { return samples.back().x; }
  /// State at an exact sample time; throws InvalidArgument when t is not a sample.
  [[nodiscard]] const Vec& state_at(double t) const;
};

/// Fixed-step classical RK4 on [t0, t1]; the last step is shortened to land on t1.
[[nodiscard]] Trajectory integrate(const Subsystem& sub, const Vec& x0, double t0, double t1,
                                   double step = kDefaultStep);

/// Integrates every inter-switch interval of the signal up to `horizon`, chaining the state
/// across switches. The interval [t_{i-1}, t_i) is driven by the label entered at t_i.
[[nodiscard]] Trajectory simulate_switched(const SwitchedSystem& system,
                                           const SwitchingSignal& signal, const Vec& x0,
                                           double horizon, double step = kDefaultStep);

/// simulate_switched for many initial states, in parallel; output order follows input order.
[[nodiscard]] std::vector<Trajectory> simulate_batch(const SwitchedSystem& system,
                                                     const SwitchingSignal& signal,
                                                     std::span<const Vec> initial_states,
                                                     double horizon, double step = kDefaultStep);

struct TrappingRecord {
  std::size_t index;  // switch index i
  double t;
  Label mode;         // u_i = u(t_i + 0)
  double value;       // V_{u_i}(x(t_i))
  bool member;
  bool strict_member;
};

struct TrappingReport {
  double eps = 0.0;
  TrappingRecord initial{};  // x(t0) against N_{u_0}: the hypothesis, not part of the verdict
  std::vector<TrappingRecord> records;
  bool overall_pass = true;
};

struct TrappingOptions {
  double transient = 0.0;  // switches with t_i - t0 < transient are not reported
  double tolerance = kMembershipTolerance;
};

/// Checks x(t_i) in N^eps_{u_i} at every switch instant of the trajectory.
[[nodiscard]] TrappingReport verify_trapping(const Trajectory& traj, const SwitchedSystem& system,
                                             const SwitchingSignal& signal, double eps,
                                             const TrappingOptions& options = {});

struct IntervalVerdict {
  std::size_t index;  // interval [t_index, t_{index+1})
  double t_start;
  double t_end;
  Label mode;  // driving subsystem
  bool nonincreasing;
  double max_relative_increase;
};

/// W(t) = e^{k t} V(x(t)) with k, V of the driving subsystem, checked sample-to-sample on
/// every inter-switch interval.
[[nodiscard]] std::vector<IntervalVerdict> w_monitor(const Trajectory& traj,
                                                     const SwitchedSystem& system,
                                                     const SwitchingSignal& signal);

struct ProductTerm {
  std::size_t index;      // i
  Label from;             // subsystem driving [t_i, t_{i+1})
  Label to;               // subsystem driving after t_{i+1}
  double mu;              // mu_i(eps)
  double log_mu_tilde;    // ln mu_i + (k_to - k_from) t_{i+1}
  double log_product;     // ln P_i
};

struct ConvergenceReport {
  double eps = 0.0;
  std::vector<IntervalVerdict> intervals;
  std::vector<ProductTerm> terms;
  bool products_decreasing = false;
  bool certified = false;  // P_i < 1e-6 P_0 for some i < i_max
  std::optional<std::size_t> entry_index;
  bool sampled_mu = false;  // closed form unavailable, mu estimated by sampling
};

/// Evaluates P_i = mu_0 ... mu_i exp(-sum k (t_{j+1} - t_j)) in log space for i < i_max and
/// locates the first switch where x(t_i) lies in N^eps_{u_i}. Not being certified by i_max
/// is not evidence of divergence.
[[nodiscard]] ConvergenceReport convergence_product(const SwitchedSystem& system,
                                                    const SwitchingSignal& signal,
                                                    const Trajectory& traj, double eps,
                                                    std::size_t i_max);

struct TubeSlice {
  double t;
  std::vector<Vec> points;
};

/// Sampled outer boundary of the tube L^eps_{from,to}(t): the boundary of N^eps_from carried
/// by the flow of `to` to each time of t_grid. Boundary points are propagated in parallel.
[[nodiscard]] std::vector<TubeSlice> tube_sample(const SwitchedSystem& system, const Label& from,
                                                 const Label& to, double eps,
                                                 std::span<const double> t_grid,
                                                 std::size_t boundary_count,
                                                 double step = kDefaultStep);

}  // namespace swd
