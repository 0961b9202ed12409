#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "swd/core.hpp"

namespace swd {

/// Time needed to carry N^eps_from into N^eps_to under the flow of `to`:
///   -(1/k_to) ln( eps / beta_to(|x_to - x_from| + alpha_from^{-1}(eps)) ).
/// Zero when both modes share an equilibrium and certificate; never negative when alpha <= beta.
[[nodiscard]] double pairwise_dwell_raw(double eps, const Subsystem& from, const Subsystem& to);

/// pairwise_dwell_raw clamped below at zero against rounding.
[[nodiscard]] double pairwise_dwell(double eps, const Subsystem& from, const Subsystem& to);

using Transition = std::pair<Label, Label>;

struct DwellEntry {
  Label from;
  Label to;
  double dwell;      // clamped
  double unclamped;  // raw formula value
};

struct DwellTable {
  double eps = 0.0;
  std::vector<DwellEntry> entries;
  double t_loc = 0.0;  // max of entries[].dwell

  /// nullptr when the transition is not in the table.
  [[nodiscard]] const DwellEntry* find(const Label& from, const Label& to) const;
};

[[nodiscard]] DwellTable local_dwell(double eps, const SwitchedSystem& system,
                                     std::span<const Transition> transitions);

/// Distinct (u_{i-1}, u_i) pairs of a signal in order of first appearance; one period
/// (with wrap) for periodic signals.
[[nodiscard]] std::vector<Transition> signal_transitions(const SwitchingSignal& signal);

struct MuClosedForm {};
struct MuSampled {
  std::size_t n_samples;
  double radius;  // sampling radius around the equilibrium of the denominator mode
  std::uint64_t seed;
};
using MuMode = std::variant<MuClosedForm, MuSampled>;

/// sup of V_num / V_den outside N^eps_den for identity quadratics: (1 + |x_num - x_den| / sqrt(eps))^2.
[[nodiscard]] double pair_mu_closed_form(double eps, const Subsystem& numerator,
                                         const Subsystem& denominator);

/// Largest sampled V_num / V_den over points with V_den > eps and |x - x_den| <= radius.
[[nodiscard]] double pair_mu_sampled(double eps, const Subsystem& numerator,
                                     const Subsystem& denominator, const MuSampled& settings);

/// Uniform ratio bound mu(eps) over all ordered pairs of the system.
[[nodiscard]] double mu_bound(double eps, const SwitchedSystem& system, const MuMode& mode);

/// (1 + margin) ln(mu) / k_min; strictly above the attraction bound for mu > 1.
[[nodiscard]] double global_dwell(double mu, double k_min, double margin = 0.01);

struct TriangleAnalysis {
  double eps = 0.0;
  double gap = 0.0;           // T(u0,u1) - T(u0,v) - T(v,u1) from the raw dwell formula
  double gap_via_K = 0.0;     // -ln(K / eps^{1/k})
  double gap_clamped = 0.0;   // same difference with clamped dwell times
  double K = 0.0;
  double direct_dwell = 0.0;  // T(u0,u1)
  double via_dwell = 0.0;     // T(u0,v) + T(v,u1)
  std::optional<double> eps0;

  /// True when the detour through v takes strictly longer.
  [[nodiscard]] bool inequality_holds() const noexcept { return gap < 0.0; }
};

/// Compares the direct travel time u0 -> u1 with the detour u0 -> v -> u1. All three
/// certificates must share alpha, beta and k (HeterogeneousCertificates otherwise).
[[nodiscard]] TriangleAnalysis triangle_gap(double eps, const Subsystem& u0, const Subsystem& v,
                                            const Subsystem& u1);

/// Worst-case K0(eps) / eps^{1/k} over equilibria with |x_u0|, |x_u1| <= d and
/// |x_u0 - x_v|, |x_v - x_u1| >= r.
[[nodiscard]] double worst_case_ratio(double eps, double d, double r, const ClassKFn& alpha,
                                      const ClassKFn& beta, double k);

/// Largest eps0 in (0, 1e6] (to relative width 1e-6) such that worst_case_ratio > 1 on
/// (0, eps0).
[[nodiscard]] double epsilon0_search(double d, double r, const ClassKFn& alpha,
                                     const ClassKFn& beta, double k);

}  // namespace swd
