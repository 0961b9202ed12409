#include "swd/dwell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swd/sampling.hpp"

namespace swd {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::InvalidEpsilon, "eps must be positive and finite");
  }
}

}  // namespace

double pairwise_dwell_raw(double eps, const Subsystem& from, const Subsystem& to) {
  require_eps(eps);
  if (from.dimension() != to.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "subsystems differ in dimension");
  }
  const double distance = (to.equilibrium() - from.equilibrium()).norm();
  const double reach = to.beta().eval(distance + from.alpha().inverse(eps));
  if (!(reach > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta(...) must be positive");
  return -std::log(eps / reach) / to.decay_rate();
}

double pairwise_dwell(double eps, const Subsystem& from, const Subsystem& to) {
  return std::max(0.0, pairwise_dwell_raw(eps, from, to));
}

const DwellEntry* DwellTable::find(const Label& from, const Label& to) const {
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const DwellEntry& e) { return e.from == from && e.to == to; });
  return it == entries.end() ? nullptr : &*it;
}

DwellTable local_dwell(double eps, const SwitchedSystem& system,
                       std::span<const Transition> transitions) {
  require_eps(eps);
  if (transitions.empty()) throw Error(ErrorKind::EmptyTransitions, "no transitions given");
  DwellTable table;
  table.eps = eps;
  for (const auto& [from, to] : transitions) {
    const double raw = pairwise_dwell_raw(eps, system.at(from), system.at(to));
    const double clamped = std::max(0.0, raw);
    table.entries.push_back({from, to, clamped, raw});
    table.t_loc = std::max(table.t_loc, clamped);
  }
  return table;
}

std::vector<Transition> signal_transitions(const SwitchingSignal& signal) {
  std::vector<Transition> out;
  const std::size_t count =
      signal.is_periodic() ? signal.switches_per_period() : signal.segments().size();
  for (std::size_t q = 1; q <= count; ++q) {
    const auto sw = signal.nth_switch(q);
    Transition t{sw.from, sw.to};
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

double pair_mu_closed_form(double eps, const Subsystem& numerator, const Subsystem& denominator) {
  require_eps(eps);
  if (!numerator.is_identity_quadratic() || !denominator.is_identity_quadratic()) {
    throw Error(ErrorKind::UnsupportedCertificate,
                "closed-form mu needs identity-weighted quadratic certificates");
  }
  // |x - x_num| <= |x - x_den| + D and |x - x_den| >= sqrt(eps) outside N^eps_den.
  const double distance = (numerator.equilibrium() - denominator.equilibrium()).norm();
  const double ratio = 1.0 + distance / std::sqrt(eps);
  return ratio * ratio;
}

double pair_mu_sampled(double eps, const Subsystem& numerator, const Subsystem& denominator,
                       const MuSampled& settings) {
  require_eps(eps);
  if (settings.n_samples == 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  const double r_min = denominator.beta().inverse(eps);
  if (!(settings.radius > r_min)) {
    throw Error(ErrorKind::InvalidArgument, "sampling radius does not reach outside N^eps");
  }
  const std::size_t n = denominator.dimension();
  const HaltonSampler sampler(n + 1, settings.seed);
  const auto count = static_cast<std::ptrdiff_t>(settings.n_samples);
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Vec u = sampler.unit_point(static_cast<std::size_t>(i));
    Vec dir(static_cast<Eigen::Index>(n));
    if (n == 1) {
      dir[0] = u[0] < 0.5 ? -1.0 : 1.0;
    } else if (n == 2) {
      const double theta = 2.0 * std::numbers::pi * u[0];
      dir << std::cos(theta), std::sin(theta);
    } else {
      dir = 2.0 * u.head(static_cast<Eigen::Index>(n)).array() - 1.0;
      const double norm = dir.norm();
      dir = norm < 1e-9 ? Vec::Unit(static_cast<Eigen::Index>(n), 0) : Vec(dir / norm);
    }
    const double radius = r_min + (settings.radius - r_min) * u[static_cast<Eigen::Index>(n)];
    const Vec x = denominator.equilibrium() + radius * dir;
    const double v_den = denominator.lyapunov(x);
    if (v_den > eps) best = std::max(best, numerator.lyapunov(x) / v_den);
  }
  return best;
}

double mu_bound(double eps, const SwitchedSystem& system, const MuMode& mode) {
  require_eps(eps);
  const bool closed = std::holds_alternative<MuClosedForm>(mode);
  if (closed) {
    for (const auto& sub : system.subsystems()) {
      if (!sub.is_identity_quadratic()) {
        throw Error(ErrorKind::UnsupportedCertificate,
                    "closed-form mu needs identity-weighted quadratic certificates");
      }
    }
  }
  double mu = 1.0;
  for (const auto& num : system.subsystems()) {
    for (const auto& den : system.subsystems()) {
      if (&num == &den) continue;
      const double pair = closed ? pair_mu_closed_form(eps, num, den)
                                 : pair_mu_sampled(eps, num, den, std::get<MuSampled>(mode));
      mu = std::max(mu, pair);
    }
  }
  return mu;
}

double global_dwell(double mu, double k_min, double margin) {
  if (!(mu >= 1.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidMu, "mu must be >= 1");
  if (!(k_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "k_min must be positive");
  if (!(margin > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "margin must be positive: the bound is strict");
  }
  return (1.0 + margin) * std::log(mu) / k_min;
}

TriangleAnalysis triangle_gap(double eps, const Subsystem& u0, const Subsystem& v,
                              const Subsystem& u1) {
  require_eps(eps);
  const bool shared = u0.alpha() == v.alpha() && v.alpha() == u1.alpha() &&
                      u0.beta() == v.beta() && v.beta() == u1.beta() &&
                      u0.decay_rate() == v.decay_rate() && v.decay_rate() == u1.decay_rate();
  if (!shared) {
    throw Error(ErrorKind::HeterogeneousCertificates,
                "triangle analysis needs shared alpha, beta and k");
  }
  const double k = u0.decay_rate();
  const ClassKFn& beta = u0.beta();
  const double a = u0.alpha().inverse(eps);
  const double d01 = (u0.equilibrium() - u1.equilibrium()).norm();
  const double d0v = (u0.equilibrium() - v.equilibrium()).norm();
  const double dv1 = (v.equilibrium() - u1.equilibrium()).norm();

  TriangleAnalysis out;
  out.eps = eps;
  const double t01 = pairwise_dwell_raw(eps, u0, u1);
  const double t0v = pairwise_dwell_raw(eps, u0, v);
  const double tv1 = pairwise_dwell_raw(eps, v, u1);
  out.direct_dwell = t01;
  out.via_dwell = t0v + tv1;
  out.gap = t01 - t0v - tv1;
  out.gap_clamped = std::max(0.0, t01) - std::max(0.0, t0v) - std::max(0.0, tv1);
  out.K = std::pow(beta.eval(dv1 + a) / beta.eval(d01 + a), 1.0 / k) *
          std::pow(beta.eval(d0v + a), 1.0 / k);
  out.gap_via_K = -std::log(out.K / std::pow(eps, 1.0 / k));
  return out;
}

double worst_case_ratio(double eps, double d, double r, const ClassKFn& alpha,
                        const ClassKFn& beta, double k) {
  const double a = alpha.inverse(eps);
  const double log_ratio = (2.0 / k) * std::log(beta.eval(r + a)) -
                           (1.0 / k) * std::log(beta.eval(2.0 * d + a)) - std::log(eps) / k;
  return std::exp(log_ratio);
}

double epsilon0_search(double d, double r, const ClassKFn& alpha, const ClassKFn& beta, double k) {
  if (!(d > 0.0) || !(r > 0.0) || !(k > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "d, r and k must be positive");
  }
  if (r > 2.0 * d) {
    throw Error(ErrorKind::EmptyConfiguration, "r > 2d leaves no admissible equilibria");
  }
  constexpr double kLow = 1e-12;
  constexpr double kHigh = 1e6;
  constexpr int kPerDecade = 20;
  auto holds = [&](double eps) { return worst_case_ratio(eps, d, r, alpha, beta, k) > 1.0; };

  // Scan a log grid for the first failure so that the condition holds on all of (0, eps0),
  // then refine that single crossing by geometric bisection.
  const int steps = 18 * kPerDecade;
  double pass = 0.0;
  double fail = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double eps = kLow * std::pow(10.0, static_cast<double>(i) / kPerDecade);
    if (holds(eps)) {
      pass = eps;
      continue;
    }
    fail = eps;
    break;
  }
  if (fail == 0.0) return kHigh;
  if (pass == 0.0) throw Error(ErrorKind::NoThreshold, "condition fails for every eps in range");
  while (fail / pass - 1.0 > 1e-6) {
    const double mid = std::sqrt(pass * fail);
    if (holds(mid)) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  return pass;
}

}  // namespace swd
