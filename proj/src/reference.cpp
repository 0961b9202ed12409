#include "swd/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "detail.hpp"

namespace swd::reference {

CertificateReport check_certificate(const Subsystem& sub, const Box& box, std::size_t n_samples,
                                    std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  const HaltonSampler sampler(sub.dimension(), seed);
  CertificateReport report;
  report.label = sub.label();
  report.max_decay_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples; ++i) {
    detail::fold_certificate_sample(
        report, detail::check_certificate_point(sub, sampler.point_in(box, i), i));
  }
  return report;
}

double pair_mu_sampled(double eps, const Subsystem& numerator, const Subsystem& denominator,
                       const MuSampled& settings) {
  const double r_min = denominator.beta().inverse(eps);
  const std::size_t n = denominator.dimension();
  const auto dim = static_cast<Eigen::Index>(n);
  const HaltonSampler sampler(n + 1, settings.seed);
  double best = 0.0;
  for (std::size_t i = 0; i < settings.n_samples; ++i) {
    const Vec u = sampler.unit_point(i);
    Vec dir(dim);
    if (n == 1) {
      dir[0] = u[0] < 0.5 ? -1.0 : 1.0;
    } else if (n == 2) {
      const double theta = 2.0 * std::numbers::pi * u[0];
      dir << std::cos(theta), std::sin(theta);
    } else {
      dir = 2.0 * u.head(dim).array() - 1.0;
      const double norm = dir.norm();
      dir = norm < 1e-9 ? Vec::Unit(dim, 0) : Vec(dir / norm);
    }
    const Vec x = denominator.equilibrium() + (r_min + (settings.radius - r_min) * u[dim]) * dir;
    const double v_den = denominator.lyapunov(x);
    if (v_den > eps) best = std::max(best, numerator.lyapunov(x) / v_den);
  }
  return best;
}

std::vector<Trajectory> simulate_batch(const SwitchedSystem& system, const SwitchingSignal& signal,
                                       std::span<const Vec> initial_states, double horizon,
                                       double step) {
  std::vector<Trajectory> out;
  out.reserve(initial_states.size());
  for (const auto& x0 : initial_states) {
    out.push_back(simulate_switched(system, signal, x0, horizon, step));
  }
  return out;
}

std::vector<TubeSlice> tube_sample(const SwitchedSystem& system, const Label& from,
                                   const Label& to, double eps, std::span<const double> t_grid,
                                   std::size_t boundary_count, double step) {
  const Subsystem& flow = system.at(to);
  const auto boundary = region_boundary_points(system.at(from), eps, boundary_count);
  std::vector<TubeSlice> slices;
  for (double t : t_grid) slices.push_back({t, {}});
  for (const auto& start : boundary) {
    Vec x = start;
    double t = 0.0;
    for (auto& slice : slices) {
      x = detail::advance(flow, x, t, slice.t, step);
      t = slice.t;
      slice.points.push_back(x);
    }
  }
  return slices;
}

}  // namespace swd::reference
