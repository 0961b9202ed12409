#include "swd/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "detail.hpp"

namespace swd {

double v_eval(const Subsystem& sub, const Vec& x) { return sub.lyapunov(x); }

Membership membership(const Subsystem& sub, double eps, const Vec& x, double tolerance) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "eps must be positive");
  const double v = sub.lyapunov(x);
  return {v, v <= eps + tolerance, v <= eps};
}

bool in_region(const Subsystem& sub, double eps, const Vec& x) {
  return membership(sub, eps, x).member;
}

Vec finite_difference_gradient(const Subsystem& sub, const Vec& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Vec grad(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = sub.lyapunov(probe);
    probe[i] = x[i] - h;
    const double down = sub.lyapunov(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Vec lyapunov_gradient(const Subsystem& sub, const Vec& x) {
  if (x.size() != sub.equilibrium().size()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension mismatch");
  }
  if (const auto& weight = sub.quadratic_weight()) {
    return 2.0 * (*weight * (x - sub.equilibrium()));
  }
  return finite_difference_gradient(sub, x);
}

namespace detail {

CertificateSample check_certificate_point(const Subsystem& sub, const Vec& x, std::size_t index) {
  CertificateSample out;
  const double r = (x - sub.equilibrium()).norm();
  const double v = sub.lyapunov(x);
  const double lower = sub.alpha().eval(r);
  const double upper = sub.beta().eval(r);
  // Relative slack of a few ulps: with alpha = beta = s^2 both sides are the same number.
  const double rel = 1e-12;
  if (lower > v * (1.0 + rel) + 1e-300 || v > upper * (1.0 + rel) + 1e-300) {
    out.sandwich = SandwichViolation{index, x, v, lower, upper};
  }
  const double derivative = lyapunov_gradient(sub, x).dot(sub.field(x));
  const double bound = -sub.decay_rate() * v;
  out.slack = derivative - bound;
  if (derivative > bound + kDecayTolerance) out.decay = DecayViolation{index, x, derivative, bound};
  return out;
}

void fold_certificate_sample(CertificateReport& report, CertificateSample&& sample) {
  ++report.samples_tested;
  report.max_decay_slack = std::max(report.max_decay_slack, sample.slack);
  if (sample.sandwich) report.sandwich_violations.push_back(std::move(*sample.sandwich));
  if (sample.decay) report.decay_violations.push_back(std::move(*sample.decay));
}

Vec sphere_direction(const HaltonSampler& sampler, std::size_t i) {
  const Vec u = sampler.unit_point(i);
  const auto n = u.size();
  Vec d(n);
  if (n == 1) {
    d[0] = u[0] < 0.5 ? -1.0 : 1.0;
    return d;
  }
  if (n == 2) {
    const double theta = 2.0 * std::numbers::pi * u[0];
    d << std::cos(theta), std::sin(theta);
    return d;
  }
  d = 2.0 * u.array() - 1.0;
  const double norm = d.norm();
  if (norm < 1e-9) return Vec::Unit(n, 0);
  return d / norm;
}

}  // namespace detail

CertificateReport check_certificate_at(const Subsystem& sub, std::span<const Vec> points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<detail::CertificateSample> samples(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    samples[idx] = detail::check_certificate_point(sub, points[idx], idx);
  }
  CertificateReport report;
  report.label = sub.label();
  report.max_decay_slack = -std::numeric_limits<double>::infinity();
  for (auto& s : samples) detail::fold_certificate_sample(report, std::move(s));
  if (points.empty()) report.max_decay_slack = 0.0;
  return report;
}

CertificateReport check_certificate(const Subsystem& sub, const Box& box, std::size_t n_samples,
                                    std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  const auto dim = static_cast<Eigen::Index>(sub.dimension());
  if (box.lower.size() != dim || box.upper.size() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension mismatch");
  }
  if (!((box.upper - box.lower).array() > 0.0).all()) {
    throw Error(ErrorKind::InvalidArgument, "box must have positive volume");
  }
  const HaltonSampler sampler(sub.dimension(), seed);
  const auto n = static_cast<std::ptrdiff_t>(n_samples);
  std::vector<Vec> points(n_samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    points[static_cast<std::size_t>(i)] = sampler.point_in(box, static_cast<std::size_t>(i));
  }
  return check_certificate_at(sub, points);
}

std::vector<Vec> region_boundary_points(const Subsystem& sub, double eps, std::size_t count) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "eps must be positive");
  if (count < 3) throw Error(ErrorKind::InvalidArgument, "count must be >= 3");
  const auto n = static_cast<Eigen::Index>(sub.dimension());
  const Vec& center = sub.equilibrium();
  std::vector<Vec> out;
  out.reserve(count);
  const auto& weight = sub.quadratic_weight();

  if (n == 2) {
    // P = L L^T, then x = x_u + sqrt(eps) L^{-T} c lies on V = eps for unit c.
    Mat map;
    if (weight) {
      const Mat lower = weight->llt().matrixL();
      map = lower.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(2, 2));
    }
    for (std::size_t j = 0; j < count; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(count);
      Vec c(2);
      c << std::cos(theta), std::sin(theta);
      if (weight) {
        out.push_back(center + std::sqrt(eps) * (map * c));
        continue;
      }
      // V(x_u + r c) crosses eps inside [beta^{-1}(eps), alpha^{-1}(eps)].
      double lo = sub.beta().inverse(eps);
      double hi = sub.alpha().inverse(eps);
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sub.lyapunov(center + mid * c) <= eps) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.push_back(center + 0.5 * (lo + hi) * c);
    }
    return out;
  }

  if (!weight) {
    throw Error(ErrorKind::UnsupportedDimension,
                "level sets of non-quadratic certificates are only generated in 2-D");
  }
  const HaltonSampler sampler(static_cast<std::size_t>(n), 0);
  for (std::size_t j = 0; j < count; ++j) {
    Vec d = n == 1 ? Vec::Constant(1, j % 2 == 0 ? 1.0 : -1.0) : detail::sphere_direction(sampler, j);
    const double q = d.dot(*weight * d);
    out.push_back(center + std::sqrt(eps / q) * d);
  }
  return out;
}

}  // namespace swd
