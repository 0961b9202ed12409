#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swd/core.hpp"
#include "swd/sampling.hpp"

namespace swd {

/// Absolute slack on V-values when deciding membership in N^eps_u.
inline constexpr double kMembershipTolerance = 1e-9;
/// Absolute slack on grad V . f <= -k V in the certificate checker.
inline constexpr double kDecayTolerance = 1e-9;

struct Membership {
  double value;  // V_u(x)
  bool member;   // V <= eps + tolerance
  bool strict;   // V <= eps
};

[[nodiscard]] double v_eval(const Subsystem& sub, const Vec& x);

[[nodiscard]] Membership membership(const Subsystem& sub, double eps, const Vec& x,
                                    double tolerance = kMembershipTolerance);

/// x in N^eps_u = {V_u <= eps}, up to kMembershipTolerance.
[[nodiscard]] bool in_region(const Subsystem& sub, double eps, const Vec& x);

/// Analytic 2 P (x - x_u) for quadratic certificates, central differences otherwise.
[[nodiscard]] Vec lyapunov_gradient(const Subsystem& sub, const Vec& x);

/// Central differences with step 1e-6 (1 + |x|).
[[nodiscard]] Vec finite_difference_gradient(const Subsystem& sub, const Vec& x);

struct SandwichViolation {
  std::size_t sample;
  Vec x;
  double value;
  double lower;  // alpha(|x - x_u|)
  double upper;  // beta(|x - x_u|)
};

struct DecayViolation {
  std::size_t sample;
  Vec x;
  double derivative;  // grad V(x) . f(x)
  double bound;       // -k V(x)
};

/// Outcome of a sampled falsification attempt; violations are ordered by sample index.
struct CertificateReport {
  Label label;
  std::size_t samples_tested = 0;
  std::vector<SandwichViolation> sandwich_violations;
  std::vector<DecayViolation> decay_violations;
  double max_decay_slack = 0.0;  // max of grad V . f + k V over the samples

  [[nodiscard]] bool passed() const noexcept {
    return sandwich_violations.empty() && decay_violations.empty();
  }
};

/// Checks the sandwich and decay inequalities on n_samples quasi-random points of the box.
/// Deterministic in (box, n_samples, seed); samples are evaluated in parallel.
[[nodiscard]] CertificateReport check_certificate(const Subsystem& sub, const Box& box,
                                                  std::size_t n_samples, std::uint64_t seed);

/// Same checks on an explicit point set.
[[nodiscard]] CertificateReport check_certificate_at(const Subsystem& sub,
                                                     std::span<const Vec> points);

/// `count` points on the level set V_u = eps. Quadratic certificates in 2-D use the
/// ellipse parameterization at equally spaced angles; other 2-D certificates are
/// solved radially inside the alpha/beta bracket. Quadratics in other dimensions use
/// quasi-random directions.
[[nodiscard]] std::vector<Vec> region_boundary_points(const Subsystem& sub, double eps,
                                                      std::size_t count);

}  // namespace swd
