#pragma once

// Pointwise helpers shared by the parallel kernels and their serial references.

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

#include "swd/lyapunov.hpp"

namespace swd::detail {

struct CertificateSample {
  std::optional<SandwichViolation> sandwich;
  std::optional<DecayViolation> decay;
  double slack = 0.0;
};

[[nodiscard]] CertificateSample check_certificate_point(const Subsystem& sub, const Vec& x,
                                                        std::size_t index);

void fold_certificate_sample(CertificateReport& report, CertificateSample&& sample);

/// Increment of one classical RK4 step of the subsystem field.
[[nodiscard]] Vec rk4_increment(const Subsystem& sub, const Vec& x, double h);

/// Unit direction for sampled-mu and non-planar boundary generation.
[[nodiscard]] Vec sphere_direction(const HaltonSampler& sampler, std::size_t i);


/// Advances x from a to b with fixed RK4 steps of size h, landing exactly on b. Increments
/// are accumulated with Kahan compensation. `on_sample(t, x)` is called after every step.
/// Throws NonfiniteState.
Vec advance(const Subsystem& sub, Vec x, double a, double b, double h,
            const std::function<void(double, const Vec&)>& on_sample = {});

/// Collects exceptions thrown inside an OpenMP loop; rethrow() raises the one with the
/// lowest iteration index so the failure reported matches the serial loop.
class LoopErrors {
 public:
  explicit LoopErrors(std::size_t n) : errors_(n) {}
  void capture(std::size_t i) { errors_[i] = std::current_exception(); }
  void rethrow() const {
    for (const auto& e : errors_) {
      if (e) std::rethrow_exception(e);
    }
  }

 private:
  std::vector<std::exception_ptr> errors_;
};

}  // namespace swd::detail
