#pragma once

// Serial reference versions of the parallel kernels. Same inputs, same outputs, one
// plain loop each; the test suite checks the parallel kernels against them and the
// benchmark target times both.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swd/dwell.hpp"
#include "swd/lyapunov.hpp"
#include "swd/sim.hpp"

namespace swd::reference {

[[nodiscard]] CertificateReport check_certificate(const Subsystem& sub, const Box& box,
                                                  std::size_t n_samples, std::uint64_t seed);

[[nodiscard]] double pair_mu_sampled(double eps, const Subsystem& numerator,
                                     const Subsystem& denominator, const MuSampled& settings);

[[nodiscard]] std::vector<Trajectory> simulate_batch(const SwitchedSystem& system,
                                                     const SwitchingSignal& signal,
                                                     std::span<const Vec> initial_states,
                                                     double horizon, double step);

[[nodiscard]] std::vector<TubeSlice> tube_sample(const SwitchedSystem& system, const Label& from,
                                                 const Label& to, double eps,
                                                 std::span<const double> t_grid,
                                                 std::size_t boundary_count, double step);

}  // namespace swd::reference
