#pragma once
// Shared fixtures for the test suite: the three-mode planar example, a matrix-exponential
// reference solution and oracle values computed offline at high precision.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "swd/core.hpp"
#include "swd/sim.hpp"

namespace swd::test {

namespace oracle {
// 40-digit evaluation of the pairwise dwell formula, eps = 0.05.
inline constexpr double kT12 = 1.426062438905368;
inline constexpr double kT13 = 1.991232445939118;
inline constexpr double kGap = -0.8608924318716187;
inline constexpr double kDetour = 2.852124877810736;
// (1 + sqrt(2) / sqrt(0.05))^2 and (1 + (sqrt(2)/2) / sqrt(0.05))^2.
inline constexpr double kMu = 53.64911064067352;
inline constexpr double kPairMu = 17.32455532033676;
inline constexpr double kTGlob = 2.011144770398509;
// (r^2 / (2 (d - r)))^2 with d = 1, r = sqrt(2) / 2.
inline constexpr double kEps0 = 0.7285533905932738;
// Matrix-exponential propagation from x0 = x_u1 + (sqrt(0.05) + 0.05) w under the ci signal, T = 1.43.
inline constexpr double kSharpX = 0.19346922206774633;
inline constexpr double kSharpVAtT = 0.05508104345076654;
inline constexpr double kSharpVAt2T = 0.03445621061965463;
}  // namespace oracle

inline Mat example_matrix() {
  Mat A(2, 2);
  A << -1.0, -1.0, 1.0, -1.0;
  return A;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

/// b(u) = (u, 1); labels u1, u2, u3 for u = 1, 0, -1.
inline SwitchedSystem example_system() {
  return SwitchedSystem({make_affine_subsystem(example_matrix(), vec2(1.0, 1.0), "u1"),
                         make_affine_subsystem(example_matrix(), vec2(0.0, 1.0), "u2"),
                         make_affine_subsystem(example_matrix(), vec2(-1.0, 1.0), "u3")});
}

/// u1 on [0, T), u2 on [T, 2T), u3 afterwards.
inline SwitchingSignal ci_signal(double T = 1.43) {
  return signal_from_dwell("u1", {"u2", "u3"}, {T}, 0.0, false);
}

/// u1, u2, u3, u2 repeated with period 4 gap.
inline SwitchingSignal four_period_signal(double gap) {
  return signal_from_dwell("u1", {"u2", "u3", "u2"}, {gap}, 0.0, true);
}

/// x_u + e^{A (t - t0)} (x0 - x_u).
inline Vec exact_affine(const Subsystem& sub, const Vec& x0, double dt) {
  const Mat E = (sub.affine()->A * dt).exp();
  return sub.equilibrium() + E * (x0 - sub.equilibrium());
}

/// Max deviation of an integrated trajectory from the closed form over all its samples.
inline double max_deviation(const Subsystem& sub, const Trajectory& traj) {
  const double t0 = traj.samples.front().t;
  const Vec& x0 = traj.samples.front().x;
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    worst = std::max(worst, (s.x - exact_affine(sub, x0, s.t - t0)).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(SWD_SOURCE_DIR) / "scenarios" / name;
}

/// Fresh, empty directory below the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(SWD_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace swd::test
