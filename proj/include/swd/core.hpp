#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swd/error.hpp"

namespace swd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Opaque mode identifier. Numeric modes are carried as their decimal text.
using Label = std::string;

using VectorField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Power-law comparison function s -> c * s^p on s >= 0.
class ClassKFn {
 public:
  ClassKFn(double coefficient, double exponent);

  /// s -> s^2, the bound pair of the identity-weighted quadratic.
  [[nodiscard]] static ClassKFn square() { return {1.0, 2.0}; }

  [[nodiscard]] double eval(double s) const;
  [[nodiscard]] double inverse(double value) const;

  [[nodiscard]] double coefficient() const noexcept { return coefficient_; }
  [[nodiscard]] double exponent() const noexcept { return exponent_; }

  friend bool operator==(const ClassKFn&, const ClassKFn&) = default;

 private:
  double coefficient_;
  double exponent_;
};

/// x' = A x + b.
struct AffineDynamics {
  Mat A;
  Vec b;
};

/// One mode of the switched system together with its Lyapunov certificate
///   alpha(|x - x_u|) <= V(x) <= beta(|x - x_u|),   grad V(x) . f(x) <= -k V(x).
///
/// Quadratic certificates V(x) = (x - x_u)^T P (x - x_u) and affine fields are
/// stored structurally so that gradients, closed forms and fast evaluation
/// remain available; everything else goes through the type-erased callables.
class Subsystem {
 public:
  /// General constructor. Validates f(x_u) = 0, V(x_u) = 0, alpha <= beta and k > 0.
  Subsystem(Label label, VectorField field, Vec equilibrium, double decay_rate, ClassKFn alpha,
            ClassKFn beta, ScalarField lyapunov);

  /// Quadratic certificate with weight P around the equilibrium.
  Subsystem(Label label, VectorField field, Vec equilibrium, double decay_rate, ClassKFn alpha,
            ClassKFn beta, Mat weight);

  [[nodiscard]] const Label& label() const noexcept { return label_; }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(equilibrium_.size());
  }
  [[nodiscard]] const Vec& equilibrium() const noexcept { return equilibrium_; }
  [[nodiscard]] double decay_rate() const noexcept { return decay_rate_; }
  [[nodiscard]] const ClassKFn& alpha() const noexcept { return alpha_; }
  [[nodiscard]] const ClassKFn& beta() const noexcept { return beta_; }

  [[nodiscard]] Vec field(const Vec& x) const;
  [[nodiscard]] double lyapunov(const Vec& x) const;

  [[nodiscard]] const std::optional<Mat>& quadratic_weight() const noexcept { return weight_; }
  [[nodiscard]] bool is_identity_quadratic() const noexcept { return identity_quadratic_; }
  [[nodiscard]] const std::optional<AffineDynamics>& affine() const noexcept { return affine_; }

  /// Copy with a different certified decay rate (used to probe the checkers).
  [[nodiscard]] Subsystem with_decay_rate(double k) const;

 private:
  friend Subsystem make_affine_subsystem(const Mat&, const Vec&, Label);
  friend Subsystem make_affine_subsystem(const Mat&, const Vec&, Label, const Mat&, ClassKFn,
                                         ClassKFn);

  Subsystem() = default;
  void validate() const;

  Label label_;
  VectorField field_;
  Vec equilibrium_;
  double decay_rate_ = 0.0;
  ClassKFn alpha_ = ClassKFn::square();
  ClassKFn beta_ = ClassKFn::square();
  ScalarField lyapunov_;
  std::optional<Mat> weight_;
  bool identity_quadratic_ = false;
  std::optional<AffineDynamics> affine_;
};

/// x' = A x + b with V = |x - x_u|^2, alpha = beta = s^2 and k = -lambda_max(A + A^T).
[[nodiscard]] Subsystem make_affine_subsystem(const Mat& A, const Vec& b, Label label);

/// x' = A x + b with a P-weighted quadratic. alpha and beta are taken as given; k is the
/// largest admissible rate, -lambda_max of the pencil (A^T P + P A, P).
[[nodiscard]] Subsystem make_affine_subsystem(const Mat& A, const Vec& b, Label label,
                                              const Mat& weight, ClassKFn alpha, ClassKFn beta);

class SwitchedSystem {
 public:
  explicit SwitchedSystem(std::vector<Subsystem> subsystems);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::span<const Subsystem> subsystems() const noexcept { return subsystems_; }
  [[nodiscard]] bool contains(const Label& label) const { return index_.contains(label); }
  /// Throws UnknownLabel.
  [[nodiscard]] const Subsystem& at(const Label& label) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<Subsystem> subsystems_;
  std::map<Label, std::size_t> index_;
};

struct SwitchPoint {
  double time;
  Label mode;
};

/// One unrolled discontinuity of a signal; index counts from 1.
struct SignalSwitch {
  std::size_t index;
  double time;
  Label from;
  Label to;
};

/// Piecewise-constant, right-continuous mode signal u(t) on [t0, inf).
///
/// mode_at(t_i) is the label entered at t_i. The subsystem that moves the state
/// across [t_{i-1}, t_i) is the label entered at the end of that interval, u_i:
/// a state that starts in the trapping region of u_{i-1} travels toward x_{u_i}
/// and is checked against N_{u_i} on arrival. After the final switch of a finite
/// signal the last label keeps driving.
class SwitchingSignal {
 public:
  SwitchingSignal(double t0, Label initial_mode, std::vector<SwitchPoint> segments,
                  std::optional<double> period = std::nullopt);

  [[nodiscard]] static SwitchingSignal constant(Label mode, double t0 = 0.0) {
    return {t0, std::move(mode), {}};
  }

  [[nodiscard]] double t0() const noexcept { return t0_; }
  [[nodiscard]] const Label& initial_mode() const noexcept { return initial_mode_; }
  [[nodiscard]] std::span<const SwitchPoint> segments() const noexcept { return segments_; }
  [[nodiscard]] const std::optional<double>& period() const noexcept { return period_; }
  [[nodiscard]] bool is_periodic() const noexcept { return period_.has_value(); }

  /// Number of switches in one period (including the wrap back to the initial mode).
  [[nodiscard]] std::size_t switches_per_period() const noexcept { return segments_.size() + 1; }

  /// The q-th switch (q >= 1). Finite signals throw InvalidArgument past the last one.
  [[nodiscard]] SignalSwitch nth_switch(std::size_t q) const;

  /// Every switch with t0 < t_i <= horizon, in order.
  [[nodiscard]] std::vector<SignalSwitch> switches_until(double horizon) const;

  [[nodiscard]] const Label& mode_at(double t) const;
  [[nodiscard]] const Label& driving_mode(double t) const;

  /// Throws UnknownLabel for any label missing from the system.
  void check_labels(const SwitchedSystem& system) const;

 private:
  [[nodiscard]] double switch_time(std::size_t period_index, std::size_t slot) const;
  [[nodiscard]] std::size_t period_of(double t) const;

  double t0_;
  Label initial_mode_;
  std::vector<SwitchPoint> segments_;
  std::optional<double> period_;
};

/// Builds a signal from dwell durations. `dwell` holds either one value used for every
/// interval or one value per interval (transitions.size(), plus one for the wrap when
/// periodic). An empty transition list yields a constant signal unless periodic.
[[nodiscard]] SwitchingSignal signal_from_dwell(const Label& initial_mode,
                                                const std::vector<Label>& transitions,
                                                const std::vector<double>& dwell, double t0,
                                                bool periodic);

struct DwellViolation {
  std::size_t index;  // i of the offending pair (u_{i-1}, u_i)
  Label from;
  Label to;
  double gap;
  double required;
};

using DwellRequirement = std::function<double(const Label& from, const Label& to)>;

/// Every consecutive pair with t_i - t_{i-1} < required(u_{i-1}, u_i). The first gap is
/// measured from t0; periodic signals are checked over one period including the wrap.
[[nodiscard]] std::vector<DwellViolation> validate_dwell(const SwitchingSignal& signal,
                                                         const DwellRequirement& required);

}  // namespace swd
