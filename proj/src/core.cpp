#include "swd/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::EmptyTransitions: return "EmptyTransitions";
    case ErrorKind::NonpositiveDwell: return "NonpositiveDwell";
    case ErrorKind::InvalidSignal: return "InvalidSignal";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::InvalidMu: return "InvalidMu";
    case ErrorKind::UnsupportedCertificate: return "UnsupportedCertificate";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::HeterogeneousCertificates: return "HeterogeneousCertificates";
    case ErrorKind::EmptyConfiguration: return "EmptyConfiguration";
    case ErrorKind::NoThreshold: return "NoThreshold";
    case ErrorKind::NonfiniteState: return "NonfiniteState";
    case ErrorKind::SignalMismatch: return "SignalMismatch";
    case ErrorKind::InsufficientSwitches: return "InsufficientSwitches";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- ClassKFn

ClassKFn::ClassKFn(double coefficient, double exponent)
    : coefficient_(coefficient), exponent_(exponent) {
  if (!(coefficient > 0.0) || !(exponent > 0.0) || !std::isfinite(coefficient) ||
      !std::isfinite(exponent)) {
    throw Error(ErrorKind::InvalidArgument, "class-K coefficient and exponent must be positive");
  }
}

double ClassKFn::eval(double s) const {
  if (s < 0.0) throw Error(ErrorKind::InvalidArgument, "class-K argument must be nonnegative");
  if (exponent_ == 2.0) return coefficient_ * s * s;
  return coefficient_ * std::pow(s, exponent_);
}

double ClassKFn::inverse(double value) const {
  if (value < 0.0) throw Error(ErrorKind::InvalidArgument, "class-K inverse needs value >= 0");
  if (exponent_ == 2.0) return std::sqrt(value / coefficient_);
  return std::pow(value / coefficient_, 1.0 / exponent_);
}

// ---------------------------------------------------------------- Subsystem

Subsystem::Subsystem(Label label, VectorField field, Vec equilibrium, double decay_rate,
                     ClassKFn alpha, ClassKFn beta, ScalarField lyapunov)
    : label_(std::move(label)),
      field_(std::move(field)),
      equilibrium_(std::move(equilibrium)),
      decay_rate_(decay_rate),
      alpha_(alpha),
      beta_(beta),
      lyapunov_(std::move(lyapunov)) {
  if (!field_ || !lyapunov_) throw Error(ErrorKind::InvalidArgument, "empty field or lyapunov");
  validate();
}

Subsystem::Subsystem(Label label, VectorField field, Vec equilibrium, double decay_rate,
                     ClassKFn alpha, ClassKFn beta, Mat weight)
    : label_(std::move(label)),
      field_(std::move(field)),
      equilibrium_(std::move(equilibrium)),
      decay_rate_(decay_rate),
      alpha_(alpha),
      beta_(beta) {
  if (!field_) throw Error(ErrorKind::InvalidArgument, "empty field");
  const auto n = equilibrium_.size();
  if (weight.rows() != n || weight.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "lyapunov weight must be n x n");
  }
  if (!weight.isApprox(weight.transpose(), 1e-12) || weight.llt().info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "lyapunov weight must be symmetric positive definite");
  }
  identity_quadratic_ = weight.isIdentity(0.0) && alpha == ClassKFn::square() &&
                        beta == ClassKFn::square();
  weight_ = std::move(weight);
  validate();
}

void Subsystem::validate() const {
  if (label_.empty()) throw Error(ErrorKind::InvalidArgument, "empty subsystem label");
  if (equilibrium_.size() == 0) throw Error(ErrorKind::InvalidArgument, "zero-dimensional state");
  if (!(decay_rate_ > 0.0) || !std::isfinite(decay_rate_)) {
    throw Error(ErrorKind::InvalidArgument, "decay rate of '" + label_ + "' must be positive");
  }
  const Vec f0 = field(equilibrium_);
  if (f0.size() != equilibrium_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "field of '" + label_ + "' changes dimension");
  }
  if (f0.norm() > 1e-9) {
    throw Error(ErrorKind::InvalidArgument,
                "equilibrium of '" + label_ + "' is not a zero of its field");
  }
  if (std::abs(lyapunov(equilibrium_)) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "V(x_u) != 0 for '" + label_ + "'");
  }
  for (int e = -6; e <= 6; ++e) {
    const double s = std::pow(10.0, e);
    if (alpha_.eval(s) > beta_.eval(s) * (1.0 + 1e-12)) {
      throw Error(ErrorKind::InvalidArgument, "alpha > beta for '" + label_ + "'");
    }
  }
}

Vec Subsystem::field(const Vec& x) const {
  if (x.size() != equilibrium_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension mismatch");
  }
  if (affine_) return affine_->A * x + affine_->b;
  return field_(x);
}

double Subsystem::lyapunov(const Vec& x) const {
  if (x.size() != equilibrium_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension mismatch");
  }
  if (weight_) {
    const Vec d = x - equilibrium_;
    if (identity_quadratic_) return d.squaredNorm();
    return d.dot(*weight_ * d);
  }
  return lyapunov_(x);
}

Subsystem Subsystem::with_decay_rate(double k) const {
  Subsystem copy = *this;
  copy.decay_rate_ = k;
  copy.validate();
  return copy;
}

namespace {

Vec affine_equilibrium(const Mat& A, const Vec& b) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "A must be n x n and b of length n");
  }
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularMatrix, "A is not invertible");
  return lu.solve(-b);
}

}  // namespace

Subsystem make_affine_subsystem(const Mat& A, const Vec& b, Label label) {
  Vec eq = affine_equilibrium(A, b);
  const Mat sym = A + A.transpose();
  const double lambda_max = Eigen::SelfAdjointEigenSolver<Mat>(sym).eigenvalues().maxCoeff();
  if (lambda_max >= 0.0) {
    throw Error(ErrorKind::NotContracting, "symmetric part of A is not negative definite");
  }
  Subsystem s;
  s.label_ = std::move(label);
  s.affine_ = AffineDynamics{A, b};
  s.field_ = [A, b](const Vec& x) -> Vec { return A * x + b; };
  s.equilibrium_ = std::move(eq);
  s.decay_rate_ = -lambda_max;
  s.weight_ = Mat::Identity(A.rows(), A.cols());
  s.identity_quadratic_ = true;
  s.validate();
  return s;
}

Subsystem make_affine_subsystem(const Mat& A, const Vec& b, Label label, const Mat& weight,
                                ClassKFn alpha, ClassKFn beta) {
  Vec eq = affine_equilibrium(A, b);
  const auto n = A.rows();
  if (weight.rows() != n || weight.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "lyapunov weight must be n x n");
  }
  if (!weight.isApprox(weight.transpose(), 1e-12) || weight.llt().info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "lyapunov weight must be symmetric positive definite");
  }
  const Mat lhs = A.transpose() * weight + weight * A;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> pencil(lhs, weight);
  const double lambda_max = pencil.eigenvalues().maxCoeff();
  if (lambda_max >= 0.0) {
    throw Error(ErrorKind::NotContracting, "A^T P + P A is not negative definite");
  }
  Subsystem s;
  s.label_ = std::move(label);
  s.affine_ = AffineDynamics{A, b};
  s.field_ = [A, b](const Vec& x) -> Vec { return A * x + b; };
  s.equilibrium_ = std::move(eq);
  s.decay_rate_ = -lambda_max;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.identity_quadratic_ = weight.isIdentity(0.0) && alpha == ClassKFn::square() &&
                          beta == ClassKFn::square();
  s.weight_ = weight;
  s.validate();
  return s;
}

// ---------------------------------------------------------------- SwitchedSystem

SwitchedSystem::SwitchedSystem(std::vector<Subsystem> subsystems)
    : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw Error(ErrorKind::InvalidArgument, "no subsystems");
  dimension_ = subsystems_.front().dimension();
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    const auto& s = subsystems_[i];
    if (s.dimension() != dimension_) {
      throw Error(ErrorKind::DimensionMismatch, "subsystem '" + s.label() + "' has dimension " +
                                                    std::to_string(s.dimension()));
    }
    if (!index_.emplace(s.label(), i).second) {
      throw Error(ErrorKind::DuplicateLabel, "label '" + s.label() + "' appears twice");
    }
  }
}

const Subsystem& SwitchedSystem::at(const Label& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) throw Error(ErrorKind::UnknownLabel, "no subsystem '" + label + "'");
  return subsystems_[it->second];
}

// ---------------------------------------------------------------- SwitchingSignal

SwitchingSignal::SwitchingSignal(double t0, Label initial_mode, std::vector<SwitchPoint> segments,
                                 std::optional<double> period)
    : t0_(t0),
      initial_mode_(std::move(initial_mode)),
      segments_(std::move(segments)),
      period_(period) {
  if (!std::isfinite(t0_)) throw Error(ErrorKind::InvalidSignal, "t0 must be finite");
  if (initial_mode_.empty()) throw Error(ErrorKind::InvalidSignal, "empty initial mode");
  double prev = t0_;
  for (const auto& seg : segments_) {
    if (!std::isfinite(seg.time) || !(seg.time > prev)) {
      throw Error(ErrorKind::InvalidSignal, "switch times must be finite, > t0 and increasing");
    }
    if (seg.mode.empty()) throw Error(ErrorKind::InvalidSignal, "empty mode label");
    prev = seg.time;
  }
  if (period_) {
    if (!(*period_ > 0.0) || !std::isfinite(*period_)) {
      throw Error(ErrorKind::InvalidSignal, "period must be positive");
    }
    if (!(t0_ + *period_ > prev)) {
      throw Error(ErrorKind::InvalidSignal, "period must exceed the last switch offset");
    }
  }
}

double SwitchingSignal::switch_time(std::size_t period_index, std::size_t slot) const {
  const double base = t0_ + static_cast<double>(period_index) * period_.value_or(0.0);
  if (slot == segments_.size()) return t0_ + static_cast<double>(period_index + 1) * *period_;
  return base + (segments_[slot].time - t0_);
}

SignalSwitch SwitchingSignal::nth_switch(std::size_t q) const {
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "switch indices start at 1");
  if (!period_) {
    if (q > segments_.size()) throw Error(ErrorKind::InvalidArgument, "signal has fewer switches");
    const Label& from = q == 1 ? initial_mode_ : segments_[q - 2].mode;
    return {q, segments_[q - 1].time, from, segments_[q - 1].mode};
  }
  const std::size_t per = switches_per_period();
  const std::size_t j = (q - 1) / per;
  const std::size_t slot = (q - 1) % per;
  const Label& to = slot == segments_.size() ? initial_mode_ : segments_[slot].mode;
  const Label& from = slot == 0 ? initial_mode_ : segments_[slot - 1].mode;
  return {q, switch_time(j, slot), from, to};
}

std::vector<SignalSwitch> SwitchingSignal::switches_until(double horizon) const {
  std::vector<SignalSwitch> out;
  if (!period_) {
    for (std::size_t q = 1; q <= segments_.size() && segments_[q - 1].time <= horizon; ++q) {
      out.push_back(nth_switch(q));
    }
    return out;
  }
  const double periods = (horizon - t0_) / *period_;
  if (periods > 1e7) throw Error(ErrorKind::InvalidArgument, "horizon spans too many periods");
  for (std::size_t q = 1;; ++q) {
    auto sw = nth_switch(q);
    if (sw.time > horizon) break;
    out.push_back(std::move(sw));
  }
  return out;
}

std::size_t SwitchingSignal::period_of(double t) const {
  auto j = static_cast<std::size_t>(std::max(0.0, std::floor((t - t0_) / *period_)));
  // Align with the exact boundary values produced by switch_time().
  while (j > 0 && t < t0_ + static_cast<double>(j) * *period_) --j;
  while (t >= t0_ + static_cast<double>(j + 1) * *period_) ++j;
  return j;
}

const Label& SwitchingSignal::mode_at(double t) const {
  if (t < t0_) throw Error(ErrorKind::InvalidArgument, "query time precedes t0");
  if (!period_) {
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                     [](double v, const SwitchPoint& s) { return v < s.time; });
    return it == segments_.begin() ? initial_mode_ : std::prev(it)->mode;
  }
  const std::size_t j = period_of(t);
  const Label* mode = &initial_mode_;
  for (std::size_t slot = 0; slot < segments_.size(); ++slot) {
    if (t >= switch_time(j, slot)) mode = &segments_[slot].mode;
  }
  return *mode;
}

const Label& SwitchingSignal::driving_mode(double t) const {
  if (t < t0_) throw Error(ErrorKind::InvalidArgument, "query time precedes t0");
  if (!period_) {
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                     [](double v, const SwitchPoint& s) { return v < s.time; });
    if (it != segments_.end()) return it->mode;
    return segments_.empty() ? initial_mode_ : segments_.back().mode;
  }
  const std::size_t j = period_of(t);
  for (std::size_t slot = 0; slot < segments_.size(); ++slot) {
    if (switch_time(j, slot) > t) return segments_[slot].mode;
  }
  return initial_mode_;
}

void SwitchingSignal::check_labels(const SwitchedSystem& system) const {
  if (!system.contains(initial_mode_)) {
    throw Error(ErrorKind::UnknownLabel, "signal references unknown mode '" + initial_mode_ + "'");
  }
  for (const auto& seg : segments_) {
    if (!system.contains(seg.mode)) {
      throw Error(ErrorKind::UnknownLabel, "signal references unknown mode '" + seg.mode + "'");
    }
  }
}

SwitchingSignal signal_from_dwell(const Label& initial_mode, const std::vector<Label>& transitions,
                                  const std::vector<double>& dwell, double t0, bool periodic) {
  if (transitions.empty()) {
    if (periodic) throw Error(ErrorKind::EmptyTransitions, "periodic signal needs transitions");
    return SwitchingSignal::constant(initial_mode, t0);
  }
  const std::size_t intervals = transitions.size() + (periodic ? 1 : 0);
  if (dwell.size() != 1 && dwell.size() != intervals) {
    throw Error(ErrorKind::InvalidArgument, "expected 1 or " + std::to_string(intervals) +
                                                " dwell values, got " +
                                                std::to_string(dwell.size()));
  }
  for (double d : dwell) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::NonpositiveDwell, "dwell values must be positive");
    }
  }
  auto dwell_of = [&](std::size_t i) { return dwell.size() == 1 ? dwell.front() : dwell[i]; };
  std::vector<SwitchPoint> segments;
  segments.reserve(transitions.size());
  double t = t0;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    t += dwell_of(i);
    segments.push_back({t, transitions[i]});
  }
  std::optional<double> period;
  if (periodic) period = (t + dwell_of(transitions.size())) - t0;
  return {t0, initial_mode, std::move(segments), period};
}

std::vector<DwellViolation> validate_dwell(const SwitchingSignal& signal,
                                           const DwellRequirement& required) {
  std::vector<DwellViolation> out;
  const std::size_t count =
      signal.is_periodic() ? signal.switches_per_period() : signal.segments().size();
  double prev = signal.t0();
  for (std::size_t q = 1; q <= count; ++q) {
    const auto sw = signal.nth_switch(q);
    const double gap = sw.time - prev;
    const double need = required(sw.from, sw.to);
    if (gap < need) out.push_back({q, sw.from, sw.to, gap, need});
    prev = sw.time;
  }
  return out;
}

}  // namespace swd
