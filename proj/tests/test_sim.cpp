#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "swd/dwell.hpp"
#include "swd/sampling.hpp"
#include "swd/sim.hpp"

using namespace swd;
using namespace swd::test::oracle;
using swd::test::rel_diff;
using swd::test::vec2;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an swd::Error");
  return ErrorKind::IoError;
}

Vec sharpness_start() { return vec2(kSharpX, 1.0 + kSharpX); }

}  // namespace

TEST_SUITE("sim.integrate") {

TEST_CASE("sim.integrate.equilibrium_is_fixed") {
  const auto sub = test::example_system().at("u1");
  const auto traj = integrate(sub, vec2(0.0, 1.0), 0.0, 2.0);
  for (const auto& s : traj.samples) CHECK((s.x - vec2(0.0, 1.0)).norm() < 1e-15);
}

TEST_CASE("sim.integrate.scalar_exponential") {
  const auto sub = make_affine_subsystem(Mat::Constant(1, 1, -1.0), Vec::Zero(1), "d");
  const auto traj = integrate(sub, Vec::Ones(1), 0.0, 1.0);
  CHECK(traj.samples.back().t == 1.0);
  CHECK(std::abs(traj.final_state()[0] - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(traj.final_state()[0] - 0.36787944117144233) < 1e-10);
}

TEST_CASE("sim.integrate.matches_matrix_exponential") {
  const auto sub = test::example_system().at("u1");
  const auto traj = integrate(sub, vec2(1.0, 1.0), 0.0, 1.0);
  CHECK(test::max_deviation(sub, traj) <= 1e-8);
}

TEST_CASE("sim.integrate.fourth_order_convergence") {
  const auto sub = test::example_system().at("u3");
  const Vec x0 = vec2(2.5, -1.5);
  const double coarse = test::max_deviation(sub, integrate(sub, x0, 0.0, 3.0, 0.04));
  const double fine = test::max_deviation(sub, integrate(sub, x0, 0.0, 3.0, 0.02));
  CHECK(coarse / fine > 12.0);
  CHECK(coarse / fine < 20.0);
}

TEST_CASE("sim.integrate.lands_exactly_on_the_end") {
  const auto sub = test::example_system().at("u2");
  const auto traj = integrate(sub, vec2(1.0, 0.0), 0.25, 0.2605, 1e-3);
  CHECK(traj.samples.front().t == 0.25);
  CHECK(traj.samples.back().t == 0.2605);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  }
  CHECK(traj.samples.size() == 12);
}

TEST_CASE("sim.integrate.nonfinite_state") {
  const VectorField blowup = [](const Vec& x) -> Vec { return x.array().square() * 1e300; };
  const VectorField decay = [](const Vec& x) -> Vec { return -x; };
  const ScalarField v = [](const Vec& x) { return x.squaredNorm(); };
  // The field is only consulted away from the origin, so validation passes.
  const Subsystem sub("b", [&](const Vec& x) -> Vec { return x.norm() > 0.0 ? blowup(x) : decay(x); },
                      Vec::Zero(1), 2.0, ClassKFn::square(), ClassKFn::square(), v);
  CHECK(kind_of([&] { (void)integrate(sub, Vec::Constant(1, 1e10), 0.0, 1.0); }) ==
        ErrorKind::NonfiniteState);
}

TEST_CASE("sim.integrate.bad_arguments") {
  const auto sub = test::example_system().at("u2");
  CHECK(kind_of([&] { (void)integrate(sub, vec2(0.0, 0.0), 1.0, 0.0); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)integrate(sub, vec2(0.0, 0.0), 0.0, 1.0, 0.0); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)integrate(sub, Vec::Zero(3), 0.0, 1.0); }) ==
        ErrorKind::DimensionMismatch);
}

}

TEST_SUITE("sim.switched") {

TEST_CASE("sim.switched.switch_instants_are_samples") {
  const auto sys = test::example_system();
  const auto traj = simulate_switched(sys, test::ci_signal(), vec2(0.0, 1.0), 4.0);
  REQUIRE(traj.switch_events.size() == 2);
  CHECK(traj.switch_events[0].t == 1.43);
  CHECK(traj.switch_events[1].t == 2.86);
  CHECK(traj.switch_events[0].prev_mode == "u1");
  CHECK(traj.switch_events[0].next_mode == "u2");
  for (const auto& e : traj.switch_events) CHECK(traj.state_at(e.t) == e.x);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  }
  CHECK(traj.samples.back().t == 4.0);
  CHECK(traj.samples.front().mode == "u1");
  CHECK(traj.samples.back().mode == "u3");
}

TEST_CASE("sim.switched.each_interval_follows_its_driving_mode") {
  const auto sys = test::example_system();
  const Vec x0 = vec2(0.1, 0.9);
  const auto traj = simulate_switched(sys, test::ci_signal(), x0, 4.0);
  const Vec at_t = test::exact_affine(sys.at("u2"), x0, 1.43);
  const Vec at_2t = test::exact_affine(sys.at("u3"), at_t, 1.43);
  const Vec at_end = test::exact_affine(sys.at("u3"), at_2t, 4.0 - 2.86);
  CHECK((traj.switch_events[0].x - at_t).norm() < 1e-10);
  CHECK((traj.switch_events[1].x - at_2t).norm() < 1e-10);
  CHECK((traj.final_state() - at_end).norm() < 1e-10);
}

TEST_CASE("sim.switched.constant_signal_at_equilibrium") {
  const auto sys = test::example_system();
  const auto traj =
      simulate_switched(sys, SwitchingSignal::constant("u2"), vec2(-0.5, 0.5), 2.0);
  CHECK(traj.switch_events.empty());
  for (const auto& s : traj.samples) CHECK((s.x - vec2(-0.5, 0.5)).norm() < 1e-15);
}

TEST_CASE("sim.switched.periodic_signal_stays_bounded") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(1.43);
  const auto traj = simulate_switched(sys, signal, vec2(-0.5, 0.5), 5.0 * *signal.period());
  CHECK(traj.switch_events.size() == 20);
  for (const auto& s : traj.samples) {
    CHECK(s.x[0] >= -1.5);
    CHECK(s.x[0] <= 0.5);
    CHECK(s.x[1] >= -0.5);
    CHECK(s.x[1] <= 1.5);
  }
}

TEST_CASE("sim.switched.batch_preserves_order") {
  const auto sys = test::example_system();
  const auto signal = test::ci_signal();
  std::vector<Vec> starts;
  for (int i = 0; i < 7; ++i) starts.push_back(vec2(0.1 * i, 1.0 - 0.05 * i));
  const auto batch = simulate_batch(sys, signal, starts, 3.0);
  REQUIRE(batch.size() == starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto single = simulate_switched(sys, signal, starts[i], 3.0);
    CHECK(batch[i].final_state() == single.final_state());
    CHECK(batch[i].samples.size() == single.samples.size());
  }
}

TEST_CASE("sim.switched.errors") {
  const auto sys = test::example_system();
  const auto unknown = signal_from_dwell("u1", {"zz"}, {1.0}, 0.0, false);
  CHECK(kind_of([&] { (void)simulate_switched(sys, unknown, vec2(0.0, 0.0), 2.0); }) ==
        ErrorKind::UnknownLabel);
  CHECK(kind_of([&] { (void)simulate_switched(sys, test::ci_signal(), vec2(0.0, 0.0), 0.0); }) ==
        ErrorKind::InvalidArgument);
}

}

TEST_SUITE("sim.trapping") {

TEST_CASE("sim.trapping.center_start") {
  const auto sys = test::example_system();
  const auto signal = test::ci_signal();
  const auto traj = simulate_switched(sys, signal, vec2(0.0, 1.0), 4.29);
  const auto report = verify_trapping(traj, sys, signal, 0.05);
  CHECK(report.overall_pass);
  REQUIRE(report.records.size() == 2);
  CHECK(report.records[0].mode == "u2");
  CHECK(report.records[1].mode == "u3");
  CHECK(report.records[0].value <= 0.05);
  CHECK(report.initial.member);
}

TEST_CASE("sim.trapping.boundary_starts") {
  const auto sys = test::example_system();
  const auto signal = test::ci_signal();
  const auto starts = region_boundary_points(sys.at("u1"), 0.05, 16);
  double worst = 0.0;
  for (const auto& traj : simulate_batch(sys, signal, starts, 4.29)) {
    const auto report = verify_trapping(traj, sys, signal, 0.05);
    CHECK(report.overall_pass);
    for (const auto& r : report.records) worst = std::max(worst, r.value);
  }
  CHECK(worst == doctest::Approx(0.049607790267309715).epsilon(1e-9));
}

TEST_CASE("sim.trapping.sharpness") {
  const auto sys = test::example_system();
  const auto signal = test::ci_signal();
  const auto traj = simulate_switched(sys, signal, sharpness_start(), 4.29);
  const auto report = verify_trapping(traj, sys, signal, 0.05);
  CHECK_FALSE(report.initial.member);
  CHECK_FALSE(report.overall_pass);
  REQUIRE(report.records.size() == 2);
  CHECK_FALSE(report.records[0].member);
  CHECK(report.records[1].member);
  CHECK(rel_diff(report.records[0].value, kSharpVAtT) < 1e-9);
  CHECK(rel_diff(report.records[1].value, kSharpVAt2T) < 1e-9);
}

TEST_CASE("sim.trapping.overall_pass_iff_all_members") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(0.6);
  const HaltonSampler sampler(2, 5);
  for (std::size_t i = 0; i < 12; ++i) {
    const Vec x0 = sampler.point_in(Box::cube(2, -2.0, 2.0), i);
    const auto traj = simulate_switched(sys, signal, x0, 12.0);
    const auto report = verify_trapping(traj, sys, signal, 0.05);
    bool all = true;
    for (const auto& r : report.records) {
      all = all && r.member;
      CHECK(r.value == doctest::Approx(v_eval(sys.at(r.mode), traj.state_at(r.t))));
    }
    CHECK(report.overall_pass == all);
  }
}

TEST_CASE("sim.trapping.transient_skips_early_switches") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(1.43);
  const double period = *signal.period();
  const auto traj = simulate_switched(sys, signal, vec2(-0.5, 0.5), 5.0 * period);
  const auto report = verify_trapping(traj, sys, signal, 0.05, {period, kMembershipTolerance});
  CHECK(report.records.size() == 17);
  CHECK(report.overall_pass);
  for (const auto& r : report.records) CHECK(r.value <= 0.05 + 1e-6);
}

TEST_CASE("sim.trapping.signal_mismatch") {
  const auto sys = test::example_system();
  // Both signals agree up to t = 4.29, where only the periodic one switches again.
  const auto traj = simulate_switched(sys, test::ci_signal(1.43), vec2(0.0, 1.0), 5.0);
  CHECK(kind_of([&] { (void)verify_trapping(traj, sys, test::ci_signal(1.5), 0.05); }) ==
        ErrorKind::SignalMismatch);
  CHECK(kind_of([&] { (void)w_monitor(traj, sys, test::four_period_signal(1.43)); }) ==
        ErrorKind::SignalMismatch);
}

}

TEST_SUITE("sim.monitor") {

TEST_CASE("sim.monitor.nonincreasing_on_every_interval") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(2.1);
  const auto traj = simulate_switched(sys, signal, vec2(5.0, 5.0), 6.0 * *signal.period());
  const auto verdicts = w_monitor(traj, sys, signal);
  // The horizon falls on the 24th switch, so there is no trailing interval.
  CHECK(traj.switch_events.size() == 24);
  CHECK(verdicts.size() == 24);
  for (const auto& v : verdicts) {
    CHECK(v.nonincreasing);
    CHECK(v.max_relative_increase <= kMonotoneTolerance);
    CHECK(v.mode == signal.driving_mode(v.t_start));
  }
}

TEST_CASE("sim.monitor.overclaimed_rate_increases") {
  const auto base = test::example_system();
  std::vector<Subsystem> subs;
  for (const auto& s : base.subsystems()) subs.push_back(s.with_decay_rate(2.5));
  const SwitchedSystem sys(std::move(subs));
  const auto signal = test::ci_signal();
  const auto traj = simulate_switched(sys, signal, vec2(3.0, 3.0), 4.0);
  const auto verdicts = w_monitor(traj, sys, signal);
  for (const auto& v : verdicts) {
    CHECK_FALSE(v.nonincreasing);
    CHECK(v.max_relative_increase > 1e-4);
  }
}

}

TEST_SUITE("sim.convergence") {

TEST_CASE("sim.convergence.global_signal") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(2.1);
  const auto traj = simulate_switched(sys, signal, vec2(5.0, 5.0), 6.0 * 8.4);
  const auto report = convergence_product(sys, signal, traj, 0.05, 20);
  CHECK(report.products_decreasing);
  CHECK(report.certified);
  CHECK_FALSE(report.sampled_mu);
  REQUIRE(report.entry_index);
  CHECK(*report.entry_index == 2);
  REQUIRE(report.terms.size() == 20);
  for (const auto& t : report.terms) {
    CHECK(rel_diff(t.mu, kPairMu) < 1e-13);
    CHECK(std::isfinite(t.log_product));
  }
  // ln P_0 = ln mu - 2 * 2.1
  CHECK(report.terms[0].log_product == doctest::Approx(std::log(kPairMu) - 4.2).epsilon(1e-12));
  const double step = report.terms[1].log_product - report.terms[0].log_product;
  CHECK(std::exp(step) == doctest::Approx(kPairMu * std::exp(-4.2)).epsilon(1e-12));
}

TEST_CASE("sim.convergence.entry_index_consistent_with_membership") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(2.1);
  const HaltonSampler sampler(2, 13);
  for (std::size_t i = 0; i < 8; ++i) {
    const Vec x0 = sampler.point_in(Box::cube(2, -6.0, 6.0), i);
    const auto traj = simulate_switched(sys, signal, x0, 3.0 * 8.4);
    const auto report = convergence_product(sys, signal, traj, 0.05, 10);
    REQUIRE(report.entry_index);
    for (const auto& e : traj.switch_events) {
      if (e.index >= *report.entry_index) break;
      CHECK_FALSE(in_region(sys.at(e.next_mode), 0.05, e.x));
    }
    const auto& hit = traj.switch_events[*report.entry_index - 1];
    CHECK(in_region(sys.at(hit.next_mode), 0.05, hit.x));
  }
}

TEST_CASE("sim.convergence.short_gaps_are_not_certified") {
  const auto sys = test::example_system();
  const auto signal = test::four_period_signal(1.0);
  const auto traj = simulate_switched(sys, signal, vec2(5.0, 5.0), 20.0);
  const auto report = convergence_product(sys, signal, traj, 0.05, 10);
  CHECK_FALSE(report.products_decreasing);  // mu e^{-2} > 1
  CHECK_FALSE(report.certified);
}

TEST_CASE("sim.convergence.weighted_certificates_use_sampled_mu") {
  const Mat P = (Mat(2, 2) << 2.0, 0.0, 0.0, 1.0).finished();
  std::vector<Subsystem> subs;
  const double us[] = {1.0, 0.0, -1.0};
  const char* labels[] = {"u1", "u2", "u3"};
  for (int i = 0; i < 3; ++i) {
    subs.push_back(make_affine_subsystem(test::example_matrix(), vec2(us[i], 1.0), labels[i], P,
                                         ClassKFn(1.0, 2.0), ClassKFn(2.0, 2.0)));
  }
  const SwitchedSystem sys(std::move(subs));
  const auto signal = test::four_period_signal(3.0);
  const auto traj = simulate_switched(sys, signal, vec2(4.0, -4.0), 3.0 * 12.0);
  const auto report = convergence_product(sys, signal, traj, 0.05, 8);
  CHECK(report.sampled_mu);
  for (const auto& t : report.terms) CHECK(t.mu >= 1.0);
}

TEST_CASE("sim.convergence.insufficient_switches") {
  const auto sys = test::example_system();
  const auto signal = test::ci_signal();
  const auto traj = simulate_switched(sys, signal, vec2(5.0, 5.0), 4.0);
  CHECK(kind_of([&] { (void)convergence_product(sys, signal, traj, 0.05, 3); }) ==
        ErrorKind::InsufficientSwitches);
}

}

TEST_SUITE("sim.tube") {

TEST_CASE("sim.tube.lands_inside_target_at_dwell_time") {
  const auto sys = test::example_system();
  const double T = pairwise_dwell(0.05, sys.at("u1"), sys.at("u2"));
  const std::vector<double> grid{0.0, 0.5 * T, T};
  const auto tube = tube_sample(sys, "u1", "u2", 0.05, grid, 360);
  REQUIRE(tube.size() == 3);
  for (const auto& p : tube[0].points) {
    CHECK(v_eval(sys.at("u1"), p) == doctest::Approx(0.05).epsilon(1e-12));
  }
  REQUIRE(tube[2].points.size() == 360);
  for (const auto& p : tube[2].points) CHECK(v_eval(sys.at("u2"), p) <= 0.05 + 1e-6);
}

TEST_CASE("sim.tube.matches_closed_form_flow") {
  const auto sys = test::example_system();
  const std::vector<double> grid{0.3, 1.1};
  const auto tube = tube_sample(sys, "u1", "u3", 0.05, grid, 24);
  const auto starts = region_boundary_points(sys.at("u1"), 0.05, 24);
  for (std::size_t j = 0; j < 24; ++j) {
    CHECK((tube[1].points[j] - test::exact_affine(sys.at("u3"), starts[j], 1.1)).norm() < 1e-9);
  }
}

TEST_CASE("sim.tube.grid_validation") {
  const auto sys = test::example_system();
  CHECK(kind_of([&] {
          (void)tube_sample(sys, "u1", "u2", 0.05, std::vector<double>{0.5, 0.5}, 12);
        }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] {
          (void)tube_sample(sys, "u1", "u2", 0.05, std::vector<double>{-1.0}, 12);
        }) == ErrorKind::InvalidArgument);
}

}
