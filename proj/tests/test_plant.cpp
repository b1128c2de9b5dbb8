#include "sr3t/error.hpp"
#include "sr3t/plant.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sr3t;
using namespace sr3t::plant;

TEST_SUITE("plant") {

TEST_CASE("counts per output revolution") {
	MotorAxis a;
	CHECK(counts_per_output_rev(a) == 16384);
	a.quadrature = 1;
	CHECK(counts_per_output_rev(a) == 4096);
	a.gear_ratio = 1;
	CHECK(counts_per_output_rev(a) == 256);
}

TEST_CASE("encoder counts") {
	const MotorAxis a;
	CHECK(encoder_counts(0, a) == 0);
	CHECK(encoder_counts(360, a) == 16384);
	CHECK(encoder_counts(90, a) == 4096);
	CHECK(encoder_counts(-90, a) == -4096);
	std::mt19937_64 rng(1);
	std::uniform_real_distribution<double> ang(-720, 720);
	for (int i = 0; i < 1000; ++i) {
		const double t = ang(rng);
		CHECK(encoder_counts(t, a) == std::llround(t * 16384.0 / 360.0));
	}
}

TEST_CASE("converged axis stays put") {
	const MotorAxis a;
	AxisState s{10.0, 0.0, encoder_counts(10.0, a)};
	const auto next = axis_step(s, {AxisMode::position, double(s.encoder_count), 100.0}, 1.0, a);
	CHECK(next.encoder_count == s.encoder_count);
	CHECK(next.velocity == 0);
}

TEST_CASE("position mode slews at the velocity limit") {
	MotorAxis a;
	a.a_max = 1e12;
	const auto s = axis_step({}, {AxisMode::position, 1000.0, 90.0}, 100.0, a);
	CHECK(s.angle == doctest::Approx(9.0).epsilon(1e-6));
	CHECK(s.encoder_count == 410); // 9 * 16384 / 360 = 409.6
}

TEST_CASE("velocity mode is rate limited") {
	MotorAxis a;
	a.a_max = 500;
	const auto s = axis_step({}, {AxisMode::velocity, 50.0, 0.0}, 20.0, a);
	CHECK(s.velocity == doctest::Approx(10.0));
	CHECK(s.angle == doctest::Approx(0.5 * 500 * 0.02 * 0.02));
}

TEST_CASE("two half steps equal one full step at constant velocity") {
	const MotorAxis a;
	const AxisState start{0.0, 200.0, 0};
	const AxisCommand cmd{AxisMode::position, 100000.0, 200.0};
	const auto twice = axis_step(axis_step(start, cmd, 5.0, a), cmd, 5.0, a);
	const auto once = axis_step(start, cmd, 10.0, a);
	CHECK(twice.angle == doctest::Approx(once.angle).epsilon(1e-12));
	CHECK(twice.velocity == doctest::Approx(once.velocity));
	CHECK(twice.encoder_count == once.encoder_count);
}

TEST_CASE("encoder never drifts and position mode converges exactly") {
	const MotorAxis a;
	std::mt19937_64 rng(9);
	std::uniform_int_distribution<int> target(-8000, 8000);
	std::uniform_real_distribution<double> vel(50.0, 1800.0);
	for (int trial = 0; trial < 50; ++trial) {
		AxisState s;
		const AxisCommand cmd{AxisMode::position, double(target(rng)), vel(rng)};
		int steps = 0;
		while (s.encoder_count != static_cast<std::int64_t>(cmd.setpoint) || s.velocity != 0.0) {
			s = axis_step(s, cmd, 1.0, a);
			CHECK(s.encoder_count == encoder_counts(s.angle, a));
			REQUIRE(++steps < 20000);
		}
		CHECK(s.angle == doctest::Approx(cmd.setpoint * 360.0 / 16384.0));
	}
}

TEST_CASE("position mode never overshoots") {
	const MotorAxis a;
	AxisState s;
	const AxisCommand cmd{AxisMode::position, 500.0, 1800.0};
	for (int i = 0; i < 50; ++i) {
		s = axis_step(s, cmd, 1.0, a);
		CHECK(s.encoder_count <= 500);
	}
	CHECK(s.encoder_count == 500);
}

TEST_CASE("profile crossings") {
	MotorAxis a;
	a.a_max = 1000;
	const auto r = axis_step_profiled({0.0, 0.0, 0}, {AxisMode::velocity, 100.0, 0.0}, 100.0, a);
	// accelerates at 1000 deg/s^2 for 100 ms, reaching 5 deg at t = 100
	const auto c = r.profile.crossings(1.25);
	REQUIRE(c.size() == 1);
	CHECK(c[0].rising);
	CHECK(c[0].t == doctest::Approx(50.0));
	CHECK(c[0].velocity == doctest::Approx(50.0));
	CHECK(r.profile.angle_at(100.0) == doctest::Approx(r.state.angle));
	CHECK(r.profile.crossings(10.0).empty());
}

TEST_CASE("torque margin") {
	const MotorAxis a;
	CHECK(torque_margin(0.041125, a) == doctest::Approx(3.8906).epsilon(1e-4));
	CHECK(torque_margin(0.16, a) == doctest::Approx(1.0));
	MotorAxis weak;
	weak.nominal_torque = 0.00257;
	CHECK(torque_margin(0.04113, weak) == doctest::Approx(1.0).epsilon(0.01));
	CHECK_THROWS_AS(torque_margin(0, a), InputError);
}

TEST_CASE("axis validation") {
	MotorAxis a;
	a.encoder_cpr = 0;
	CHECK_THROWS_AS(validate(a), ConfigError);
	a = {};
	a.a_max = -1;
	CHECK_THROWS_AS(validate(a, "axis_vertical"), ConfigError);
}

} // TEST_SUITE
