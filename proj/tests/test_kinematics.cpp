#include "oracles.hpp"

#include "sr3t/error.hpp"
#include "sr3t/kinematics.hpp"

#include <doctest.h>

#include <random>

using namespace sr3t;
using namespace sr3t::kinematics;

TEST_SUITE("kinematics") {

TEST_CASE("fingertip position examples") {
	const FingerGeometry g;
	auto p = fingertip_position({0, 0}, g);
	CHECK(p.x == doctest::Approx(123.25));
	CHECK(p.y == doctest::Approx(0).epsilon(1e-12));
	CHECK(p.z == doctest::Approx(-42.0022).epsilon(1e-5));

	p = fingertip_position({90, 0}, g);
	CHECK(p.x == doctest::Approx(0).scale(1));
	CHECK(p.y == doctest::Approx(123.25));
	CHECK(p.z == doctest::Approx(-42.0022).epsilon(1e-5));

	p = fingertip_position({0, 30}, g);
	CHECK(p.x == doctest::Approx(91.2295).epsilon(1e-5));
	CHECK(p.z == doctest::Approx(-77.5));

	CHECK_THROWS_AS(fingertip_position({0, 31}, g), InputError);
	CHECK_THROWS_AS(fingertip_position({181, 0}, g), InputError);
}

TEST_CASE("chain matches an independent link walk") {
	const FingerGeometry g;
	const oracle::Chain c;
	for (double tv = -90; tv <= 30; tv += 0.5) {
		CHECK(tip_radius(tv, g) == doctest::Approx(c.reach(tv)));
		CHECK(tip_drop(tv, g) == doctest::Approx(c.drop(tv)));
	}
}

TEST_CASE("radius does not depend on theta_h") {
	const FingerGeometry g;
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> th(-180, 180), tv(-90, 30);
	for (int i = 0; i < 2000; ++i) {
		const double v = tv(rng);
		const auto p = fingertip_position({th(rng), v}, g);
		CHECK(std::hypot(p.x, p.y) == doctest::Approx(tip_radius(v, g)));
	}
}

TEST_CASE("drop is strictly increasing over the press range") {
	const FingerGeometry g;
	double prev = tip_drop(-60.0, g);
	for (double tv = -59.9; tv <= 30.0; tv += 0.1) {
		const double d = tip_drop(tv, g);
		CHECK(d > prev);
		prev = d;
	}
}

TEST_CASE("theta_for_key examples") {
	const FingerGeometry g;
	const MountPose m;
	CHECK(theta_for_key(m.base_x + 123.25, m, g) == doctest::Approx(0).scale(1));
	CHECK(theta_for_key(m.base_x, m, g) == doctest::Approx(90));
	CHECK_THROWS_AS(theta_for_key(m.base_x + 150, m, g), ReachError);
	try {
		theta_for_key(m.base_x + 150, m, g);
	} catch (const ReachError& e) {
		CHECK(e.max_reachable_x() == doctest::Approx(m.base_x + 123.25));
	}
}

TEST_CASE("theta_for_key round-trips key-line positions") {
	const FingerGeometry g;
	MountPose m;
	m.heading = 7.5;
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> x(m.base_x - 123.0, m.base_x + 123.0);
	for (int i = 0; i < 2000; ++i) {
		const double xi = x(rng);
		const double th = theta_for_key(xi, m, g);
		const auto tip = tip_on_keyboard({th, 0}, g, m);
		CHECK(std::abs(tip.x - xi) < 1e-9);
		CHECK(tip.y - m.base_depth >= -1e-9); // keyboard-facing side
	}
}

TEST_CASE("press angle against a bisection oracle") {
	const FingerGeometry g;
	const oracle::Chain c;
	CHECK(press_angle(0.0, g) == doctest::Approx(0).scale(1));
	// Bisection gives 7.2169 deg for 10 mm
	const double ref = oracle::press_angle_bisect(10.0, c);
	CHECK(ref == doctest::Approx(7.21692).epsilon(1e-5));
	CHECK(press_angle(10.0, g) == doctest::Approx(ref).epsilon(1e-9));
	for (double travel = 0.5; travel < 35.0; travel += 0.5)
		CHECK(press_angle(travel, g) == doctest::Approx(oracle::press_angle_bisect(travel, c)).epsilon(1e-9));
	const double max_travel = c.drop(30) - c.drop(0);
	CHECK_NOTHROW(press_angle(max_travel - 1e-9, g));
	CHECK_THROWS_AS(press_angle(max_travel + 0.01, g), RangeError);
}

TEST_CASE("required torque") {
	const FingerGeometry g;
	CHECK(required_torque(0, 0, g) == 0);
	CHECK(required_torque(0.5, 0, g) == doctest::Approx(0.041125));
	CHECK(required_torque(1.0, 0, g) == doctest::Approx(0.08225));
	const double at_hover = required_torque(0.5, 0, g);
	for (double tv = 0; tv <= 30; tv += 0.01)
		CHECK(required_torque(0.5, tv, g) <= at_hover + 1e-15);
}

TEST_CASE("geometry and mount validation") {
	FingerGeometry g;
	g.l1_proximal = -1;
	CHECK_THROWS_AS(validate(g), ConfigError);
	g = {};
	g.theta_v_min = 40;
	CHECK_THROWS_AS(validate(g), ConfigError);
	MountPose m;
	m.base_z = 30; // tip would sit below the key surface at hover
	CHECK_THROWS_AS(validate(m, FingerGeometry{}), ConfigError);
}

} // TEST_SUITE
