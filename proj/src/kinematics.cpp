#include "sr3t/kinematics.hpp"

#include "sr3t/error.hpp"
#include "sr3t/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sr3t::kinematics {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
using sensors::format_number;
} // namespace

void validate(const FingerGeometry& g) {
	if (!(g.l0_knuckle > 0))
		throw ConfigError("geometry.l0_knuckle must be > 0");
	if (!(g.l1_proximal > 0))
		throw ConfigError("geometry.l1_proximal must be > 0");
	if (!(g.l2_distal > 0))
		throw ConfigError("geometry.l2_distal must be > 0");
	if (!(g.bend_angle > 0 && g.bend_angle <= 90))
		throw ConfigError("geometry.bend_angle must be in (0, 90]");
	if (!(g.theta_h_min < g.theta_h_max && g.theta_h_max - g.theta_h_min <= 360))
		throw ConfigError("geometry.theta_h_max must exceed geometry.theta_h_min by at most 360");
	if (!(g.theta_v_min < g.theta_v_max && g.theta_v_max - g.theta_v_min <= 120))
		throw ConfigError("geometry.theta_v_max must exceed geometry.theta_v_min by at most 120");
	if (!(g.theta_v_min <= 0 && g.theta_v_max >= 0))
		throw ConfigError("geometry.theta_v range must contain the hover angle 0");
	if (!(g.theta_h_min <= 0 && g.theta_h_max >= 0))
		throw ConfigError("geometry.theta_h range must contain the enable angle 0");
}

void validate(const MountPose& m, const FingerGeometry& g) {
	if (!(m.base_z > 0))
		throw ConfigError("mount.base_z must be > 0");
	if (!(m.base_z > tip_drop(0.0, g)))
		throw ConfigError("mount.base_z must put the hovering tip above the keys (> " +
		                  format_number(tip_drop(0.0, g)) + " mm)");
	if (!std::isfinite(m.base_x) || !std::isfinite(m.base_depth) || !std::isfinite(m.heading))
		throw ConfigError("mount.base_x, mount.base_depth and mount.heading must be finite");
}

double tip_radius(double theta_v, const FingerGeometry& g) {
	return g.l0_knuckle + g.l1_proximal * std::cos(theta_v * kDeg) +
	       g.l2_distal * std::cos((theta_v + g.bend_angle) * kDeg);
}

double tip_drop(double theta_v, const FingerGeometry& g) {
	return g.l1_proximal * std::sin(theta_v * kDeg) + g.l2_distal * std::sin((theta_v + g.bend_angle) * kDeg);
}

Vec3 fingertip_position(const JointState& j, const FingerGeometry& g) {
	if (!(j.theta_h >= g.theta_h_min && j.theta_h <= g.theta_h_max))
		throw InputError("theta_h " + format_number(j.theta_h) + " outside joint range");
	if (!(j.theta_v >= g.theta_v_min && j.theta_v <= g.theta_v_max))
		throw InputError("theta_v " + format_number(j.theta_v) + " outside joint range");
	const double r = tip_radius(j.theta_v, g);
	return {r * std::cos(j.theta_h * kDeg), r * std::sin(j.theta_h * kDeg), -tip_drop(j.theta_v, g)};
}

Vec3 tip_on_keyboard(const JointState& j, const FingerGeometry& g, const MountPose& m) {
	const Vec3 p = fingertip_position(j, g);
	const double r = std::hypot(p.x, p.y);
	const double a = (j.theta_h + m.heading) * kDeg;
	return {m.base_x + r * std::cos(a), m.base_depth + r * std::sin(a), m.base_z + p.z};
}

double theta_for_key(double key_center_x, const MountPose& m, const FingerGeometry& g) {
	const double r = tip_radius(0.0, g);
	const double u = (key_center_x - m.base_x) / r;
	if (!(std::abs(u) <= 1.0)) {
		throw ReachError("key at x=" + format_number(key_center_x) + " out of reach (reachable x in [" +
		                     format_number(m.base_x - r) + ", " + format_number(m.base_x + r) + "])",
		                 m.base_x + r);
	}
	// Circle-line intersection; the acos branch keeps the tip on the keyboard side.
	double th = std::acos(u) / kDeg - m.heading;
	while (th > g.theta_h_max)
		th -= 360.0;
	while (th < g.theta_h_min)
		th += 360.0;
	if (th > g.theta_h_max)
		throw ReachError("key at x=" + format_number(key_center_x) + " needs theta_h outside the joint range",
		                 m.base_x + r);
	return th;
}

double press_angle(double travel_mm, const FingerGeometry& g) {
	if (!(travel_mm >= 0))
		throw InputError("press travel must be >= 0");
	if (travel_mm == 0)
		return 0.0;
	// drop(t) = A sin t + B cos t = R sin(t + phi), increasing up to t = 90 - bend.
	const double A = g.l1_proximal + g.l2_distal * std::cos(g.bend_angle * kDeg);
	const double B = g.l2_distal * std::sin(g.bend_angle * kDeg);
	const double R = std::hypot(A, B);
	const double phi = std::atan2(B, A);
	const double upper = std::min(g.theta_v_max, 90.0 - g.bend_angle);
	const double target = tip_drop(0.0, g) + travel_mm;
	if (target > tip_drop(upper, g) * (1 + 1e-12))
		throw RangeError("press travel " + format_number(travel_mm) + " mm exceeds the reachable drop of " +
		                 format_number(tip_drop(upper, g) - tip_drop(0.0, g)) + " mm");
	return std::min(upper, (std::asin(std::min(1.0, target / R)) - phi) / kDeg);
}

double required_torque(double force_n, double theta_v, const FingerGeometry& g) {
	if (!(force_n >= 0))
		throw InputError("force must be >= 0");
	const double arm_mm = g.l1_proximal * std::cos(theta_v * kDeg) +
	                      g.l2_distal * std::cos((theta_v + g.bend_angle) * kDeg);
	return force_n * arm_mm / 1000.0;
}

} // namespace sr3t::kinematics
