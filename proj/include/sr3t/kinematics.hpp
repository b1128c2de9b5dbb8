#pragma once

namespace sr3t::kinematics {

/// Two-DOF finger: a radial knuckle link rotating about the vertical axis
/// (theta_h), then a proximal link and a distal link bent down by bend_angle,
/// both pitched by the press joint (theta_v, positive = downward).
struct FingerGeometry {
	double l0_knuckle = 41.0;  // mm
	double l1_proximal = 58.0; // mm
	double l2_distal = 48.5;   // mm
	double bend_angle = 60.0;  // deg
	double theta_h_min = -180.0;
	double theta_h_max = 180.0;
	double theta_v_min = -90.0;
	double theta_v_max = 30.0;
};

void validate(const FingerGeometry& g);

struct JointState {
	double theta_h = 0.0; // deg
	double theta_v = 0.0; // deg
};

/// Pivot placement relative to the keyboard. x runs along the key line,
/// depth runs into the keyboard from its front edge, z is height above the
/// undepressed key surface.
struct MountPose {
	double base_x = 540.0;
	double base_z = 44.0;
	double base_depth = 0.0;
	double heading = 0.0; // deg, added to theta_h
};

void validate(const MountPose& m, const FingerGeometry& g);

struct Vec3 {
	double x = 0, y = 0, z = 0;
};

/// Horizontal distance from the pivot axis to the tip.
double tip_radius(double theta_v, const FingerGeometry& g);

/// Vertical drop of the tip below the pivot.
double tip_drop(double theta_v, const FingerGeometry& g);

/// Tip position in the pivot frame: (r cos th, r sin th, -drop).
/// Throws InputError when joints leave their ranges.
Vec3 fingertip_position(const JointState& j, const FingerGeometry& g);

/// Tip position projected into keyboard coordinates: x on the key line,
/// y = depth into the keyboard, z = height above the key surface.
Vec3 tip_on_keyboard(const JointState& j, const FingerGeometry& g, const MountPose& m);

/// theta_h placing the hovering tip (theta_v = 0) over key_center_x, on the
/// keyboard-facing side. Throws ReachError if outside the reach circle or
/// the theta_h range.
double theta_for_key(double key_center_x, const MountPose& m, const FingerGeometry& g);

/// Smallest positive press rotation from hover that lowers the tip by
/// travel mm. Throws RangeError past the theta_v limit.
double press_angle(double travel_mm, const FingerGeometry& g);

/// Press-joint torque (N*m) needed to push with force_n at the tip.
double required_torque(double force_n, double theta_v, const FingerGeometry& g);

} // namespace sr3t::kinematics
