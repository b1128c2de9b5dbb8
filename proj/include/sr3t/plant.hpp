#pragma once

#include <cstdint>
#include <vector>

namespace sr3t::plant {

/// One motor + planetary gearhead + incremental encoder, as seen from the
/// output shaft. Velocities and accelerations are output-side.
struct MotorAxis {
	double gear_ratio = 16.0;
	int encoder_cpr = 256; // impulses per motor revolution
	int quadrature = 4;
	double v_max = 1800.0;      // deg/s
	double a_max = 2.0e6;       // deg/s^2
	double nominal_torque = 0.010; // N*m, motor side
};

void validate(const MotorAxis& axis, const char* section = "axis");

struct AxisState {
	double angle = 0.0;    // deg, output side, zero at enable
	double velocity = 0.0; // deg/s
	std::int64_t encoder_count = 0;

	bool operator==(const AxisState&) const = default;
};

enum class AxisMode { position, velocity };

struct AxisCommand {
	AxisMode mode = AxisMode::position;
	double setpoint = 0.0;       // counts (position) or deg/s (velocity)
	double velocity_limit = 0.0; // deg/s, position-mode profile velocity

	bool operator==(const AxisCommand&) const = default;
};

std::int64_t counts_per_output_rev(const MotorAxis& axis);

/// round(angle * counts_per_rev / 360), half away from zero.
std::int64_t encoder_counts(double angle_deg, const MotorAxis& axis);

double counts_to_degrees(double counts, const MotorAxis& axis);

/// Piecewise-constant-acceleration motion of one axis over a single step.
/// Times are milliseconds from the start of the step.
class StepProfile {
public:
	struct Segment {
		double t0;    // ms
		double len;   // ms
		double angle0; // deg
		double v0;    // deg/s
		double accel; // deg/s^2
	};

	struct Crossing {
		double t;     // ms from step start
		bool rising;  // angle increasing through the level
		double velocity;
	};

	double duration() const { return duration_; }
	const std::vector<Segment>& segments() const { return segments_; }

	double angle_at(double t_ms) const;
	double velocity_at(double t_ms) const;

	/// Every time the angle passes through `level`, in order. "Rising" means
	/// it goes from below to at-or-above; "falling" from at-or-above to below.
	std::vector<Crossing> crossings(double level) const;

private:
	friend struct ProfileBuilder;
	const Segment& segment_at(double t_ms) const;
	std::vector<Segment> segments_;
	double duration_ = 0.0;
};

struct StepResult {
	AxisState state;
	StepProfile profile;
};

/// Slew-limited trapezoidal motion toward the command over dt milliseconds.
/// Position mode stops exactly on the setpoint and never overshoots.
StepResult axis_step_profiled(const AxisState& state, const AxisCommand& cmd, double dt_ms,
                              const MotorAxis& axis);

AxisState axis_step(const AxisState& state, const AxisCommand& cmd, double dt_ms, const MotorAxis& axis);

/// Output torque capacity over the required torque. Throws InputError for
/// required <= 0.
double torque_margin(double required_nm, const MotorAxis& axis);

} // namespace sr3t::plant
