#pragma once

#include "sr3t/control.hpp"
#include "sr3t/kinematics.hpp"
#include "sr3t/piano.hpp"
#include "sr3t/plant.hpp"
#include "sr3t/sensors.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sr3t::engine {

/// Pure transport delays (ms) along the sensing-to-actuation chain.
struct LatencyConfig {
	double sensor_sample = 5.0;
	double adc_transport = 10.0;
	double compute = 5.0;
	double command_transport = 10.0;
	double controller_process = 5.0;
	double mech_motion = 50.0;

	double total() const {
		return sensor_sample + adc_transport + compute + command_transport + controller_process + mech_motion;
	}
	double non_mechanical() const { return total() - mech_motion; }
};

enum class RunMode { deterministic, concurrent };

struct SimulationConfig {
	double timestep = 1.0; // ms
	std::uint64_t seed = 1;
	RunMode mode = RunMode::deterministic;
	LatencyConfig latency;
	bool verbose = false; // keep per-step axis states
};

/// Throws ConfigError; stage delays must be whole multiples of the timestep.
void validate(const SimulationConfig& sim);

/// Everything physical the loop needs besides the trace and calibration.
struct Rig {
	piano::KeyboardLayout layout;
	kinematics::FingerGeometry geometry;
	kinematics::MountPose mount;
	plant::MotorAxis h_axis;
	plant::MotorAxis v_axis;
	control::ControlParams params;
};

struct LatencyRecord {
	double intention_t = 0.0;
	double action_t = 0.0;
	double delay() const { return action_t - intention_t; }
};

struct StepRecord {
	double t = 0.0;
	std::int64_t theta_h_counts = 0;
	std::int64_t theta_v_counts = 0;
	double tip_x = 0.0;
	double tip_z = 0.0;
};

struct EventLog {
	std::vector<piano::KeyEvent> key_events;
	std::vector<LatencyRecord> latency;
	std::vector<double> air_presses; // contact times with no key under the tip
	std::vector<StepRecord> steps;
};

/// FIFO that releases each pushed item `ticks` pushes later.
template <typename T>
class DelayLine {
public:
	explicit DelayLine(std::size_t ticks) : ticks_(ticks) {}

	std::optional<T> push(std::optional<T> item) {
		if (ticks_ == 0)
			return item;
		queue_.push_back(std::move(item));
		if (queue_.size() <= ticks_)
			return std::nullopt;
		auto out = std::move(queue_.front());
		queue_.pop_front();
		return out;
	}

private:
	std::size_t ticks_;
	std::deque<std::optional<T>> queue_;
};

/// 127 * speed / v_cap, rounded half up, clamped to [1, 127].
int midi_velocity(double angular_speed, double v_cap);

/// Times of upward crossings of z_min + z_threshold (toward z_max), one per
/// refractory window. A crossing needs a preceding sample below the level.
std::vector<double> intention_detect(const std::vector<std::pair<double, std::int32_t>>& z_stream,
                                     const control::CalibrationSet& calib, const control::ControlParams& params);

/// Vertical axis angle (deg) at which the tip meets the key surface.
double contact_angle(const kinematics::FingerGeometry& g, const kinematics::MountPose& m);

/// Fixed-timestep simulation of the full pipeline over a trace.
EventLog run(const sensors::SensorTrace& trace, const control::CalibrationSet& calib, const Rig& rig,
             const SimulationConfig& sim);

void write_events_csv(std::ostream& os, const EventLog& log, const piano::KeyboardLayout& layout);
void write_steps_csv(std::ostream& os, const EventLog& log);
void write_latency_csv(std::ostream& os, const EventLog& log);
std::vector<LatencyRecord> read_latency_csv(const std::string& path);

std::string format_fixed(double v, int decimals);

} // namespace sr3t::engine
