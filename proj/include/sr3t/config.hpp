#pragma once

#include "sr3t/analysis.hpp"
#include "sr3t/control.hpp"
#include "sr3t/engine.hpp"
#include "sr3t/kinematics.hpp"
#include "sr3t/piano.hpp"
#include "sr3t/plant.hpp"
#include "sr3t/sensors.hpp"

#include <iosfwd>
#include <string>

namespace sr3t::config {

/// Where the player's own hand ends and which notes bound the calibrated
/// horizontal range.
struct HandConfig {
	double pinkie_x = 552.25; // mm, centre of C4
	int closest_key = 40;     // C#4
	int furthest_key = 46;    // G4
};

/// Gesture shapes used when synthesizing traces.
struct SynthConfig {
	double sample_period = 1.0;   // ms
	double flex_noise_sigma = 0.0; // ADC codes
	double foot_up_pitch = 30.0;  // deg
	double press_speed = 0.5;     // lift acceleration as a fraction of the calibrated span
	double release_speed = 0.1;   // same, while the foot drops; stays under the intention level
	double pulse_ms = 40.0;
	double settle_ms = 600.0;
	double hold_ms = 300.0;
	double rest_ms = 300.0;
	double segment_ms = 200.0; // calibration pose duration
	double flexed_angle = 180.0; // deg, thumb fully flexed
};

struct GlobalConfig {
	piano::LayoutConfig layout;
	sensors::FlexSensorModel flex;
	sensors::DividerConfig divider;
	sensors::AccelerometerModel accelerometer;
	kinematics::FingerGeometry geometry;
	kinematics::MountPose mount;
	HandConfig hand;
	plant::MotorAxis axis_horizontal;
	plant::MotorAxis axis_vertical;
	control::ControlParams control;
	engine::SimulationConfig simulation;
	SynthConfig synth;
	analysis::BudgetConfig budget;
};

/// Checks every module invariant plus cross-module ones. ConfigError names
/// the offending key.
void validate(const GlobalConfig& cfg);

/// Sectioned "key = value" file. Every key must be present; unknown
/// sections or keys are rejected.
GlobalConfig load_config(const std::string& path);
GlobalConfig parse_config(std::istream& is, const std::string& source = "<config>");

void write_config(std::ostream& os, const GlobalConfig& cfg);

/// Convenience: build the rig the engine needs from a validated config.
engine::Rig make_rig(const GlobalConfig& cfg);

} // namespace sr3t::config
