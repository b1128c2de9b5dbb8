#pragma once

#include "sr3t/analysis.hpp"
#include "sr3t/config.hpp"
#include "sr3t/control.hpp"
#include "sr3t/sensors.hpp"

#include <vector>

namespace sr3t::synth {

/// Foot lift acceleration (g) recorded for the z_active calibration pose.
inline constexpr double kActiveLiftG = 1.0;

/// "--speed max" drives slightly past the calibrated span so ADC rounding
/// cannot pull the commanded speed under the cap.
inline constexpr double kMaxSpeed = 1.1;

/// Encoder anchors for the configured mount: hand keys for the horizontal
/// range, hover at encoder zero, pressed at key bottom.
control::EncoderAnchors default_anchors(const config::GlobalConfig& cfg);

/// What calibrate_from_trace returns for a noise-free calibration trace.
control::CalibrationSet default_calibration(const config::GlobalConfig& cfg);

/// Six labelled poses of synth.segment_ms each.
sensors::SensorTrace calibration_trace(const config::GlobalConfig& cfg, sensors::Rng& rng);

/// Keys whose centres sit inside the calibrated horizontal range, ascending.
std::vector<int> targetable_keys(const config::GlobalConfig& cfg);

/// Unrounded flex code that the calibrated map sends to key's centre.
/// Throws ReachError if the key lies outside the calibrated range.
double flex_code_for_key(const config::GlobalConfig& cfg, const control::CalibrationSet& calib, int key);

struct PressScript {
	std::vector<int> keys; // one press per entry
	double speed = 0.5;    // fraction of the calibrated lift span
	int repeat = 1;        // each key pressed this many times in a row
};

/// Settle over the first key, then for each press: lift (pitch up, Z pulse),
/// hold, drop (small Z pulse under the intention level), rest. The thumb
/// moves to the next key at the start of its rest.
sensors::SensorTrace press_trace(const config::GlobalConfig& cfg, const PressScript& script, sensors::Rng& rng);

struct WorkspaceFixtures {
	analysis::DirectionSet sr3t_band; // full azimuth, +-60 deg elevation
	analysis::DirectionSet thumb_cap; // 54.9 deg half-angle cap
};

inline constexpr double kBandElevation = 60.0;
inline constexpr double kThumbCapHalfAngle = 54.9;
inline constexpr double kThumbCapElevation = 20.0;
inline constexpr double kThumbCapAzimuth = 30.0;

WorkspaceFixtures workspace_fixtures(std::size_t n_band, std::size_t n_cap, sensors::Rng& rng);

} // namespace sr3t::synth
