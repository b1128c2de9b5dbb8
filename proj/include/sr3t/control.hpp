#pragma once

#include "sr3t/plant.hpp"
#include "sr3t/sensors.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sr3t::kinematics {
struct FingerGeometry;
}

namespace sr3t::control {

/// Anchors for both sensor-to-motor linear maps.
struct CalibrationSet {
	std::int32_t flex_min = 0; // thumb straight
	std::int32_t flex_max = 0; // thumb flexed
	std::int64_t enc_h_min = 0; // closest note
	std::int64_t enc_h_max = 0; // furthest note
	std::int32_t y_min = 0; // foot on the ground
	std::int32_t y_max = 0; // foot lifted
	std::int32_t z_min = 0; // foot stationary
	std::int32_t z_max = 0; // foot lifting
	std::int64_t enc_hover = 0;
	std::int64_t enc_pressed = 0;

	bool operator==(const CalibrationSet&) const = default;
};

/// Throws DegenerateCalibrationError when any pair collapses.
void validate(const CalibrationSet& c);

/// Additionally checks that encoder anchors sit inside the joint ranges.
void validate(const CalibrationSet& c, const kinematics::FingerGeometry& g, const plant::MotorAxis& h_axis,
              const plant::MotorAxis& v_axis);

struct ControlParams {
	double kp_h = 0.5;        // (deg/s) per count of distance
	double v_cap = 1800.0;    // deg/s
	double kv_z = 1800.0;     // deg/s at a full-scale Z reading
	double z_threshold = 40.0; // codes above z_min that count as intention
	double v_floor = 5.0;     // deg/s
	double refractory_ms = 150.0;
};

void validate(const ControlParams& p);

/// Affine map clamped to the output anchor range. Throws
/// DegenerateCalibrationError when s_min == s_max.
double linear_map(double s, double s_min, double s_max, double p_min, double p_max);

/// Encoder anchors for the labelled calibration poses.
struct EncoderAnchors {
	std::int64_t enc_h_min = 0;
	std::int64_t enc_h_max = 0;
	std::int64_t enc_hover = 0;
	std::int64_t enc_pressed = 0;
};

inline constexpr const char* kCalibrationLabels[] = {"flex_min", "flex_max", "foot_up",
                                                     "foot_down", "z_active", "z_rest"};

/// Sensor anchors are the rounded means of the labelled samples. Throws
/// CalibrationIncompleteError ("<label> missing") or DegenerateCalibrationError.
CalibrationSet calibrate_from_trace(const sensors::SensorTrace& trace, const EncoderAnchors& anchors);

/// Thumb flex -> horizontal position target, speed proportional to distance.
plant::AxisCommand horizontal_update(std::int32_t flex_adc, const CalibrationSet& calib, const ControlParams& params,
                                     std::int64_t current_counts);

/// Foot Y -> vertical position target (ground = hover, lifted = pressed),
/// foot Z -> profile speed.
plant::AxisCommand vertical_update(std::int32_t acc_y_adc, std::int32_t acc_z_adc, const CalibrationSet& calib,
                                   const ControlParams& params);

/// Flat "name = integer" file, one anchor per line.
void write_calibration(std::ostream& os, const CalibrationSet& c);
void write_calibration(const std::string& path, const CalibrationSet& c);
CalibrationSet read_calibration(const std::string& path);

void write_anchors(const std::string& path, const EncoderAnchors& a);
EncoderAnchors read_anchors(const std::string& path);

/// Reads a flat "name = integer" file. Unknown names and missing required
/// names are errors.
std::map<std::string, std::int64_t> read_integer_kv(const std::string& path,
                                                    const std::vector<std::string>& required);

} // namespace sr3t::control
