#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sr3t::sensors {

/// Thumb flex sensor, linear in bend angle between its two measured endpoints.
struct FlexSensorModel {
	double r_flat = 13.0;       // kOhm
	double r_bent = 26.0;       // kOhm at angle_range
	double angle_range = 180.0; // degrees
};

/// Flex sensor in the upper leg of a divider, fixed resistor to ground, read
/// through a unity buffer into an ADC.
struct DividerConfig {
	double vcc = 5.0;     // V
	double r_fixed = 20.0; // kOhm
	int adc_bits = 12;
	double v_ref = 5.0;   // V
};

/// ADXL335-style analog accelerometer strapped to the foot.
struct AccelerometerModel {
	double sensitivity = 0.3; // V/g
	double zero_g_bias = 1.5; // V
	double noise_sigma = 0.0; // V
};

void validate(const FlexSensorModel& m);
void validate(const DividerConfig& c);
void validate(const AccelerometerModel& m);

/// kOhm for a bend angle in [0, angle_range]. Throws InputError outside.
double flex_resistance(double bend_angle_deg, const FlexSensorModel& m);

/// Inverse of flex_resistance (unclamped).
double flex_angle_for_resistance(double r_kohm, const FlexSensorModel& m);

/// Buffered divider output; strictly decreasing in r_flex.
double divider_voltage(double r_flex_kohm, const DividerConfig& cfg);

/// Inverse of divider_voltage for v in (0, vcc).
double divider_resistance(double v, const DividerConfig& cfg);

std::int32_t adc_full_scale(const DividerConfig& cfg);

/// round-half-up(clamp(v, 0, v_ref) / v_ref * full_scale)
std::int32_t adc_quantize(double v, const DividerConfig& cfg);

/// Code to the voltage at the center of its quantization step.
double adc_voltage(double code, const DividerConfig& cfg);

using Rng = std::mt19937_64;

/// (v_y, v_z). Y sees the gravity projection along the foot; Z sees the
/// normal gravity component plus the dynamic (lift) acceleration.
/// |pitch| <= 90 or InputError. Noise is drawn from rng only when noise_sigma > 0.
std::pair<double, double> accel_output(double foot_pitch_deg, double dyn_accel_g,
                                       const AccelerometerModel& m, Rng* rng = nullptr);

struct SensorSample {
	double t = 0.0; // ms
	std::int32_t flex_adc = 0;
	std::int32_t acc_y_adc = 0;
	std::int32_t acc_z_adc = 0;
	std::string label;

	bool operator==(const SensorSample&) const = default;
};

struct SensorTrace {
	std::vector<SensorSample> samples;
	double sample_period = 1.0; // ms

	bool empty() const { return samples.empty(); }
};

/// Throws InputError if timestamps are not strictly increasing, spacing
/// deviates more than 1% from sample_period, or codes leave [0, full scale].
void validate(const SensorTrace& trace, const DividerConfig& adc);

/// CSV header: t_ms,flex_adc,acc_y_adc,acc_z_adc,label
void write_trace_csv(std::ostream& os, const SensorTrace& trace);
void write_trace_csv(const std::string& path, const SensorTrace& trace);

/// Parses and infers sample_period from the first two samples.
SensorTrace read_trace_csv(std::istream& is);
SensorTrace read_trace_csv(const std::string& path);

/// Shortest round-trip decimal form ("1", "2.5").
std::string format_number(double v);

} // namespace sr3t::sensors
