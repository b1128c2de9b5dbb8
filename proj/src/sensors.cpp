#include "sr3t/sensors.hpp"

#include "sr3t/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sr3t::sensors {

void validate(const FlexSensorModel& m) {
	if (!(m.r_flat > 0))
		throw ConfigError("flex.r_flat must be > 0");
	if (!(m.r_bent > m.r_flat))
		throw ConfigError("flex.r_bent must be > flex.r_flat");
	if (!(m.angle_range > 0 && m.angle_range <= 180))
		throw ConfigError("flex.angle_range must be in (0, 180]");
}

void validate(const DividerConfig& c) {
	if (!(c.vcc > 0))
		throw ConfigError("divider.vcc must be > 0");
	if (!(c.r_fixed > 0))
		throw ConfigError("divider.r_fixed must be > 0");
	if (c.adc_bits < 8 || c.adc_bits > 16)
		throw ConfigError("divider.adc_bits must be in [8, 16]");
	if (!(c.v_ref > 0))
		throw ConfigError("divider.v_ref must be > 0");
}

void validate(const AccelerometerModel& m) {
	if (!(m.sensitivity > 0))
		throw ConfigError("accelerometer.sensitivity must be > 0");
	if (!(m.noise_sigma >= 0))
		throw ConfigError("accelerometer.noise_sigma must be >= 0");
	if (!std::isfinite(m.zero_g_bias))
		throw ConfigError("accelerometer.zero_g_bias must be finite");
}

double flex_resistance(double bend_angle_deg, const FlexSensorModel& m) {
	if (!(bend_angle_deg >= 0 && bend_angle_deg <= m.angle_range))
		throw InputError("bend angle " + format_number(bend_angle_deg) + " outside [0, " +
		                 format_number(m.angle_range) + "]");
	return m.r_flat + (bend_angle_deg / m.angle_range) * (m.r_bent - m.r_flat);
}

double flex_angle_for_resistance(double r_kohm, const FlexSensorModel& m) {
	return (r_kohm - m.r_flat) / (m.r_bent - m.r_flat) * m.angle_range;
}

double divider_voltage(double r_flex_kohm, const DividerConfig& cfg) {
	if (!(r_flex_kohm > 0))
		throw InputError("flex resistance must be > 0");
	return cfg.vcc * cfg.r_fixed / (r_flex_kohm + cfg.r_fixed);
}

double divider_resistance(double v, const DividerConfig& cfg) {
	if (!(v > 0 && v < cfg.vcc))
		throw InputError("divider voltage " + format_number(v) + " outside (0, vcc)");
	return cfg.r_fixed * (cfg.vcc - v) / v;
}

std::int32_t adc_full_scale(const DividerConfig& cfg) {
	return (std::int32_t{1} << cfg.adc_bits) - 1;
}

std::int32_t adc_quantize(double v, const DividerConfig& cfg) {
	const double clamped = std::clamp(v, 0.0, cfg.v_ref);
	return static_cast<std::int32_t>(std::floor(clamped / cfg.v_ref * adc_full_scale(cfg) + 0.5));
}

double adc_voltage(double code, const DividerConfig& cfg) {
	return code / adc_full_scale(cfg) * cfg.v_ref;
}

std::pair<double, double> accel_output(double foot_pitch_deg, double dyn_accel_g,
                                       const AccelerometerModel& m, Rng* rng) {
	if (!(std::abs(foot_pitch_deg) <= 90))
		throw InputError("foot pitch " + format_number(foot_pitch_deg) + " outside [-90, 90]");
	const double p = foot_pitch_deg * std::numbers::pi / 180.0;
	double vy = m.zero_g_bias + m.sensitivity * std::sin(p);
	double vz = m.zero_g_bias + m.sensitivity * (std::cos(p) + dyn_accel_g);
	if (m.noise_sigma > 0 && rng != nullptr) {
		std::normal_distribution<double> noise(0.0, m.noise_sigma);
		vy += noise(*rng);
		vz += noise(*rng);
	}
	return {vy, vz};
}

void validate(const SensorTrace& trace, const DividerConfig& adc) {
	const std::int32_t full = adc_full_scale(adc);
	const auto& s = trace.samples;
	for (std::size_t i = 0; i < s.size(); ++i) {
		const auto& x = s[i];
		if (!(x.t >= 0))
			throw InputError("trace sample " + std::to_string(i) + ": negative timestamp");
		for (std::int32_t code : {x.flex_adc, x.acc_y_adc, x.acc_z_adc})
			if (code < 0 || code > full)
				throw InputError("trace sample " + std::to_string(i) + ": ADC code " +
				                 std::to_string(code) + " outside [0, " + std::to_string(full) + "]");
		if (i == 0)
			continue;
		const double gap = x.t - s[i - 1].t;
		if (!(gap > 0))
			throw InputError("trace sample " + std::to_string(i) + ": timestamps not strictly increasing");
		if (std::abs(gap - trace.sample_period) > 0.01 * trace.sample_period)
			throw InputError("trace sample " + std::to_string(i) + ": spacing " + format_number(gap) +
			                 " ms deviates from sample period " + format_number(trace.sample_period));
	}
}

std::string format_number(double v) {
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const SensorTrace& trace) {
	os << "t_ms,flex_adc,acc_y_adc,acc_z_adc,label\n";
	for (const auto& s : trace.samples)
		os << format_number(s.t) << ',' << s.flex_adc << ',' << s.acc_y_adc << ',' << s.acc_z_adc << ','
		   << s.label << '\n';
}

void write_trace_csv(const std::string& path, const SensorTrace& trace) {
	std::ofstream os(path, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + path);
	write_trace_csv(os, trace);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
	std::vector<std::string> out;
	std::string cur;
	for (char c : line) {
		if (c == ',') {
			out.push_back(cur);
			cur.clear();
		} else if (c != '\r') {
			cur.push_back(c);
		}
	}
	out.push_back(cur);
	return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line_no, const char* name) {
	T value{};
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc() || ptr != text.data() + text.size())
		throw InputError("trace line " + std::to_string(line_no) + ": bad " + name + " '" + text + "'");
	return value;
}

} // namespace

SensorTrace read_trace_csv(std::istream& is) {
	std::string line;
	if (!std::getline(is, line))
		throw InputError("trace: missing header");
	if (!line.empty() && line.back() == '\r')
		line.pop_back();
	if (line != "t_ms,flex_adc,acc_y_adc,acc_z_adc,label")
		throw InputError("trace: unexpected header '" + line + "'");

	SensorTrace trace;
	std::size_t line_no = 1;
	while (std::getline(is, line)) {
		++line_no;
		if (line.empty() || line == "\r")
			continue;
		auto f = split_csv_line(line);
		if (f.size() != 5)
			throw InputError("trace line " + std::to_string(line_no) + ": expected 5 fields");
		SensorSample s;
		s.t = parse_field<double>(f[0], line_no, "t_ms");
		s.flex_adc = parse_field<std::int32_t>(f[1], line_no, "flex_adc");
		s.acc_y_adc = parse_field<std::int32_t>(f[2], line_no, "acc_y_adc");
		s.acc_z_adc = parse_field<std::int32_t>(f[3], line_no, "acc_z_adc");
		s.label = f[4];
		trace.samples.push_back(std::move(s));
	}
	if (trace.samples.size() >= 2)
		trace.sample_period = trace.samples[1].t - trace.samples[0].t;
	return trace;
}

SensorTrace read_trace_csv(const std::string& path) {
	std::ifstream is(path, std::ios::binary);
	if (!is)
		throw IoError("cannot open trace " + path);
	return read_trace_csv(is);
}

} // namespace sr3t::sensors
