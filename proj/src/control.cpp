#include "sr3t/control.hpp"

#include "sr3t/error.hpp"
#include "sr3t/kinematics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace sr3t::control {

namespace {

void require_distinct(double a, double b, const char* what) {
	if (a == b)
		throw DegenerateCalibrationError(std::string("degenerate calibration: ") + what);
}

void require_in_range(std::int64_t counts, double lo_deg, double hi_deg, const plant::MotorAxis& axis,
                      const char* name) {
	const double deg = plant::counts_to_degrees(static_cast<double>(counts), axis);
	if (deg < lo_deg || deg > hi_deg)
		throw ConfigError(std::string("calibration.") + name + " = " + std::to_string(counts) +
		                  " lies outside the joint range");
}

std::string trim(const std::string& s) {
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

} // namespace

void validate(const CalibrationSet& c) {
	require_distinct(c.flex_min, c.flex_max, "flex_min == flex_max");
	require_distinct(c.y_min, c.y_max, "y_min == y_max");
	require_distinct(c.z_min, c.z_max, "z_min == z_max");
	require_distinct(static_cast<double>(c.enc_hover), static_cast<double>(c.enc_pressed),
	                 "enc_hover == enc_pressed");
	require_distinct(static_cast<double>(c.enc_h_min), static_cast<double>(c.enc_h_max),
	                 "enc_h_min == enc_h_max");
}

void validate(const CalibrationSet& c, const kinematics::FingerGeometry& g, const plant::MotorAxis& h_axis,
              const plant::MotorAxis& v_axis) {
	validate(c);
	require_in_range(c.enc_h_min, g.theta_h_min, g.theta_h_max, h_axis, "enc_h_min");
	require_in_range(c.enc_h_max, g.theta_h_min, g.theta_h_max, h_axis, "enc_h_max");
	require_in_range(c.enc_hover, g.theta_v_min, g.theta_v_max, v_axis, "enc_hover");
	require_in_range(c.enc_pressed, g.theta_v_min, g.theta_v_max, v_axis, "enc_pressed");
}

void validate(const ControlParams& p) {
	if (!(p.kp_h > 0))
		throw ConfigError("control.kp_h must be > 0");
	if (!(p.v_cap > 0))
		throw ConfigError("control.v_cap must be > 0");
	if (!(p.kv_z > 0))
		throw ConfigError("control.kv_z must be > 0");
	if (!(p.z_threshold > 0))
		throw ConfigError("control.z_threshold must be > 0");
	if (!(p.v_floor > 0 && p.v_floor <= p.v_cap))
		throw ConfigError("control.v_floor must be in (0, control.v_cap]");
	if (!(p.refractory_ms >= 0))
		throw ConfigError("control.refractory_ms must be >= 0");
}

double linear_map(double s, double s_min, double s_max, double p_min, double p_max) {
	if (s_min == s_max)
		throw DegenerateCalibrationError("degenerate calibration: s_min == s_max");
	const double p = p_min + (s - s_min) * (p_max - p_min) / (s_max - s_min);
	return std::clamp(p, std::min(p_min, p_max), std::max(p_min, p_max));
}

CalibrationSet calibrate_from_trace(const sensors::SensorTrace& trace, const EncoderAnchors& anchors) {
	struct Acc {
		double flex = 0, y = 0, z = 0;
		std::size_t n = 0;
	};
	std::map<std::string, Acc> by_label;
	for (const auto& s : trace.samples) {
		if (s.label.empty())
			continue;
		auto& a = by_label[s.label];
		a.flex += s.flex_adc;
		a.y += s.acc_y_adc;
		a.z += s.acc_z_adc;
		++a.n;
	}
	for (const char* label : kCalibrationLabels)
		if (by_label.find(label) == by_label.end())
			throw CalibrationIncompleteError(std::string(label) + " missing");

	auto mean = [&](const char* label, double Acc::*field) {
		const Acc& a = by_label.at(label);
		return static_cast<std::int32_t>(std::lround(a.*field / static_cast<double>(a.n)));
	};

	CalibrationSet c;
	c.flex_min = mean("flex_min", &Acc::flex);
	c.flex_max = mean("flex_max", &Acc::flex);
	c.y_min = mean("foot_down", &Acc::y);
	c.y_max = mean("foot_up", &Acc::y);
	c.z_min = mean("z_rest", &Acc::z);
	c.z_max = mean("z_active", &Acc::z);
	c.enc_h_min = anchors.enc_h_min;
	c.enc_h_max = anchors.enc_h_max;
	c.enc_hover = anchors.enc_hover;
	c.enc_pressed = anchors.enc_pressed;
	validate(c);
	return c;
}

plant::AxisCommand horizontal_update(std::int32_t flex_adc, const CalibrationSet& calib, const ControlParams& params,
                                     std::int64_t current_counts) {
	const double target = linear_map(flex_adc, calib.flex_min, calib.flex_max, static_cast<double>(calib.enc_h_min),
	                                 static_cast<double>(calib.enc_h_max));
	const double setpoint = std::round(target);
	const double distance = std::abs(setpoint - static_cast<double>(current_counts));
	return {plant::AxisMode::position, setpoint, std::min(params.kp_h * distance, params.v_cap)};
}

plant::AxisCommand vertical_update(std::int32_t acc_y_adc, std::int32_t acc_z_adc, const CalibrationSet& calib,
                                   const ControlParams& params) {
	const double target = linear_map(acc_y_adc, calib.y_min, calib.y_max, static_cast<double>(calib.enc_hover),
	                                 static_cast<double>(calib.enc_pressed));
	const double z_ratio = static_cast<double>(acc_z_adc - calib.z_min) / static_cast<double>(calib.z_max - calib.z_min);
	const double speed = std::clamp(params.kv_z * z_ratio, params.v_floor, params.v_cap);
	return {plant::AxisMode::position, std::round(target), speed};
}

void write_calibration(std::ostream& os, const CalibrationSet& c) {
	os << "flex_min = " << c.flex_min << '\n'
	   << "flex_max = " << c.flex_max << '\n'
	   << "enc_h_min = " << c.enc_h_min << '\n'
	   << "enc_h_max = " << c.enc_h_max << '\n'
	   << "y_min = " << c.y_min << '\n'
	   << "y_max = " << c.y_max << '\n'
	   << "z_min = " << c.z_min << '\n'
	   << "z_max = " << c.z_max << '\n'
	   << "enc_hover = " << c.enc_hover << '\n'
	   << "enc_pressed = " << c.enc_pressed << '\n';
}

void write_calibration(const std::string& path, const CalibrationSet& c) {
	std::ofstream os(path, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + path);
	write_calibration(os, c);
}

std::map<std::string, std::int64_t> read_integer_kv(const std::string& path,
                                                    const std::vector<std::string>& required) {
	std::ifstream is(path, std::ios::binary);
	if (!is)
		throw IoError("cannot open " + path);
	const std::set<std::string> known(required.begin(), required.end());
	std::map<std::string, std::int64_t> out;
	std::string line;
	int line_no = 0;
	while (std::getline(is, line)) {
		++line_no;
		const std::string t = trim(line);
		if (t.empty() || t[0] == '#' || t[0] == ';')
			continue;
		const auto eq = t.find('=');
		if (eq == std::string::npos)
			throw InputError(path + ":" + std::to_string(line_no) + ": expected 'name = integer'");
		const std::string name = trim(t.substr(0, eq));
		const std::string value = trim(t.substr(eq + 1));
		if (!known.count(name))
			throw InputError(path + ":" + std::to_string(line_no) + ": unknown key '" + name + "'");
		std::int64_t v = 0;
		auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
		if (ec != std::errc() || ptr != value.data() + value.size())
			throw InputError(path + ":" + std::to_string(line_no) + ": '" + name + "' is not an integer");
		out[name] = v;
	}
	for (const auto& r : required)
		if (!out.count(r))
			throw CalibrationIncompleteError(r + " missing");
	return out;
}

CalibrationSet read_calibration(const std::string& path) {
	const auto kv = read_integer_kv(path, {"flex_min", "flex_max", "enc_h_min", "enc_h_max", "y_min", "y_max",
	                                       "z_min", "z_max", "enc_hover", "enc_pressed"});
	CalibrationSet c;
	c.flex_min = static_cast<std::int32_t>(kv.at("flex_min"));
	c.flex_max = static_cast<std::int32_t>(kv.at("flex_max"));
	c.enc_h_min = kv.at("enc_h_min");
	c.enc_h_max = kv.at("enc_h_max");
	c.y_min = static_cast<std::int32_t>(kv.at("y_min"));
	c.y_max = static_cast<std::int32_t>(kv.at("y_max"));
	c.z_min = static_cast<std::int32_t>(kv.at("z_min"));
	c.z_max = static_cast<std::int32_t>(kv.at("z_max"));
	c.enc_hover = kv.at("enc_hover");
	c.enc_pressed = kv.at("enc_pressed");
	validate(c);
	return c;
}

void write_anchors(const std::string& path, const EncoderAnchors& a) {
	std::ofstream os(path, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + path);
	os << "enc_h_min = " << a.enc_h_min << '\n'
	   << "enc_h_max = " << a.enc_h_max << '\n'
	   << "enc_hover = " << a.enc_hover << '\n'
	   << "enc_pressed = " << a.enc_pressed << '\n';
}

EncoderAnchors read_anchors(const std::string& path) {
	const auto kv = read_integer_kv(path, {"enc_h_min", "enc_h_max", "enc_hover", "enc_pressed"});
	return {kv.at("enc_h_min"), kv.at("enc_h_max"), kv.at("enc_hover"), kv.at("enc_pressed")};
}

} // namespace sr3t::control
