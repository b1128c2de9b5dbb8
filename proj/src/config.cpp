#include "sr3t/config.hpp"

#include "sr3t/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace sr3t::config {

namespace {

using sensors::format_number;

struct Field {
	std::string section;
	std::string key;
	std::function<void(const std::string&)> set;
	std::function<std::string()> get;
};

std::string trim(const std::string& s) {
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& name, const std::string& raw) {
	const std::string text = trim(raw);
	T v{};
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
	if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
		throw ConfigError(name + ": cannot parse '" + text + "'");
	return v;
}

class Binder {
public:
	explicit Binder(std::vector<Field>& out) : out_(out) {}

	Binder& section(std::string s) {
		section_ = std::move(s);
		return *this;
	}

	Binder& real(const std::string& key, double& ref) {
		const std::string name = section_ + "." + key;
		out_.push_back({section_, key, [&ref, name](const std::string& v) { ref = parse_value<double>(name, v); },
		                [&ref] { return format_number(ref); }});
		return *this;
	}

	template <typename I>
	Binder& integer(const std::string& key, I& ref) {
		const std::string name = section_ + "." + key;
		out_.push_back({section_, key, [&ref, name](const std::string& v) { ref = parse_value<I>(name, v); },
		                [&ref] { return std::to_string(ref); }});
		return *this;
	}

	Binder& mode(const std::string& key, engine::RunMode& ref) {
		const std::string name = section_ + "." + key;
		out_.push_back({section_, key,
		                [&ref, name](const std::string& raw) {
			                const auto v = trim(raw);
			                if (v == "deterministic")
				                ref = engine::RunMode::deterministic;
			                else if (v == "concurrent")
				                ref = engine::RunMode::concurrent;
			                else
				                throw ConfigError(name + ": expected deterministic or concurrent, got '" + v + "'");
		                },
		                [&ref] { return std::string(ref == engine::RunMode::concurrent ? "concurrent" : "deterministic"); }});
		return *this;
	}

private:
	std::vector<Field>& out_;
	std::string section_;
};

void bind_axis(Binder& b, const std::string& name, plant::MotorAxis& a) {
	b.section(name)
		.real("gear_ratio", a.gear_ratio)
		.integer("encoder_cpr", a.encoder_cpr)
		.integer("quadrature", a.quadrature)
		.real("v_max", a.v_max)
		.real("a_max", a.a_max)
		.real("nominal_torque", a.nominal_torque);
}

std::vector<Field> fields(GlobalConfig& c) {
	std::vector<Field> f;
	Binder b(f);
	b.section("layout")
		.integer("n_keys", c.layout.n_keys)
		.real("white_width", c.layout.white_width)
		.real("black_width", c.layout.black_width)
		.real("key_travel", c.layout.key_travel)
		.real("press_force", c.layout.press_force)
		.real("black_zone_depth", c.layout.black_zone_depth)
		.real("origin_x", c.layout.origin_x);
	b.section("flex").real("r_flat", c.flex.r_flat).real("r_bent", c.flex.r_bent).real("angle_range", c.flex.angle_range);
	b.section("divider")
		.real("vcc", c.divider.vcc)
		.real("r_fixed", c.divider.r_fixed)
		.integer("adc_bits", c.divider.adc_bits)
		.real("v_ref", c.divider.v_ref);
	b.section("accelerometer")
		.real("sensitivity", c.accelerometer.sensitivity)
		.real("zero_g_bias", c.accelerometer.zero_g_bias)
		.real("noise_sigma", c.accelerometer.noise_sigma);
	b.section("geometry")
		.real("l0_knuckle", c.geometry.l0_knuckle)
		.real("l1_proximal", c.geometry.l1_proximal)
		.real("l2_distal", c.geometry.l2_distal)
		.real("bend_angle", c.geometry.bend_angle)
		.real("theta_h_min", c.geometry.theta_h_min)
		.real("theta_h_max", c.geometry.theta_h_max)
		.real("theta_v_min", c.geometry.theta_v_min)
		.real("theta_v_max", c.geometry.theta_v_max);
	b.section("mount")
		.real("base_x", c.mount.base_x)
		.real("base_z", c.mount.base_z)
		.real("base_depth", c.mount.base_depth)
		.real("heading", c.mount.heading);
	b.section("hand")
		.real("pinkie_x", c.hand.pinkie_x)
		.integer("closest_key", c.hand.closest_key)
		.integer("furthest_key", c.hand.furthest_key);
	bind_axis(b, "axis_horizontal", c.axis_horizontal);
	bind_axis(b, "axis_vertical", c.axis_vertical);
	b.section("control")
		.real("kp_h", c.control.kp_h)
		.real("v_cap", c.control.v_cap)
		.real("kv_z", c.control.kv_z)
		.real("z_threshold", c.control.z_threshold)
		.real("v_floor", c.control.v_floor)
		.real("refractory_ms", c.control.refractory_ms);
	auto& lat = c.simulation.latency;
	b.section("latency")
		.real("sensor_sample", lat.sensor_sample)
		.real("adc_transport", lat.adc_transport)
		.real("compute", lat.compute)
		.real("command_transport", lat.command_transport)
		.real("controller_process", lat.controller_process)
		.real("mech_motion", lat.mech_motion);
	b.section("simulation")
		.real("timestep", c.simulation.timestep)
		.integer("seed", c.simulation.seed)
		.mode("mode", c.simulation.mode);
	b.section("synth")
		.real("sample_period", c.synth.sample_period)
		.real("flex_noise_sigma", c.synth.flex_noise_sigma)
		.real("foot_up_pitch", c.synth.foot_up_pitch)
		.real("press_speed", c.synth.press_speed)
		.real("release_speed", c.synth.release_speed)
		.real("pulse_ms", c.synth.pulse_ms)
		.real("settle_ms", c.synth.settle_ms)
		.real("hold_ms", c.synth.hold_ms)
		.real("rest_ms", c.synth.rest_ms)
		.real("segment_ms", c.synth.segment_ms)
		.real("flexed_angle", c.synth.flexed_angle);
	b.section("device").real("mass_g", c.budget.device_mass_g);
	b.section("budget").real("latency_ms", c.budget.latency_budget_ms).real("mass_g", c.budget.mass_budget_g);
	return f;
}

} // namespace

void validate(const GlobalConfig& cfg) {
	const auto layout = piano::build_layout(cfg.layout);
	sensors::validate(cfg.flex);
	sensors::validate(cfg.divider);
	sensors::validate(cfg.accelerometer);
	kinematics::validate(cfg.geometry);
	kinematics::validate(cfg.mount, cfg.geometry);
	plant::validate(cfg.axis_horizontal, "axis_horizontal");
	plant::validate(cfg.axis_vertical, "axis_vertical");
	control::validate(cfg.control);
	engine::validate(cfg.simulation);

	if (cfg.control.v_cap > cfg.axis_horizontal.v_max)
		throw ConfigError("control.v_cap must not exceed axis_horizontal.v_max");
	if (cfg.control.v_cap > cfg.axis_vertical.v_max)
		throw ConfigError("control.v_cap must not exceed axis_vertical.v_max");
	for (auto [name, idx] : {std::pair{"hand.closest_key", cfg.hand.closest_key},
	                         std::pair{"hand.furthest_key", cfg.hand.furthest_key}})
		if (idx < 0 || idx >= cfg.layout.n_keys)
			throw ConfigError(std::string(name) + " must index a key on the keyboard");
	if (cfg.hand.closest_key == cfg.hand.furthest_key)
		throw ConfigError("hand.furthest_key must differ from hand.closest_key");
	if (!std::isfinite(cfg.hand.pinkie_x))
		throw ConfigError("hand.pinkie_x must be finite");

	const auto& s = cfg.synth;
	if (!(s.sample_period > 0))
		throw ConfigError("synth.sample_period must be > 0");
	if (!(s.flex_noise_sigma >= 0))
		throw ConfigError("synth.flex_noise_sigma must be >= 0");
	if (!(s.foot_up_pitch > 0 && s.foot_up_pitch <= 90))
		throw ConfigError("synth.foot_up_pitch must be in (0, 90]");
	if (!(s.press_speed > 0 && s.press_speed <= 1))
		throw ConfigError("synth.press_speed must be in (0, 1]");
	if (!(s.release_speed >= 0 && s.release_speed < 1))
		throw ConfigError("synth.release_speed must be in [0, 1)");
	for (auto [name, v] : {std::pair{"synth.pulse_ms", s.pulse_ms}, std::pair{"synth.settle_ms", s.settle_ms},
	                       std::pair{"synth.hold_ms", s.hold_ms}, std::pair{"synth.rest_ms", s.rest_ms},
	                       std::pair{"synth.segment_ms", s.segment_ms}})
		if (!(v > 0))
			throw ConfigError(std::string(name) + " must be > 0");
	if (!(s.flexed_angle > 0 && s.flexed_angle <= cfg.flex.angle_range))
		throw ConfigError("synth.flexed_angle must be in (0, flex.angle_range]");

	analysis::BudgetConfig b = cfg.budget;
	b.key_force_n = cfg.layout.press_force;
	analysis::budget_check(b, cfg.geometry, cfg.axis_vertical, cfg.simulation.latency);
	(void)layout;
}

GlobalConfig parse_config(std::istream& is, const std::string& source) {
	boost::property_tree::ptree tree;
	try {
		boost::property_tree::ini_parser::read_ini(is, tree);
	} catch (const boost::property_tree::ini_parser_error& e) {
		throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
	}

	GlobalConfig cfg;
	auto table = fields(cfg);
	std::map<std::string, std::map<std::string, const Field*>> index;
	for (const auto& f : table)
		index[f.section][f.key] = &f;

	std::set<std::string> seen;
	for (const auto& [section, body] : tree) {
		auto sit = index.find(section);
		if (sit == index.end() || body.empty())
			throw ConfigError(source + ": unknown section or key '" + section + "'");
		for (const auto& [key, value] : body) {
			auto kit = sit->second.find(key);
			if (kit == sit->second.end())
				throw ConfigError(source + ": unknown key '" + section + "." + key + "'");
			kit->second->set(value.data());
			seen.insert(section + "." + key);
		}
	}
	for (const auto& f : table)
		if (!seen.count(f.section + "." + f.key))
			throw ConfigError(source + ": missing key '" + f.section + "." + f.key + "'");

	validate(cfg);
	return cfg;
}

GlobalConfig load_config(const std::string& path) {
	std::ifstream is(path, std::ios::binary);
	if (!is)
		throw IoError("cannot open config " + path);
	return parse_config(is, path);
}

void write_config(std::ostream& os, const GlobalConfig& cfg) {
	GlobalConfig copy = cfg;
	const auto table = fields(copy);
	std::string current;
	for (const auto& f : table) {
		if (f.section != current) {
			if (!current.empty())
				os << '\n';
			os << '[' << f.section << "]\n";
			current = f.section;
		}
		os << f.key << " = " << f.get() << '\n';
	}
}

engine::Rig make_rig(const GlobalConfig& cfg) {
	return {piano::build_layout(cfg.layout), cfg.geometry, cfg.mount, cfg.axis_horizontal, cfg.axis_vertical,
	        cfg.control};
}

} // namespace sr3t::config
