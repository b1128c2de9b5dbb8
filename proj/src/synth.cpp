#include "sr3t/synth.hpp"

#include "sr3t/error.hpp"
#include "sr3t/kinematics.hpp"
#include "sr3t/plant.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sr3t::synth {

namespace {

std::int32_t flex_code(double angle, const config::GlobalConfig& cfg) {
	return sensors::adc_quantize(sensors::divider_voltage(sensors::flex_resistance(angle, cfg.flex), cfg.divider),
	                             cfg.divider);
}

std::pair<std::int32_t, std::int32_t> accel_codes(double pitch, double dyn, const config::GlobalConfig& cfg,
                                                  sensors::Rng* rng) {
	const auto [vy, vz] = sensors::accel_output(pitch, dyn, cfg.accelerometer, rng);
	return {sensors::adc_quantize(vy, cfg.divider), sensors::adc_quantize(vz, cfg.divider)};
}

// Dynamic acceleration giving a Z reading `fraction` of the way from rest
// to active while the foot is pitched up. Lifting tilts gravity off Z, so
// that loss is added back.
double lift_dyn(double fraction, double pitch) {
	return fraction * kActiveLiftG + 1.0 - std::cos(pitch * std::numbers::pi / 180.0);
}

class TraceWriter {
public:
	TraceWriter(const config::GlobalConfig& cfg, sensors::Rng& rng) : cfg_(cfg), rng_(rng) {
		trace_.sample_period = cfg.synth.sample_period;
	}

	// flex given as an unrounded ADC code so targeting keeps sub-code precision
	void hold(double ms, double flex, double pitch, double dyn, const std::string& label) {
		const auto n = static_cast<long>(std::llround(ms / cfg_.synth.sample_period));
		for (long i = 0; i < n; ++i) {
			const auto [y, z] = accel_codes(pitch, dyn, cfg_, &rng_);
			trace_.samples.push_back({static_cast<double>(next_++) * cfg_.synth.sample_period, noisy_flex(flex), y, z,
			                          label});
		}
	}

	sensors::SensorTrace take() { return std::move(trace_); }

private:
	std::int32_t noisy_flex(double code) {
		if (cfg_.synth.flex_noise_sigma > 0)
			code += std::normal_distribution<double>(0.0, cfg_.synth.flex_noise_sigma)(rng_);
		const double v = code / sensors::adc_full_scale(cfg_.divider) * cfg_.divider.v_ref;
		return sensors::adc_quantize(v, cfg_.divider);
	}

	const config::GlobalConfig& cfg_;
	sensors::Rng& rng_;
	sensors::SensorTrace trace_;
	long next_ = 0;
};

} // namespace

control::EncoderAnchors default_anchors(const config::GlobalConfig& cfg) {
	const auto layout = piano::build_layout(cfg.layout);
	const auto h_counts = [&](int key) {
		return plant::encoder_counts(kinematics::theta_for_key(layout.key(key).center_x, cfg.mount, cfg.geometry),
		                             cfg.axis_horizontal);
	};
	const double clearance = cfg.mount.base_z - kinematics::tip_drop(0.0, cfg.geometry);
	const double pressed = kinematics::press_angle(clearance + cfg.layout.key_travel, cfg.geometry);
	return {h_counts(cfg.hand.closest_key), h_counts(cfg.hand.furthest_key), 0,
	        plant::encoder_counts(pressed, cfg.axis_vertical)};
}

control::CalibrationSet default_calibration(const config::GlobalConfig& cfg) {
	const auto a = default_anchors(cfg);
	const auto [y_min, z_min] = accel_codes(0.0, 0.0, cfg, nullptr);
	const auto [y_max, z_rest_up] = accel_codes(cfg.synth.foot_up_pitch, 0.0, cfg, nullptr);
	const auto [y0, z_max] = accel_codes(0.0, kActiveLiftG, cfg, nullptr);
	(void)z_rest_up;
	(void)y0;
	control::CalibrationSet c{flex_code(0.0, cfg), flex_code(cfg.synth.flexed_angle, cfg), a.enc_h_min, a.enc_h_max,
	                          y_min, y_max, z_min, z_max, a.enc_hover, a.enc_pressed};
	control::validate(c);
	return c;
}

sensors::SensorTrace calibration_trace(const config::GlobalConfig& cfg, sensors::Rng& rng) {
	const double seg = cfg.synth.segment_ms;
	const double straight = flex_code(0.0, cfg);
	const double flexed = flex_code(cfg.synth.flexed_angle, cfg);
	TraceWriter w(cfg, rng);
	w.hold(seg, straight, 0.0, 0.0, "flex_min");
	w.hold(seg, flexed, 0.0, 0.0, "flex_max");
	w.hold(seg, straight, 0.0, 0.0, "foot_down");
	w.hold(seg, straight, cfg.synth.foot_up_pitch, 0.0, "foot_up");
	w.hold(seg, straight, 0.0, 0.0, "z_rest");
	w.hold(seg, straight, 0.0, kActiveLiftG, "z_active");
	return w.take();
}

std::vector<int> targetable_keys(const config::GlobalConfig& cfg) {
	const auto layout = piano::build_layout(cfg.layout);
	const auto calib = default_calibration(cfg);
	const auto lo = std::min(calib.enc_h_min, calib.enc_h_max);
	const auto hi = std::max(calib.enc_h_min, calib.enc_h_max);
	std::vector<int> out;
	for (const auto& key : layout.keys()) {
		try {
			const auto c = plant::encoder_counts(kinematics::theta_for_key(key.center_x, cfg.mount, cfg.geometry),
			                                     cfg.axis_horizontal);
			if (c >= lo && c <= hi)
				out.push_back(key.index);
		} catch (const ReachError&) {
		}
	}
	return out;
}

double flex_code_for_key(const config::GlobalConfig& cfg, const control::CalibrationSet& calib, int key) {
	const auto layout = piano::build_layout(cfg.layout);
	if (key < 0 || key >= static_cast<int>(layout.keys().size()))
		throw InputError("key " + std::to_string(key) + " is not on the keyboard");
	const double theta = kinematics::theta_for_key(layout.key(key).center_x, cfg.mount, cfg.geometry);
	const double counts = theta * static_cast<double>(plant::counts_per_output_rev(cfg.axis_horizontal)) / 360.0;
	const double lo = static_cast<double>(std::min(calib.enc_h_min, calib.enc_h_max));
	const double hi = static_cast<double>(std::max(calib.enc_h_min, calib.enc_h_max));
	if (counts < lo - 0.5 || counts > hi + 0.5)
		throw ReachError("key " + std::to_string(key) + " (" + piano::note_name(layout.key(key).midi_note) +
		                     ") is outside the calibrated horizontal range",
		                 layout.key(key).center_x);
	const double frac = (counts - static_cast<double>(calib.enc_h_min)) /
	                    static_cast<double>(calib.enc_h_max - calib.enc_h_min);
	return calib.flex_min + frac * (calib.flex_max - calib.flex_min);
}

sensors::SensorTrace press_trace(const config::GlobalConfig& cfg, const PressScript& script, sensors::Rng& rng) {
	if (script.keys.empty())
		throw InputError("press script needs at least one key");
	if (script.repeat < 1)
		throw InputError("repeat must be >= 1");
	if (!(script.speed > 0 && script.speed <= kMaxSpeed))
		throw InputError("speed must be in (0, 1] or max");
	const auto& s = cfg.synth;
	if (!(s.pulse_ms < s.hold_ms && s.pulse_ms < s.rest_ms))
		throw ConfigError("synth.pulse_ms must be shorter than synth.hold_ms and synth.rest_ms");

	const auto calib = default_calibration(cfg);
	std::vector<double> flex;
	for (int key : script.keys)
		flex.push_back(flex_code_for_key(cfg, calib, key));

	TraceWriter w(cfg, rng);
	const double up = s.foot_up_pitch;
	w.hold(s.settle_ms, flex.front(), 0.0, 0.0, "settle");
	for (std::size_t i = 0; i < flex.size(); ++i) {
		for (int r = 0; r < script.repeat; ++r) {
			w.hold(s.pulse_ms, flex[i], up, lift_dyn(script.speed, up), "lift");
			w.hold(s.hold_ms - s.pulse_ms, flex[i], up, 0.0, "hold");
			w.hold(s.pulse_ms, flex[i], 0.0, s.release_speed * kActiveLiftG, "drop");
			const bool last = r + 1 == script.repeat;
			const double next = last && i + 1 < flex.size() ? flex[i + 1] : flex[i];
			w.hold(s.rest_ms - s.pulse_ms, next, 0.0, 0.0, "rest");
		}
	}
	return w.take();
}

WorkspaceFixtures workspace_fixtures(std::size_t n_band, std::size_t n_cap, sensors::Rng& rng) {
	return {analysis::band_sweep(360.0, -kBandElevation, kBandElevation, n_band),
	        analysis::cap_sample(analysis::direction(kThumbCapAzimuth, kThumbCapElevation), kThumbCapHalfAngle, n_cap,
	                             rng)};
}

} // namespace sr3t::synth
