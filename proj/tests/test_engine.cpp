#include "sr3t/config.hpp"
#include "sr3t/engine.hpp"
#include "sr3t/error.hpp"
#include "sr3t/synth.hpp"

#include <doctest.h>

#include <sstream>

using namespace sr3t;
using namespace sr3t::engine;

namespace {

// Hand-built press over C#4 (key 40, the straight-thumb anchor): 600 ms at
// rest, a 40 ms lift pulse with the foot up, hold, drop, rest.
sensors::SensorTrace hand_press() {
	sensors::SensorTrace t;
	auto add = [&](int n, std::int32_t y, std::int32_t z, const char* label) {
		for (int i = 0; i < n; ++i)
			t.samples.push_back({double(t.samples.size()), 2482, y, z, label});
	};
	add(600, 1229, 1474, "settle");
	add(40, 1351, 1720, "lift");
	add(260, 1351, 1441, "hold");
	add(40, 1229, 1499, "drop");
	add(260, 1229, 1474, "rest");
	return t;
}

control::CalibrationSet calibration() {
	return {2482, 1780, 3585, 1386, 1229, 1351, 1474, 1720, 0, 397};
}

std::string events_csv(const EventLog& log, const piano::KeyboardLayout& kb) {
	std::ostringstream os;
	write_events_csv(os, log, kb);
	return os.str();
}

std::string steps_csv(const EventLog& log) {
	std::ostringstream os;
	write_steps_csv(os, log);
	return os.str();
}

Rig default_rig() {
	return config::make_rig({});
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("midi velocity") {
	CHECK(midi_velocity(1800, 1800) == 127);
	CHECK(midi_velocity(0, 1800) == 1);
	CHECK(midi_velocity(900, 1800) == 64);
	CHECK(midi_velocity(5000, 1800) == 127);
}

TEST_CASE("intention detection") {
	const auto c = calibration();
	const control::ControlParams p;
	std::vector<std::pair<double, std::int32_t>> z;
	for (int i = 0; i < 100; ++i)
		z.push_back({double(i), 1474});
	CHECK(intention_detect(z, c, p).empty());

	// single pulse: first sample at or above 1474 + 40
	z[30].second = 1500;
	z[31].second = 1514;
	z[32].second = 1600;
	z[33].second = 1600;
	auto hits = intention_detect(z, c, p);
	REQUIRE(hits.size() == 1);
	CHECK(hits[0] == 31.0);

	// second pulse inside the refractory window is ignored, beyond it counts
	for (int i = 100; i < 400; ++i)
		z.push_back({double(i), 1474});
	z[120].second = 1700;
	z[250].second = 1700;
	hits = intention_detect(z, c, p);
	REQUIRE(hits.size() == 2);
	CHECK(hits[1] == 250.0);
}

TEST_CASE("empty trace gives an empty log") {
	const auto log = run({}, calibration(), default_rig(), {});
	CHECK(log.key_events.empty());
	CHECK(log.latency.empty());
	CHECK(log.steps.empty());
}

TEST_CASE("one lift over key 40 gives one on/off pair") {
	const auto rig = default_rig();
	const auto log = run(hand_press(), calibration(), rig, {});
	REQUIRE(log.key_events.size() == 2);
	CHECK(log.key_events[0].kind == piano::KeyEventKind::on);
	CHECK(log.key_events[0].key_index == 40);
	CHECK(log.key_events[0].velocity == 127);
	CHECK(log.key_events[1].kind == piano::KeyEventKind::off);
	CHECK(log.key_events[1].key_index == 40);
	CHECK(log.air_presses.empty());
	REQUIRE(log.latency.size() == 1);
	CHECK(log.latency[0].intention_t == 600.0);
	// 85 ms of stage delays plus under 2 ms of travel to contact
	CHECK(log.latency[0].delay() > 85.0);
	CHECK(log.latency[0].delay() < 87.0);
}

TEST_CASE("latency composes exactly with an instantaneous plant") {
	auto rig = default_rig();
	for (auto* a : {&rig.h_axis, &rig.v_axis}) {
		a->v_max = 1e9;
		a->a_max = 1e20;
	}
	rig.params.v_cap = 1e9;
	rig.params.kv_z = 1e9;
	SimulationConfig sim;
	sim.latency.mech_motion = 0;
	const auto log = run(hand_press(), calibration(), rig, sim);
	REQUIRE(log.latency.size() == 1);
	CHECK(log.latency[0].delay() == doctest::Approx(35.0).epsilon(1e-6));
}

TEST_CASE("events never precede intention plus the non-mechanical delays") {
	const auto cfg = config::GlobalConfig{};
	sensors::Rng rng(4);
	const auto trace = synth::press_trace(cfg, {synth::targetable_keys(cfg), 0.3, 2}, rng);
	const auto log = run(trace, synth::default_calibration(cfg), default_rig(), {});
	REQUIRE(log.latency.size() == 14);
	for (const auto& r : log.latency)
		CHECK(r.action_t >= r.intention_t + LatencyConfig{}.non_mechanical());
}

TEST_CASE("every crossing over a key yields exactly one key-on") {
	const auto cfg = config::GlobalConfig{};
	sensors::Rng rng(4);
	const auto keys = synth::targetable_keys(cfg);
	const auto trace = synth::press_trace(cfg, {keys, 0.5, 1}, rng);
	const auto log = run(trace, synth::default_calibration(cfg), default_rig(), {});
	std::vector<int> ons, offs;
	for (const auto& e : log.key_events)
		(e.kind == piano::KeyEventKind::on ? ons : offs).push_back(e.key_index);
	CHECK(ons == keys);
	CHECK(offs == keys);
}

TEST_CASE("contact with no key underneath is an air press") {
	auto rig = default_rig();
	piano::LayoutConfig tiny;
	tiny.n_keys = 3; // A0..B0, far left of the mount
	rig.layout = piano::build_layout(tiny);
	const auto log = run(hand_press(), calibration(), rig, {});
	CHECK(log.key_events.empty());
	CHECK(log.air_presses.size() == 1);
}

TEST_CASE("deterministic and concurrent modes agree byte for byte") {
	const auto cfg = config::GlobalConfig{};
	sensors::Rng rng(8);
	auto noisy = cfg;
	noisy.synth.flex_noise_sigma = 2.0;
	const auto trace = synth::press_trace(noisy, {synth::targetable_keys(cfg), 0.7, 1}, rng);
	const auto calib = synth::default_calibration(cfg);
	const auto rig = default_rig();
	SimulationConfig sim;
	sim.verbose = true;
	const auto a = run(trace, calib, rig, sim);
	const auto b = run(trace, calib, rig, sim);
	sim.mode = RunMode::concurrent;
	const auto c = run(trace, calib, rig, sim);
	CHECK(events_csv(a, rig.layout) == events_csv(b, rig.layout));
	CHECK(events_csv(a, rig.layout) == events_csv(c, rig.layout));
	CHECK(steps_csv(a) == steps_csv(c));
	CHECK(a.steps.size() == c.steps.size());
	CHECK_FALSE(a.steps.empty());
}

TEST_CASE("simulation config validation") {
	SimulationConfig sim;
	sim.timestep = 0;
	CHECK_THROWS_AS(validate(sim), ConfigError);
	sim = {};
	sim.timestep = 2;
	sim.latency.sensor_sample = 5; // not a multiple of 2 ms
	CHECK_THROWS_AS(validate(sim), ConfigError);
	sim = {};
	sim.latency.compute = -1;
	CHECK_THROWS_AS(validate(sim), ConfigError);
}

TEST_CASE("csv formats") {
	const auto rig = default_rig();
	EventLog log;
	log.key_events = {{686.781, piano::KeyEventKind::on, 40, 64}, {1026.2, piano::KeyEventKind::off, 40, 0}};
	log.latency = {{600, 686.781}};
	CHECK(events_csv(log, rig.layout) == "t_ms,kind,key_index,note_name,velocity\n"
	                                     "686.781,on,40,C#4,64\n"
	                                     "1026.200,off,40,C#4,0\n");
	std::ostringstream os;
	write_latency_csv(os, log);
	CHECK(os.str() == "intention_t_ms,action_t_ms,delay_ms\n600.000,686.781,86.781\n");
	CHECK(steps_csv({}) == "t_ms,theta_h_counts,theta_v_counts,tip_x,tip_z\n");
}

} // TEST_SUITE
