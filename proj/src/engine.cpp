#include "sr3t/engine.hpp"

#include "sr3t/error.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace sr3t::engine {

using sensors::format_number;

std::string format_fixed(double v, int decimals) {
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
	std::string s = buf;
	if (s == "-0" || s.rfind("-0.", 0) == 0) {
		// avoid "-0.000" for tiny negatives
		bool all_zero = std::all_of(s.begin() + 1, s.end(), [](char c) { return c == '0' || c == '.'; });
		if (all_zero)
			s.erase(0, 1);
	}
	return s;
}

namespace {

std::size_t delay_ticks(double delay_ms, double dt, const char* name) {
	if (!(delay_ms >= 0))
		throw ConfigError(std::string("latency.") + name + " must be >= 0");
	const double n = delay_ms / dt;
	if (std::abs(n - std::round(n)) > 1e-9)
		throw ConfigError(std::string("latency.") + name + " must be a multiple of simulation.timestep");
	return static_cast<std::size_t>(std::llround(n));
}

/// Blocking single-consumer queue between the stepper and a pipeline.
template <typename T>
class Channel {
public:
	void send(T value) {
		{
			std::lock_guard lock(mu_);
			q_.push_back(std::move(value));
		}
		cv_.notify_one();
	}

	void close() {
		{
			std::lock_guard lock(mu_);
			closed_ = true;
		}
		cv_.notify_all();
	}

	std::optional<T> receive() {
		std::unique_lock lock(mu_);
		cv_.wait(lock, [&] { return !q_.empty() || closed_; });
		if (q_.empty())
			return std::nullopt;
		T v = std::move(q_.front());
		q_.pop_front();
		return v;
	}

private:
	std::mutex mu_;
	std::condition_variable cv_;
	std::deque<T> q_;
	bool closed_ = false;
};

struct Job {
	std::int64_t tick;
	sensors::SensorSample sample;
	std::int64_t h_counts;
};

struct Output {
	std::int64_t tick;
	int pipeline; // 0 horizontal, 1 vertical
	plant::AxisCommand cmd;
};

struct CommandPair {
	plant::AxisCommand h;
	plant::AxisCommand v;
};

/// Computes both control laws either inline or on two worker threads. The
/// results are identical; threads only change where the arithmetic runs.
class Pipelines {
public:
	Pipelines(const control::CalibrationSet& calib, const control::ControlParams& params, RunMode mode)
		: calib_(calib), params_(params), mode_(mode) {
		if (mode_ == RunMode::concurrent) {
			h_thread_ = std::thread([this] { worker(0, h_in_); });
			v_thread_ = std::thread([this] { worker(1, v_in_); });
		}
	}

	~Pipelines() {
		if (mode_ == RunMode::concurrent) {
			h_in_.close();
			v_in_.close();
			h_thread_.join();
			v_thread_.join();
		}
	}

	Pipelines(const Pipelines&) = delete;
	Pipelines& operator=(const Pipelines&) = delete;

	CommandPair evaluate(const Job& job) {
		if (mode_ == RunMode::deterministic)
			return {compute(0, job), compute(1, job)};
		h_in_.send(job);
		v_in_.send(job);
		std::vector<Output> merged;
		for (int i = 0; i < 2; ++i) {
			auto o = out_.receive();
			if (!o)
				throw Error("control pipeline stopped unexpectedly");
			merged.push_back(*o);
		}
		// Merge by timestamp, horizontal before vertical on ties.
		std::sort(merged.begin(), merged.end(), [](const Output& a, const Output& b) {
			return a.tick != b.tick ? a.tick < b.tick : a.pipeline < b.pipeline;
		});
		if (merged[0].tick != job.tick || merged[1].tick != job.tick || merged[0].pipeline != 0 ||
		    merged[1].pipeline != 1)
			throw Error("control pipelines out of step");
		return {merged[0].cmd, merged[1].cmd};
	}

private:
	plant::AxisCommand compute(int pipeline, const Job& job) const {
		if (pipeline == 0)
			return control::horizontal_update(job.sample.flex_adc, calib_, params_, job.h_counts);
		return control::vertical_update(job.sample.acc_y_adc, job.sample.acc_z_adc, calib_, params_);
	}

	void worker(int pipeline, Channel<Job>& in) {
		while (auto job = in.receive())
			out_.send({job->tick, pipeline, compute(pipeline, *job)});
	}

	const control::CalibrationSet& calib_;
	const control::ControlParams& params_;
	RunMode mode_;
	Channel<Job> h_in_, v_in_;
	Channel<Output> out_;
	std::thread h_thread_, v_thread_;
};

} // namespace

void validate(const SimulationConfig& sim) {
	if (!(sim.timestep > 0))
		throw ConfigError("simulation.timestep must be > 0");
	const auto& l = sim.latency;
	delay_ticks(l.sensor_sample, sim.timestep, "sensor_sample");
	delay_ticks(l.adc_transport, sim.timestep, "adc_transport");
	delay_ticks(l.compute, sim.timestep, "compute");
	delay_ticks(l.command_transport, sim.timestep, "command_transport");
	delay_ticks(l.controller_process, sim.timestep, "controller_process");
	delay_ticks(l.mech_motion, sim.timestep, "mech_motion");
}

int midi_velocity(double angular_speed, double v_cap) {
	if (!(angular_speed >= 0))
		throw InputError("angular speed must be >= 0");
	if (!(v_cap > 0))
		throw InputError("v_cap must be > 0");
	const double v = std::floor(127.0 * angular_speed / v_cap + 0.5);
	return static_cast<int>(std::clamp(v, 1.0, 127.0));
}

std::vector<double> intention_detect(const std::vector<std::pair<double, std::int32_t>>& z_stream,
                                     const control::CalibrationSet& calib, const control::ControlParams& params) {
	control::validate(calib);
	const double dir = calib.z_max > calib.z_min ? 1.0 : -1.0;
	const double level = calib.z_min + dir * params.z_threshold;
	std::vector<double> out;
	bool armed = false;
	double last = -std::numeric_limits<double>::infinity();
	for (const auto& [t, z] : z_stream) {
		const bool above = dir * (z - level) >= 0;
		if (!above) {
			armed = true;
			continue;
		}
		if (armed && t - last >= params.refractory_ms) {
			out.push_back(t);
			last = t;
		}
		armed = false;
	}
	return out;
}

double contact_angle(const kinematics::FingerGeometry& g, const kinematics::MountPose& m) {
	return kinematics::press_angle(m.base_z - kinematics::tip_drop(0.0, g), g);
}

EventLog run(const sensors::SensorTrace& trace, const control::CalibrationSet& calib, const Rig& rig,
             const SimulationConfig& sim) {
	validate(sim);
	control::validate(calib, rig.geometry, rig.h_axis, rig.v_axis);
	EventLog log;
	if (trace.empty())
		return log;

	const double dt = sim.timestep;
	const auto& lat = sim.latency;
	DelayLine<sensors::SensorSample> st_sample(delay_ticks(lat.sensor_sample, dt, "sensor_sample"));
	DelayLine<sensors::SensorSample> st_adc(delay_ticks(lat.adc_transport, dt, "adc_transport"));
	DelayLine<CommandPair> st_compute(delay_ticks(lat.compute, dt, "compute"));
	DelayLine<CommandPair> st_cmd(delay_ticks(lat.command_transport, dt, "command_transport"));
	DelayLine<CommandPair> st_ctrl(delay_ticks(lat.controller_process, dt, "controller_process"));
	DelayLine<CommandPair> st_mech(delay_ticks(lat.mech_motion, dt, "mech_motion"));

	Pipelines pipes(calib, rig.params, sim.mode);

	const double contact = contact_angle(rig.geometry, rig.mount);
	const double t0 = trace.samples.front().t;
	const double t_end = trace.samples.back().t + lat.total() + dt;
	const auto n_ticks = static_cast<std::int64_t>(std::ceil((t_end - t0) / dt - 1e-9));

	plant::AxisState h_state, v_state;
	plant::AxisCommand h_active{plant::AxisMode::position, 0.0, 0.0};
	plant::AxisCommand v_active{plant::AxisMode::position, 0.0, 0.0};
	std::optional<int> pressed_key;
	std::size_t cursor = 0;

	for (std::int64_t k = 0; k < n_ticks; ++k) {
		const double t = t0 + static_cast<double>(k) * dt;
		std::optional<sensors::SensorSample> raw;
		while (cursor + 1 < trace.samples.size() && trace.samples[cursor + 1].t <= t + 1e-9)
			++cursor;
		if (trace.samples[cursor].t <= t + 1e-9 && t <= trace.samples.back().t + 1e-9)
			raw = trace.samples[cursor];

		auto delayed = st_adc.push(st_sample.push(std::move(raw)));
		std::optional<CommandPair> cmd;
		if (delayed)
			cmd = pipes.evaluate({k, *delayed, h_state.encoder_count});
		if (auto arrived = st_mech.push(st_ctrl.push(st_cmd.push(st_compute.push(cmd))))) {
			h_active = arrived->h;
			v_active = arrived->v;
		}

		const auto h = plant::axis_step_profiled(h_state, h_active, dt, rig.h_axis);
		const auto v = plant::axis_step_profiled(v_state, v_active, dt, rig.v_axis);

		for (const auto& c : v.profile.crossings(contact)) {
			const double te = t + c.t;
			if (c.rising) {
				const auto tip = kinematics::tip_on_keyboard({h.profile.angle_at(c.t), contact}, rig.geometry,
				                                             rig.mount);
				const auto key = rig.layout.key_at(tip.x, tip.y);
				if (key) {
					pressed_key = key->index;
					log.key_events.push_back({te, piano::KeyEventKind::on, key->index,
					                          midi_velocity(std::abs(c.velocity), rig.params.v_cap)});
				} else {
					log.air_presses.push_back(te);
				}
			} else {
				if (pressed_key) {
					log.key_events.push_back({te, piano::KeyEventKind::off, *pressed_key, 0});
					pressed_key.reset();
				}
			}
		}

		h_state = h.state;
		v_state = v.state;
		if (sim.verbose) {
			const auto tip =
				kinematics::tip_on_keyboard({h_state.angle, v_state.angle}, rig.geometry, rig.mount);
			log.steps.push_back({t + dt, h_state.encoder_count, v_state.encoder_count, tip.x, tip.z});
		}
	}

	// Pair each key-on with the latest intention since the previous key-on.
	std::vector<std::pair<double, std::int32_t>> z_stream;
	z_stream.reserve(trace.samples.size());
	for (const auto& s : trace.samples)
		z_stream.emplace_back(s.t, s.acc_z_adc);
	const auto intentions = intention_detect(z_stream, calib, rig.params);
	double prev_on = -std::numeric_limits<double>::infinity();
	for (const auto& e : log.key_events) {
		if (e.kind != piano::KeyEventKind::on)
			continue;
		std::optional<double> best;
		for (double it : intentions)
			if (it > prev_on && it <= e.t)
				best = it;
		if (best)
			log.latency.push_back({*best, e.t});
		prev_on = e.t;
	}
	return log;
}

void write_events_csv(std::ostream& os, const EventLog& log, const piano::KeyboardLayout& layout) {
	os << "t_ms,kind,key_index,note_name,velocity\n";
	for (const auto& e : log.key_events)
		os << format_fixed(e.t, 3) << ',' << (e.kind == piano::KeyEventKind::on ? "on" : "off") << ','
		   << e.key_index << ',' << piano::note_name(layout.key(e.key_index).midi_note) << ',' << e.velocity
		   << '\n';
}

void write_steps_csv(std::ostream& os, const EventLog& log) {
	os << "t_ms,theta_h_counts,theta_v_counts,tip_x,tip_z\n";
	for (const auto& s : log.steps)
		os << format_number(s.t) << ',' << s.theta_h_counts << ',' << s.theta_v_counts << ','
		   << format_fixed(s.tip_x, 4) << ',' << format_fixed(s.tip_z, 4) << '\n';
}

void write_latency_csv(std::ostream& os, const EventLog& log) {
	os << "intention_t_ms,action_t_ms,delay_ms\n";
	for (const auto& r : log.latency)
		os << format_fixed(r.intention_t, 3) << ',' << format_fixed(r.action_t, 3) << ','
		   << format_fixed(r.delay(), 3) << '\n';
}

std::vector<LatencyRecord> read_latency_csv(const std::string& path) {
	std::ifstream is(path, std::ios::binary);
	if (!is)
		throw IoError("cannot open " + path);
	std::string line;
	if (!std::getline(is, line) || line.rfind("intention_t_ms,action_t_ms", 0) != 0)
		throw InputError(path + ": expected latency CSV header");
	std::vector<LatencyRecord> out;
	int line_no = 1;
	while (std::getline(is, line)) {
		++line_no;
		if (line.empty() || line == "\r")
			continue;
		std::istringstream ls(line);
		LatencyRecord r;
		char comma = 0;
		if (!(ls >> r.intention_t >> comma >> r.action_t) || comma != ',')
			throw InputError(path + ":" + std::to_string(line_no) + ": malformed latency record");
		out.push_back(r);
	}
	return out;
}

} // namespace sr3t::engine
