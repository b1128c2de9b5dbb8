#include "sr3t/plant.hpp"

#include "sr3t/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sr3t::plant {

void validate(const MotorAxis& axis, const char* section) {
	const std::string s = section;
	if (!(axis.gear_ratio >= 1))
		throw ConfigError(s + ".gear_ratio must be >= 1");
	if (axis.encoder_cpr <= 0)
		throw ConfigError(s + ".encoder_cpr must be > 0");
	if (axis.quadrature != 1 && axis.quadrature != 2 && axis.quadrature != 4)
		throw ConfigError(s + ".quadrature must be 1, 2 or 4");
	if (!(axis.v_max > 0))
		throw ConfigError(s + ".v_max must be > 0");
	if (!(axis.a_max > 0))
		throw ConfigError(s + ".a_max must be > 0");
	if (!(axis.nominal_torque > 0))
		throw ConfigError(s + ".nominal_torque must be > 0");
	const double cpr = axis.gear_ratio * axis.encoder_cpr * axis.quadrature;
	if (cpr != std::floor(cpr))
		throw ConfigError(s + ".gear_ratio must give an integer number of counts per output revolution");
}

std::int64_t counts_per_output_rev(const MotorAxis& axis) {
	return static_cast<std::int64_t>(std::llround(axis.gear_ratio * axis.encoder_cpr * axis.quadrature));
}

std::int64_t encoder_counts(double angle_deg, const MotorAxis& axis) {
	return std::llround(angle_deg * static_cast<double>(counts_per_output_rev(axis)) / 360.0);
}

double counts_to_degrees(double counts, const MotorAxis& axis) {
	return counts * 360.0 / static_cast<double>(counts_per_output_rev(axis));
}

namespace {

constexpr double kMsToS = 1e-3;

double seg_angle(const StepProfile::Segment& s, double local_ms) {
	const double u = local_ms * kMsToS;
	return s.angle0 + s.v0 * u + 0.5 * s.accel * u * u;
}

double seg_velocity(const StepProfile::Segment& s, double local_ms) {
	return s.v0 + s.accel * local_ms * kMsToS;
}

// Earliest local time in [0, len] where the segment reaches `level`, or -1.
double first_hit(const StepProfile::Segment& s, double level) {
	const double c = s.angle0 - level; // solve c + v u + a/2 u^2 = 0
	const double len_s = s.len * kMsToS;
	if (c == 0)
		return 0.0;
	double best = std::numeric_limits<double>::infinity();
	if (s.accel == 0) {
		if (s.v0 != 0) {
			const double u = -c / s.v0;
			if (u >= 0)
				best = u;
		}
	} else {
		const double disc = s.v0 * s.v0 - 2.0 * s.accel * c;
		if (disc >= 0) {
			const double sq = std::sqrt(disc);
			const double q = -0.5 * (s.v0 + std::copysign(sq, s.v0 == 0 ? 1.0 : s.v0));
			const double r1 = q / (0.5 * s.accel);
			const double r2 = q != 0 ? c / q : r1;
			for (double u : {r1, r2})
				if (u >= 0 && u < best)
					best = u;
		}
	}
	if (best <= len_s * (1 + 1e-12))
		return std::min(best, len_s) / kMsToS;
	return -1.0;
}

} // namespace

struct ProfileBuilder {
	static StepProfile make(std::vector<StepProfile::Segment> segs, double duration) {
		StepProfile p;
		p.segments_ = std::move(segs);
		p.duration_ = duration;
		return p;
	}
};

const StepProfile::Segment& StepProfile::segment_at(double t_ms) const {
	for (const auto& s : segments_)
		if (t_ms <= s.t0 + s.len)
			return s;
	return segments_.back();
}

double StepProfile::angle_at(double t_ms) const {
	const auto& s = segment_at(t_ms);
	return seg_angle(s, std::clamp(t_ms - s.t0, 0.0, s.len));
}

double StepProfile::velocity_at(double t_ms) const {
	const auto& s = segment_at(t_ms);
	return seg_velocity(s, std::clamp(t_ms - s.t0, 0.0, s.len));
}

std::vector<StepProfile::Crossing> StepProfile::crossings(double level) const {
	std::vector<Crossing> out;
	for (const auto& s : segments_) {
		// Split at the velocity zero so each piece is monotone.
		std::vector<std::pair<double, double>> pieces; // local [a, b] in ms
		double turn = -1;
		if (s.accel != 0) {
			const double u = -s.v0 / s.accel / kMsToS;
			if (u > 0 && u < s.len)
				turn = u;
		}
		if (turn > 0) {
			pieces.emplace_back(0.0, turn);
			pieces.emplace_back(turn, s.len);
		} else {
			pieces.emplace_back(0.0, s.len);
		}
		for (auto [a, b] : pieces) {
			const double ya = seg_angle(s, a);
			const double yb = seg_angle(s, b);
			const bool rising = ya < level && yb >= level;
			const bool falling = ya >= level && yb < level;
			if (!rising && !falling)
				continue;
			StepProfile::Segment sub{s.t0 + a, b - a, ya, seg_velocity(s, a), s.accel};
			double hit = first_hit(sub, level);
			if (hit < 0)
				hit = sub.len; // numerical edge: crossing sits on the piece end
			out.push_back({sub.t0 + hit, rising, seg_velocity(sub, hit)});
		}
	}
	return out;
}

StepResult axis_step_profiled(const AxisState& state, const AxisCommand& cmd, double dt_ms,
                              const MotorAxis& axis) {
	if (!(dt_ms > 0))
		throw InputError("axis step dt must be > 0");
	const double dt_s = dt_ms * kMsToS;
	const double a = axis.a_max;
	const double v0 = state.velocity;

	double target_angle = 0.0;
	double v_target = 0.0;
	if (cmd.mode == AxisMode::velocity) {
		v_target = std::clamp(cmd.setpoint, -axis.v_max, axis.v_max);
	} else {
		target_angle = counts_to_degrees(cmd.setpoint, axis);
		const double rem = target_angle - state.angle;
		const double limit = std::clamp(cmd.velocity_limit, 0.0, axis.v_max);
		if (rem != 0)
			v_target = std::copysign(std::min(limit, std::sqrt(2.0 * a * std::abs(rem))), rem);
	}

	const double dv = v_target - v0;
	const double t_acc = std::min(dt_s, std::abs(dv) / a);
	const double acc = dv == 0 ? 0.0 : std::copysign(a, dv);
	const double v1 = t_acc < dt_s ? v_target : v0 + acc * t_acc;

	std::vector<StepProfile::Segment> segs;
	if (t_acc > 0)
		segs.push_back({0.0, t_acc / kMsToS, state.angle, v0, acc});
	const double cruise_start_angle = state.angle + v0 * t_acc + 0.5 * acc * t_acc * t_acc;
	if (t_acc < dt_s)
		segs.push_back({t_acc / kMsToS, dt_ms - t_acc / kMsToS, cruise_start_angle, v1, 0.0});

	if (cmd.mode == AxisMode::position) {
		// Stop dead on the setpoint the first time the path reaches it.
		for (std::size_t i = 0; i < segs.size(); ++i) {
			const double hit = first_hit(segs[i], target_angle);
			const bool moving = segs[i].v0 != 0 || segs[i].accel != 0;
			if (hit < 0 || (!moving && segs[i].angle0 != target_angle))
				continue;
			const double stop_t = segs[i].t0 + hit;
			segs.resize(i + 1);
			segs[i].len = hit;
			if (segs[i].len <= 0)
				segs.pop_back();
			if (stop_t < dt_ms)
				segs.push_back({stop_t, dt_ms - stop_t, target_angle, 0.0, 0.0});
			StepResult r;
			r.state.angle = target_angle;
			r.state.velocity = 0.0;
			r.state.encoder_count = encoder_counts(target_angle, axis);
			if (segs.empty())
				segs.push_back({0.0, dt_ms, target_angle, 0.0, 0.0});
			r.profile = ProfileBuilder::make(std::move(segs), dt_ms);
			return r;
		}
	}

	StepResult r;
	const auto& last = segs.back();
	r.state.angle = seg_angle(last, last.len);
	r.state.velocity = seg_velocity(last, last.len);
	r.state.encoder_count = encoder_counts(r.state.angle, axis);
	r.profile = ProfileBuilder::make(std::move(segs), dt_ms);
	return r;
}

AxisState axis_step(const AxisState& state, const AxisCommand& cmd, double dt_ms, const MotorAxis& axis) {
	return axis_step_profiled(state, cmd, dt_ms, axis).state;
}

double torque_margin(double required_nm, const MotorAxis& axis) {
	if (!(required_nm > 0))
		throw InputError("required torque must be > 0");
	return axis.nominal_torque * axis.gear_ratio / required_nm;
}

} // namespace sr3t::plant
