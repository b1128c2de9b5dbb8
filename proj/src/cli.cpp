#include "sr3t/cli.hpp"

#include "sr3t/analysis.hpp"
#include "sr3t/config.hpp"
#include "sr3t/engine.hpp"
#include "sr3t/error.hpp"
#include "sr3t/midi.hpp"
#include "sr3t/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace sr3t::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct Options {
	std::string config_path;
	std::optional<std::uint64_t> seed;
	std::string out_dir = ".";
	bool verbose = false;

	std::string scenario;
	int key = -1;
	std::string speed = "";
	int repeat = 1;
	std::size_t band_samples = 1'000'000;
	std::size_t cap_samples = 1'000'000;

	std::string trace_path;
	std::string anchors_path;
	std::string calibration_path;
	std::string mode;
	bool midi = false;

	std::string sr3t_path;
	std::string thumb_path;
	std::size_t bins = 100'000;
	std::string latency_path;
};

config::GlobalConfig load(const Options& o) {
	auto cfg = o.config_path.empty() ? config::GlobalConfig{} : config::load_config(o.config_path);
	if (o.seed)
		cfg.simulation.seed = *o.seed;
	if (o.verbose)
		cfg.simulation.verbose = true;
	if (!o.mode.empty()) {
		if (o.mode == "deterministic")
			cfg.simulation.mode = engine::RunMode::deterministic;
		else if (o.mode == "concurrent")
			cfg.simulation.mode = engine::RunMode::concurrent;
		else
			throw UsageError("--mode must be deterministic or concurrent");
	}
	config::validate(cfg);
	return cfg;
}

fs::path out_file(const Options& o, const std::string& name) {
	std::error_code ec;
	fs::create_directories(o.out_dir, ec);
	if (ec)
		throw IoError("cannot create output directory " + o.out_dir + ": " + ec.message());
	return fs::path(o.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
	std::ofstream os(p, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + p.string());
	return os;
}

double parse_speed(const std::string& s, double fallback) {
	if (s.empty())
		return fallback;
	if (s == "max")
		return synth::kMaxSpeed;
	try {
		std::size_t used = 0;
		const double v = std::stod(s, &used);
		if (used == s.size() && v > 0 && v <= 1)
			return v;
	} catch (const std::exception&) {
	}
	throw UsageError("--speed must be 'max' or a fraction in (0, 1]");
}

void write_trace(const Options& o, const sensors::SensorTrace& trace, std::ostream& out) {
	const auto path = out_file(o, "trace.csv");
	sensors::write_trace_csv(path.string(), trace);
	out << "wrote " << path.string() << " (" << trace.samples.size() << " samples)\n";
}

void cmd_synth(const Options& o, std::ostream& out) {
	const auto cfg = load(o);
	sensors::Rng rng(cfg.simulation.seed);
	if (o.scenario == "calibration") {
		write_trace(o, synth::calibration_trace(cfg, rng), out);
		const auto path = out_file(o, "anchors.txt");
		control::write_anchors(path.string(), synth::default_anchors(cfg));
		out << "wrote " << path.string() << '\n';
	} else if (o.scenario == "press") {
		if (o.key < 0)
			throw UsageError("synth press needs --key");
		synth::PressScript script{{o.key}, parse_speed(o.speed, cfg.synth.press_speed), o.repeat};
		write_trace(o, synth::press_trace(cfg, script, rng), out);
	} else if (o.scenario == "scale") {
		synth::PressScript script{synth::targetable_keys(cfg), parse_speed(o.speed, cfg.synth.press_speed), o.repeat};
		write_trace(o, synth::press_trace(cfg, script, rng), out);
	} else if (o.scenario == "workspace") {
		const auto fx = synth::workspace_fixtures(o.band_samples, o.cap_samples, rng);
		const auto band = out_file(o, "sr3t_workspace.csv");
		const auto cap = out_file(o, "thumb_workspace.csv");
		analysis::write_directions_csv(band.string(), fx.sr3t_band);
		analysis::write_directions_csv(cap.string(), fx.thumb_cap);
		out << "wrote " << band.string() << " (" << fx.sr3t_band.dirs.size() << " directions)\n"
		    << "wrote " << cap.string() << " (" << fx.thumb_cap.dirs.size() << " directions)\n";
	} else {
		throw UsageError("unknown scenario '" + o.scenario + "' (calibration, press, scale, workspace)");
	}
}

void cmd_calibrate(const Options& o, std::ostream& out) {
	load(o);
	const auto trace = sensors::read_trace_csv(o.trace_path);
	const auto calib = control::calibrate_from_trace(trace, control::read_anchors(o.anchors_path));
	const auto path = out_file(o, "calibration.txt");
	control::write_calibration(path.string(), calib);
	control::write_calibration(out, calib);
	out << "wrote " << path.string() << '\n';
}

void cmd_simulate(const Options& o, std::ostream& out) {
	const auto cfg = load(o);
	const auto trace = sensors::read_trace_csv(o.trace_path);
	sensors::validate(trace, cfg.divider);
	const auto calib = control::read_calibration(o.calibration_path);
	const auto rig = config::make_rig(cfg);
	const auto log = engine::run(trace, calib, rig, cfg.simulation);

	const auto events = out_file(o, "events.csv");
	{
		auto os = open_out(events);
		engine::write_events_csv(os, log, rig.layout);
	}
	const auto latency = out_file(o, "latency.csv");
	{
		auto os = open_out(latency);
		engine::write_latency_csv(os, log);
	}
	if (cfg.simulation.verbose) {
		auto os = open_out(out_file(o, "steps.csv"));
		engine::write_steps_csv(os, log);
	}
	if (o.midi) {
		if (log.key_events.empty())
			out << "no key events, MIDI file skipped\n";
		else
			midi::write_midi_file(out_file(o, "events.mid").string(), log.key_events, rig.layout);
	}
	const auto ons = std::count_if(log.key_events.begin(), log.key_events.end(),
	                               [](const auto& e) { return e.kind == piano::KeyEventKind::on; });
	out << ons << " key presses, " << log.air_presses.size() << " air presses, " << log.latency.size()
	    << " latency records\n"
	    << "wrote " << fs::path(o.out_dir).string() << '\n';
}

void emit(const Options& o, std::ostream& out, const std::string& name, const std::string& title,
          const analysis::Report& r) {
	analysis::write_report_text(out, title, r);
	auto os = open_out(out_file(o, name));
	analysis::write_report_kv(os, r);
}

void cmd_workspace(const Options& o, std::ostream& out) {
	load(o);
	const auto sr3t = analysis::read_directions_csv(o.sr3t_path);
	const auto thumb = analysis::read_directions_csv(o.thumb_path);
	const double a = analysis::solid_angle(sr3t, o.bins);
	const double b = analysis::solid_angle(thumb, o.bins);
	emit(o, out, "workspace.txt", "workspace",
	     {{"n_bins", std::to_string(o.bins)},
	      {"sr3t_sr", engine::format_fixed(a, 4)},
	      {"thumb_sr", engine::format_fixed(b, 4)},
	      {"ratio", engine::format_fixed(a / b, 4)}});
}

void cmd_latency(const Options& o, std::ostream& out) {
	const auto cfg = load(o);
	const auto stats = analysis::latency_stats(engine::read_latency_csv(o.latency_path), cfg.budget.latency_budget_ms);
	emit(o, out, "latency_report.txt", "latency", analysis::to_report(stats));
}

void cmd_range(const Options& o, std::ostream& out) {
	const auto cfg = load(o);
	const auto calib = o.calibration_path.empty() ? synth::default_calibration(cfg)
	                                              : control::read_calibration(o.calibration_path);
	const auto layout = piano::build_layout(cfg.layout);
	const int n = analysis::range_increase(cfg.mount, cfg.geometry, calib, layout, cfg.axis_horizontal,
	                                       cfg.hand.pinkie_x);
	emit(o, out, "range.txt", "range",
	     {{"pinkie_x_mm", engine::format_fixed(cfg.hand.pinkie_x, 2)}, {"whole_notes_beyond_pinkie", std::to_string(n)}});
}

void cmd_budget(const Options& o, std::ostream& out) {
	const auto cfg = load(o);
	auto b = cfg.budget;
	b.key_force_n = cfg.layout.press_force;
	if (!o.latency_path.empty())
		b.measured_latency_ms = analysis::latency_stats(engine::read_latency_csv(o.latency_path)).mean;
	const auto report = analysis::budget_check(b, cfg.geometry, cfg.axis_vertical, cfg.simulation.latency);
	emit(o, out, "budget.txt", "budget", analysis::to_report(report));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
	Options o;
	CLI::App app{"Supernumerary robotic thumb simulator", "sr3t"};
	app.require_subcommand(1);
	app.add_option("--config", o.config_path, "Config file (defaults built in)")->check(CLI::ExistingFile);
	app.add_option("--seed", o.seed, "Override simulation.seed");
	app.add_option("--out", o.out_dir, "Output directory");
	app.add_flag("--verbose", o.verbose, "Keep the per-step log");

	auto* synth_cmd = app.add_subcommand("synth", "Generate a sensor trace or workspace fixture")->fallthrough();
	synth_cmd->add_option("scenario", o.scenario, "calibration | press | scale | workspace")->required();
	synth_cmd->add_option("--key", o.key, "Key index for press");
	synth_cmd->add_option("--speed", o.speed, "max or a fraction of the calibrated lift span");
	synth_cmd->add_option("--repeat", o.repeat, "Presses per key")->check(CLI::PositiveNumber);
	synth_cmd->add_option("--band-samples", o.band_samples, "Directions in the band sweep")->check(CLI::PositiveNumber);
	synth_cmd->add_option("--cap-samples", o.cap_samples, "Directions in the thumb cap")->check(CLI::PositiveNumber);

	auto* cal_cmd = app.add_subcommand("calibrate", "Compute a calibration from a labelled trace")->fallthrough();
	cal_cmd->add_option("--trace", o.trace_path)->required();
	cal_cmd->add_option("--anchors", o.anchors_path)->required();

	auto* sim_cmd = app.add_subcommand("simulate", "Run the control pipeline over a trace")->fallthrough();
	sim_cmd->add_option("--trace", o.trace_path)->required();
	sim_cmd->add_option("--calibration", o.calibration_path)->required();
	sim_cmd->add_option("--mode", o.mode, "deterministic | concurrent");
	sim_cmd->add_flag("--midi", o.midi, "Also write events.mid");

	auto* an_cmd = app.add_subcommand("analyze", "Reports")->fallthrough();
	an_cmd->require_subcommand(1);
	auto* ws = an_cmd->add_subcommand("workspace", "Solid angles and ratio")->fallthrough();
	ws->add_option("--sr3t", o.sr3t_path)->required();
	ws->add_option("--thumb", o.thumb_path)->required();
	ws->add_option("--bins", o.bins)->check(CLI::Range(std::size_t{100}, std::size_t{100'000'000}));
	auto* lat = an_cmd->add_subcommand("latency", "Latency statistics")->fallthrough();
	lat->add_option("--log", o.latency_path, "latency.csv from simulate")->required();
	auto* rng = an_cmd->add_subcommand("range", "Whole notes beyond the pinkie")->fallthrough();
	rng->add_option("--calibration", o.calibration_path, "Defaults to the configured fixture");
	auto* bud = an_cmd->add_subcommand("budget", "Latency, mass and torque budgets")->fallthrough();
	bud->add_option("--latency", o.latency_path, "latency.csv; defaults to the summed stage delays");

	try {
		std::vector<std::string> reversed(args.rbegin(), args.rend());
		app.parse(reversed);
	} catch (const CLI::CallForHelp&) {
		out << app.help();
		return kExitOk;
	} catch (const CLI::CallForAllHelp&) {
		out << app.help("", CLI::AppFormatMode::All);
		return kExitOk;
	} catch (const CLI::ParseError& e) {
		err << "usage error: " << e.what() << '\n' << app.help();
		return kExitUsage;
	}

	try {
		if (synth_cmd->parsed())
			cmd_synth(o, out);
		else if (cal_cmd->parsed())
			cmd_calibrate(o, out);
		else if (sim_cmd->parsed())
			cmd_simulate(o, out);
		else if (ws->parsed())
			cmd_workspace(o, out);
		else if (lat->parsed())
			cmd_latency(o, out);
		else if (rng->parsed())
			cmd_range(o, out);
		else if (bud->parsed())
			cmd_budget(o, out);
	} catch (const UsageError& e) {
		err << "usage error: " << e.what() << '\n';
		return kExitUsage;
	} catch (const Error& e) {
		err << "error: " << e.what() << '\n';
		return e.is_validation() ? kExitValidation : kExitRuntime;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << '\n';
		return kExitRuntime;
	}
	return kExitOk;
}

} // namespace sr3t::cli
