#include "oracles.hpp"

#include "sr3t/cli.hpp"
#include "sr3t/control.hpp"
#include "sr3t/engine.hpp"
#include "sr3t/error.hpp"
#include "sr3t/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sr3t;
namespace fs = std::filesystem;

namespace {

struct Workdir {
	fs::path dir;
	explicit Workdir(const std::string& name) : dir(fs::temp_directory_path() / ("sr3t_cli_" + name)) {
		fs::remove_all(dir);
		fs::create_directories(dir);
	}
	~Workdir() { fs::remove_all(dir); }
	std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

int invoke(std::vector<std::string> args, std::string* out = nullptr) {
	std::ostringstream o, e;
	const int rc = cli::run(args, o, e);
	if (out)
		*out = o.str() + e.str();
	return rc;
}

std::string slurp(const std::string& path) {
	std::ifstream is(path, std::ios::binary);
	std::stringstream ss;
	ss << is.rdbuf();
	return ss.str();
}

std::vector<std::string> csv_lines(const std::string& path) {
	std::istringstream is(slurp(path));
	std::vector<std::string> lines;
	for (std::string l; std::getline(is, l);)
		lines.push_back(l);
	return lines;
}

void calibrate(const Workdir& w) {
	REQUIRE(invoke({"synth", "calibration", "--out", w / "cal"}) == 0);
	REQUIRE(invoke({"calibrate", "--trace", w / "cal/trace.csv", "--anchors", w / "cal/anchors.txt", "--out",
	              w / "cal"}) == 0);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("calibration trace carries all six labels") {
	Workdir w("labels");
	REQUIRE(invoke({"synth", "calibration", "--out", w.dir.string()}) == 0);
	const auto trace = sensors::read_trace_csv(w / "trace.csv");
	std::set<std::string> labels;
	for (const auto& s : trace.samples)
		labels.insert(s.label);
	for (const char* l : control::kCalibrationLabels)
		CHECK(labels.count(l) == 1);
}

TEST_CASE("noise-free calibration equals the analytic default") {
	const config::GlobalConfig cfg;
	sensors::Rng rng(1);
	const auto c = control::calibrate_from_trace(synth::calibration_trace(cfg, rng), synth::default_anchors(cfg));
	CHECK(c == synth::default_calibration(cfg));
	CHECK(c.flex_min == 2482);
	CHECK(c.flex_max == 1780);
	CHECK(c.y_min == 1229);
	CHECK(c.y_max == 1351);
	CHECK(c.z_min == 1474);
	CHECK(c.z_max == 1720);
	CHECK(c.enc_hover == 0);
}

TEST_CASE("targetable keys span the hand anchors") {
	CHECK(synth::targetable_keys({}) == std::vector<int>{40, 41, 42, 43, 44, 45, 46});
	const config::GlobalConfig cfg;
	const auto c = synth::default_calibration(cfg);
	CHECK(synth::flex_code_for_key(cfg, c, 40) == doctest::Approx(c.flex_min).epsilon(1e-3));
	CHECK(synth::flex_code_for_key(cfg, c, 46) == doctest::Approx(c.flex_max).epsilon(1e-3));
	CHECK_THROWS_AS(synth::flex_code_for_key(cfg, c, 30), ReachError);
}

TEST_CASE("press on key 40 yields one on/off pair, max speed gives velocity 127") {
	Workdir w("press");
	calibrate(w);
	REQUIRE(invoke({"synth", "press", "--key", "40", "--out", w / "p"}) == 0);
	REQUIRE(invoke({"simulate", "--trace", w / "p/trace.csv", "--calibration", w / "cal/calibration.txt", "--out",
	              w / "p"}) == 0);
	auto lines = csv_lines(w / "p/events.csv");
	REQUIRE(lines.size() == 3);
	CHECK(lines[1].find(",on,40,C#4,") != std::string::npos);
	CHECK(lines[2].find(",off,40,C#4,0") != std::string::npos);

	REQUIRE(invoke({"synth", "press", "--key", "40", "--speed", "max", "--out", w / "m"}) == 0);
	REQUIRE(invoke({"simulate", "--trace", w / "m/trace.csv", "--calibration", w / "cal/calibration.txt", "--out",
	              w / "m"}) == 0);
	lines = csv_lines(w / "m/events.csv");
	REQUIRE(lines.size() == 3);
	CHECK(lines[1].find(",on,40,C#4,127") != std::string::npos);
}

TEST_CASE("end-to-end round trip from the default config") {
	Workdir w("roundtrip");
	const std::string cfg = SR3T_SOURCE_DIR "/config/default.ini";
	REQUIRE(invoke({"--config", cfg, "synth", "calibration", "--out", w / "cal"}) == 0);
	REQUIRE(invoke({"--config", cfg, "calibrate", "--trace", w / "cal/trace.csv", "--anchors", w / "cal/anchors.txt",
	              "--out", w / "cal"}) == 0);
	REQUIRE(invoke({"--config", cfg, "synth", "scale", "--out", w / "s"}) == 0);
	REQUIRE(invoke({"--config", cfg, "simulate", "--trace", w / "s/trace.csv", "--calibration",
	              w / "cal/calibration.txt", "--midi", "--verbose", "--out", w / "s"}) == 0);
	CHECK(fs::exists(w / "s/events.mid"));
	CHECK(fs::exists(w / "s/steps.csv"));
	std::string out;
	CHECK(invoke({"--config", cfg, "analyze", "latency", "--log", w / "s/latency.csv", "--out", w / "r"}, &out) == 0);
	CHECK(out.find("over_budget") != std::string::npos);
	CHECK(invoke({"--config", cfg, "analyze", "range", "--calibration", w / "cal/calibration.txt", "--out", w / "r"},
	           &out) == 0);
	CHECK(out.find("whole_notes_beyond_pinkie  4") != std::string::npos);
	CHECK(invoke({"--config", cfg, "analyze", "budget", "--latency", w / "s/latency.csv", "--out", w / "r"}) == 0);
	CHECK(slurp(w / "r/budget.txt").find("latency = fail") != std::string::npos);
	REQUIRE(invoke({"synth", "workspace", "--band-samples", "20000", "--cap-samples", "20000", "--out", w / "ws"}) == 0);
	CHECK(invoke({"analyze", "workspace", "--sr3t", w / "ws/sr3t_workspace.csv", "--thumb",
	            w / "ws/thumb_workspace.csv", "--bins", "1000", "--out", w / "r"}) == 0);
	CHECK(slurp(w / "r/workspace.txt").find("ratio = ") != std::string::npos);

	const auto f = oracle::parse_midi([&] {
		const auto s = slurp(w / "s/events.mid");
		return std::vector<std::uint8_t>(s.begin(), s.end());
	}());
	CHECK(f.notes.size() == 14);
}

TEST_CASE("exit codes") {
	Workdir w("codes");
	CHECK(invoke({}) == cli::kExitUsage);
	CHECK(invoke({"bogus"}) == cli::kExitUsage);
	CHECK(invoke({"synth", "dance", "--out", w.dir.string()}) == cli::kExitUsage);
	CHECK(invoke({"synth", "press", "--out", w.dir.string()}) == cli::kExitUsage);
	CHECK(invoke({"synth", "press", "--key", "40", "--speed", "fast", "--out", w.dir.string()}) == cli::kExitUsage);
	CHECK(invoke({"--help"}) == cli::kExitOk);

	// key beyond the reach circle, then one within reach but outside the calibrated range
	std::string out;
	CHECK(invoke({"synth", "press", "--key", "10", "--out", w.dir.string()}, &out) == cli::kExitValidation);
	CHECK(out.find("out of reach") != std::string::npos);
	CHECK(invoke({"synth", "press", "--key", "36", "--out", w.dir.string()}, &out) == cli::kExitValidation);
	CHECK(out.find("outside the calibrated horizontal range") != std::string::npos);

	// calibration trace missing a label
	REQUIRE(invoke({"synth", "press", "--key", "40", "--out", w / "p"}) == 0);
	REQUIRE(invoke({"synth", "calibration", "--out", w / "c"}) == 0);
	CHECK(invoke({"calibrate", "--trace", w / "p/trace.csv", "--anchors", w / "c/anchors.txt", "--out", w / "c"}, &out) ==
	      cli::kExitValidation);
	CHECK(out.find("missing") != std::string::npos);

	// bad config value
	{
		std::ofstream os(w / "bad.ini");
		os << slurp(SR3T_SOURCE_DIR "/config/default.ini") << "\n[extra]\nx = 1\n";
	}
	CHECK(invoke({"--config", w / "bad.ini", "analyze", "range", "--out", w / "r"}, &out) == cli::kExitValidation);
	CHECK(out.find("extra") != std::string::npos);

	// unreadable input
	CHECK(invoke({"simulate", "--trace", w / "absent.csv", "--calibration", w / "absent.txt", "--out", w / "s"}) ==
	      cli::kExitRuntime);
}

} // TEST_SUITE
