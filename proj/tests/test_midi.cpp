#include "oracles.hpp"

#include "sr3t/error.hpp"
#include "sr3t/midi.hpp"

#include <doctest.h>

using namespace sr3t;
using namespace sr3t::midi;
using piano::KeyEventKind;

TEST_SUITE("midi") {

TEST_CASE("variable-length quantities") {
	using V = std::vector<std::uint8_t>;
	CHECK(encode_vlq(0) == V{0x00});
	CHECK(encode_vlq(0x7F) == V{0x7F});
	CHECK(encode_vlq(0x80) == V{0x81, 0x00});
	CHECK(encode_vlq(0x2000) == V{0xC0, 0x00});
	CHECK(encode_vlq(0x0FFFFFFF) == V{0xFF, 0xFF, 0xFF, 0x7F});
	CHECK_THROWS_AS(encode_vlq(0x10000000), InputError);
}

TEST_CASE("tick conversion at 120 BPM") {
	CHECK(ms_to_ticks(0) == 0);
	CHECK(ms_to_ticks(500) == 480);
	CHECK(ms_to_ticks(1000) == 960);
	CHECK(ms_to_ticks(686.781) == 659);
	CHECK_THROWS_AS(ms_to_ticks(-1), InputError);
}

TEST_CASE("header bytes for one note") {
	const auto kb = piano::build_layout({});
	const auto bytes = write_midi({{100, KeyEventKind::on, 40, 64}, {400, KeyEventKind::off, 40, 0}}, kb);
	const std::vector<std::uint8_t> header{0x4D, 0x54, 0x68, 0x64, 0x00, 0x00, 0x00, 0x06,
	                                       0x00, 0x00, 0x00, 0x01, 0x01, 0xE0};
	REQUIRE(bytes.size() > header.size());
	CHECK(std::equal(header.begin(), header.end(), bytes.begin()));
	const auto f = oracle::parse_midi(bytes);
	CHECK(f.format == 0);
	CHECK(f.tracks == 1);
	CHECK(f.division == 480);
	CHECK(f.end_of_track);
	REQUIRE(f.notes.size() == 2);
	CHECK(f.notes[0].status == 0x90);
	CHECK(f.notes[0].note == 61);
	CHECK(f.notes[0].velocity == 64);
	CHECK(f.notes[0].tick == 96);
	CHECK(f.notes[1].status == 0x80);
	CHECK(f.notes[1].tick == 384);
}

TEST_CASE("empty log is an error") {
	CHECK_THROWS_AS(write_midi({}, piano::build_layout({})), InputError);
}

TEST_CASE("simultaneous key-ons are ordered by key with zero delta") {
	const auto kb = piano::build_layout({});
	const auto f = oracle::parse_midi(write_midi(
		{{10, KeyEventKind::on, 46, 100}, {10, KeyEventKind::on, 40, 90}, {20, KeyEventKind::off, 40, 0},
		 {20, KeyEventKind::off, 46, 0}},
		kb));
	REQUIRE(f.notes.size() == 4);
	CHECK(f.notes[0].note == 61);
	CHECK(f.notes[1].note == 67);
	CHECK(f.notes[0].tick == f.notes[1].tick);
}

TEST_CASE("off sorts before on within a tick") {
	const auto kb = piano::build_layout({});
	const auto f = oracle::parse_midi(
		write_midi({{10, KeyEventKind::on, 41, 80}, {10, KeyEventKind::off, 40, 0}, {5, KeyEventKind::on, 40, 80},
		            {30, KeyEventKind::off, 41, 0}},
		           kb));
	REQUIRE(f.notes.size() == 4);
	CHECK(f.notes[1].status == 0x80);
	CHECK(f.notes[2].status == 0x90);
}

} // TEST_SUITE
