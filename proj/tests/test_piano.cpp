#include "sr3t/error.hpp"
#include "sr3t/piano.hpp"

#include <doctest.h>

#include <random>

using namespace sr3t;
using namespace sr3t::piano;

TEST_SUITE("piano") {

TEST_CASE("default layout is a standard 88-key piano") {
	const auto kb = build_layout({});
	CHECK(kb.keys().size() == 88);
	CHECK(kb.white_count() == 52);
	CHECK(kb.black_count() == 36);
	CHECK(kb.keys().front().midi_note == 21);
	CHECK(kb.keys().back().midi_note == 108);
	CHECK(kb.right_edge() == doctest::Approx(52 * 23.5));
}

TEST_CASE("white key i spans 23.5 mm per ordinal") {
	const auto kb = build_layout({});
	for (const auto& k : kb.keys()) {
		if (k.color != KeyColor::white)
			continue;
		const auto [lo, hi] = kb.extent(k);
		CHECK(lo == doctest::Approx(23.5 * k.white_ordinal));
		CHECK(hi == doctest::Approx(23.5 * (k.white_ordinal + 1)));
	}
}

TEST_CASE("single-key layout") {
	LayoutConfig cfg;
	cfg.n_keys = 1;
	const auto kb = build_layout(cfg);
	REQUIRE(kb.keys().size() == 1);
	CHECK(kb.key(0).color == KeyColor::white);
	CHECK(kb.key(0).midi_note == 21);
	CHECK(note_name(21) == "A0");
}

TEST_CASE("invalid layouts are rejected") {
	LayoutConfig cfg;
	cfg.n_keys = 0;
	CHECK_THROWS_AS(build_layout(cfg), ConfigError);
	cfg = {};
	cfg.white_width = 0;
	CHECK_THROWS_AS(build_layout(cfg), ConfigError);
	cfg = {};
	cfg.black_width = 23.5;
	CHECK_THROWS_AS(build_layout(cfg), ConfigError);
	cfg = {};
	cfg.n_keys = 2; // would end on A#0
	CHECK_THROWS_AS(build_layout(cfg), ConfigError);
}

TEST_CASE("key_at examples") {
	const auto kb = build_layout({});
	CHECK(kb.key_at(11.75, 0)->index == 0);
	CHECK(kb.key_at(35.0, 0)->index == 2); // second white key, B0
	CHECK(kb.key_at(35.0, 0)->white_ordinal == 1);

	const auto b = kb.key_at(23.5, 50.0);
	REQUIRE(b);
	CHECK(b->color == KeyColor::black);
	CHECK(note_name(b->midi_note) == "A#0");
	const auto [lo, hi] = kb.extent(*b);
	CHECK(lo == doctest::Approx(16.65));
	CHECK(hi == doctest::Approx(30.35));

	// just outside the black extent falls back to the white key
	CHECK(kb.key_at(16.6, 60.0)->index == 0);
	CHECK(kb.key_at(-0.1, 0) == std::nullopt);
	CHECK(kb.key_at(kb.right_edge(), 0) == std::nullopt);
}

TEST_CASE("front zone is a step function with jumps at white boundaries") {
	const auto kb = build_layout({});
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> x(0.0, kb.right_edge());
	for (int i = 0; i < 5000; ++i) {
		const double xi = x(rng);
		const auto k = kb.key_at(xi, 49.999);
		REQUIRE(k);
		CHECK(k->color == KeyColor::white);
		CHECK(k->white_ordinal == static_cast<int>(xi / 23.5));
	}
}

TEST_CASE("every key round-trips through its centre") {
	const auto kb = build_layout({});
	for (const auto& k : kb.keys()) {
		const double depth = k.color == KeyColor::black ? 60.0 : 0.0;
		const auto hit = kb.key_at(k.center_x, depth);
		REQUIRE(hit);
		CHECK(*hit == k);
	}
}

TEST_CASE("black extents sit strictly inside their neighbours") {
	const auto kb = build_layout({});
	for (const auto& k : kb.keys()) {
		if (k.color != KeyColor::black)
			continue;
		const auto left = kb.white_key(k.white_ordinal - 1);
		const auto right = kb.white_key(k.white_ordinal);
		REQUIRE(left);
		REQUIRE(right);
		const auto [lo, hi] = kb.extent(k);
		CHECK(lo > kb.extent(*left).first);
		CHECK(hi < kb.extent(*right).second);
	}
}

TEST_CASE("note names and colours") {
	CHECK(note_name(60) == "C4");
	CHECK(note_name(61) == "C#4");
	CHECK(note_name(108) == "C8");
	CHECK(is_black_midi(61));
	CHECK_FALSE(is_black_midi(60));
	const auto kb = build_layout({});
	CHECK(kb.key(39).midi_note == 60);
	CHECK(kb.key(40).color == KeyColor::black);
}

} // TEST_SUITE
