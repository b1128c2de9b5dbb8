#include "sr3t/piano.hpp"

#include "sr3t/error.hpp"

#include <array>
#include <cmath>

namespace sr3t::piano {

namespace {
constexpr int kFirstMidi = 21; // A0
constexpr std::array<const char*, 12> kNames = {"C", "C#", "D", "D#", "E", "F",
                                                "F#", "G", "G#", "A", "A#", "B"};
} // namespace

bool is_black_midi(int midi_note) {
	switch (((midi_note % 12) + 12) % 12) {
	case 1: case 3: case 6: case 8: case 10:
		return true;
	default:
		return false;
	}
}

std::string note_name(int midi_note) {
	const int pc = ((midi_note % 12) + 12) % 12;
	const int octave = midi_note / 12 - 1;
	return std::string(kNames[static_cast<std::size_t>(pc)]) + std::to_string(octave);
}

KeyboardLayout build_layout(const LayoutConfig& cfg) {
	if (cfg.n_keys < 1)
		throw ConfigError("layout.n_keys must be >= 1");
	if (!(cfg.white_width > 0))
		throw ConfigError("layout.white_width must be > 0");
	if (!(cfg.black_width > 0))
		throw ConfigError("layout.black_width must be > 0");
	if (!(cfg.white_width > cfg.black_width))
		throw ConfigError("layout.black_width must be < layout.white_width");
	if (!(cfg.key_travel > 0))
		throw ConfigError("layout.key_travel must be > 0");
	if (!(cfg.press_force > 0))
		throw ConfigError("layout.press_force must be > 0");
	if (!(cfg.black_zone_depth >= 0))
		throw ConfigError("layout.black_zone_depth must be >= 0");
	if (!std::isfinite(cfg.origin_x))
		throw ConfigError("layout.origin_x must be finite");
	if (is_black_midi(kFirstMidi + cfg.n_keys - 1))
		throw ConfigError("layout.n_keys must end on a white key");

	KeyboardLayout layout;
	layout.cfg_ = cfg;
	layout.keys_.reserve(static_cast<std::size_t>(cfg.n_keys));
	int whites = 0;
	for (int i = 0; i < cfg.n_keys; ++i) {
		Key k;
		k.index = i;
		k.midi_note = kFirstMidi + i;
		if (is_black_midi(k.midi_note)) {
			k.color = KeyColor::black;
			k.white_ordinal = whites;
			k.center_x = cfg.origin_x + whites * cfg.white_width;
		} else {
			k.color = KeyColor::white;
			k.white_ordinal = whites;
			k.center_x = cfg.origin_x + (whites + 0.5) * cfg.white_width;
			layout.white_index_.push_back(i);
			++whites;
		}
		layout.keys_.push_back(k);
	}
	layout.n_white_ = whites;
	layout.black_at_boundary_.assign(static_cast<std::size_t>(whites) + 1, -1);
	for (const Key& k : layout.keys_)
		if (k.color == KeyColor::black)
			layout.black_at_boundary_[static_cast<std::size_t>(k.white_ordinal)] = k.index;
	return layout;
}

std::pair<double, double> KeyboardLayout::extent(const Key& k) const {
	if (k.color == KeyColor::white)
		return {cfg_.origin_x + k.white_ordinal * cfg_.white_width,
		        cfg_.origin_x + (k.white_ordinal + 1) * cfg_.white_width};
	return {k.center_x - cfg_.black_width / 2, k.center_x + cfg_.black_width / 2};
}

std::optional<Key> KeyboardLayout::white_key(int ordinal) const {
	if (ordinal < 0 || ordinal >= n_white_)
		return std::nullopt;
	return keys_[static_cast<std::size_t>(white_index_[static_cast<std::size_t>(ordinal)])];
}

std::optional<Key> KeyboardLayout::key_at(double x, double depth) const {
	if (!(x >= left_edge() && x < right_edge()))
		return std::nullopt;
	const double rel = (x - cfg_.origin_x) / cfg_.white_width;
	int w = static_cast<int>(std::floor(rel));
	if (w >= n_white_)
		w = n_white_ - 1;

	if (depth >= cfg_.black_zone_depth) {
		// Nearest boundary: the black key there (if any) covers x when within half its width.
		const int boundary = static_cast<int>(std::lround(rel));
		if (boundary >= 1 && boundary < n_white_) {
			const int bi = black_at_boundary_[static_cast<std::size_t>(boundary)];
			if (bi >= 0) {
				const Key& b = keys_[static_cast<std::size_t>(bi)];
				if (std::abs(x - b.center_x) <= cfg_.black_width / 2)
					return b;
			}
		}
	}
	return white_key(w);
}

} // namespace sr3t::piano
