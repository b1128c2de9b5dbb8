#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sr3t::piano {

enum class KeyColor { white, black };

struct LayoutConfig {
	int n_keys = 88;
	double white_width = 23.5;      // mm
	double black_width = 13.7;      // mm
	double key_travel = 10.0;       // mm
	double press_force = 0.5;       // N
	double black_zone_depth = 50.0; // mm
	double origin_x = 0.0;          // mm, left edge of the leftmost key
};

struct Key {
	int index = 0;
	KeyColor color = KeyColor::white;
	double center_x = 0.0;
	int midi_note = 21;
	int white_ordinal = 0; // white keys: own ordinal; black keys: ordinal of the white key to the right

	bool operator==(const Key&) const = default;
};

/// Keyboard geometry. Keys start at A0 (MIDI 21). Black keys are centered on
/// the boundary between their two neighboring white keys.
class KeyboardLayout {
public:
	const LayoutConfig& config() const { return cfg_; }
	const std::vector<Key>& keys() const { return keys_; }
	const Key& key(int index) const { return keys_.at(static_cast<std::size_t>(index)); }
	int white_count() const { return n_white_; }
	int black_count() const { return static_cast<int>(keys_.size()) - n_white_; }

	double left_edge() const { return cfg_.origin_x; }
	double right_edge() const { return cfg_.origin_x + n_white_ * cfg_.white_width; }

	/// [lo, hi) x-extent of a key.
	std::pair<double, double> extent(const Key& k) const;

	/// Key under the point (x, depth). Depth below the black zone only
	/// addresses white keys; beyond it, black extents take priority.
	std::optional<Key> key_at(double x, double depth) const;

	/// White key with the given ordinal, if on the keyboard.
	std::optional<Key> white_key(int ordinal) const;

private:
	friend KeyboardLayout build_layout(const LayoutConfig&);
	LayoutConfig cfg_;
	std::vector<Key> keys_;
	std::vector<int> white_index_; // ordinal -> key index
	std::vector<int> black_at_boundary_; // white ordinal w -> black key index between w-1 and w, or -1
	int n_white_ = 0;
};

/// Throws ConfigError on non-positive or inconsistent dimensions.
KeyboardLayout build_layout(const LayoutConfig& cfg);

bool is_black_midi(int midi_note);

/// Scientific pitch name, e.g. 21 -> "A0", 61 -> "C#4".
std::string note_name(int midi_note);

enum class KeyEventKind { on, off };

struct KeyEvent {
	double t = 0.0; // ms
	KeyEventKind kind = KeyEventKind::on;
	int key_index = 0;
	int velocity = 0; // 1..127 for on events, 0 for off

	bool operator==(const KeyEvent&) const = default;
};

} // namespace sr3t::piano
