#pragma once

#include "sr3t/piano.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sr3t::midi {

inline constexpr std::uint16_t kDivision = 480; // ticks per quarter note, 120 BPM

/// Milliseconds to ticks at 120 BPM (one tick = 500/480 ms), rounded.
std::uint32_t ms_to_ticks(double t_ms);

/// Variable-length quantity encoding.
std::vector<std::uint8_t> encode_vlq(std::uint32_t value);

/// Format-0 standard MIDI file with one track: note-on/note-off events on
/// channel 0, no running status, closed with an end-of-track meta event.
/// Events sharing a tick are ordered off-before-on, then by ascending key.
/// Throws InputError on an empty event list.
std::vector<std::uint8_t> write_midi(const std::vector<piano::KeyEvent>& events, const piano::KeyboardLayout& layout);

void write_midi_file(const std::string& path, const std::vector<piano::KeyEvent>& events,
                     const piano::KeyboardLayout& layout);

} // namespace sr3t::midi
