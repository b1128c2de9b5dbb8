#include "sr3t/midi.hpp"

#include "sr3t/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sr3t::midi {

std::uint32_t ms_to_ticks(double t_ms) {
	if (!(t_ms >= 0))
		throw InputError("MIDI event time must be >= 0");
	return static_cast<std::uint32_t>(std::llround(t_ms * kDivision / 500.0));
}

std::vector<std::uint8_t> encode_vlq(std::uint32_t value) {
	if (value > 0x0FFFFFFF)
		throw InputError("MIDI delta time too large");
	std::vector<std::uint8_t> out{static_cast<std::uint8_t>(value & 0x7F)};
	value >>= 7;
	while (value > 0) {
		out.push_back(static_cast<std::uint8_t>(0x80 | (value & 0x7F)));
		value >>= 7;
	}
	std::reverse(out.begin(), out.end());
	return out;
}

namespace {

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
	for (int shift = 24; shift >= 0; shift -= 8)
		b.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
	b.push_back(static_cast<std::uint8_t>(v >> 8));
	b.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

} // namespace

std::vector<std::uint8_t> write_midi(const std::vector<piano::KeyEvent>& events, const piano::KeyboardLayout& layout) {
	if (events.empty())
		throw InputError("cannot write a MIDI file for an empty event log");

	struct Timed {
		std::uint32_t tick;
		double t;
		const piano::KeyEvent* e;
	};
	std::vector<Timed> order;
	order.reserve(events.size());
	for (const auto& e : events)
		order.push_back({ms_to_ticks(e.t), e.t, &e});
	std::stable_sort(order.begin(), order.end(), [](const Timed& a, const Timed& b) {
		if (a.tick != b.tick)
			return a.tick < b.tick;
		if (a.t != b.t)
			return a.t < b.t;
		if (a.e->kind != b.e->kind)
			return a.e->kind == piano::KeyEventKind::off;
		return a.e->key_index < b.e->key_index;
	});

	std::vector<std::uint8_t> track;
	std::uint32_t last_tick = 0;
	for (const auto& item : order) {
		const auto delta = encode_vlq(item.tick - last_tick);
		track.insert(track.end(), delta.begin(), delta.end());
		last_tick = item.tick;
		const auto note = static_cast<std::uint8_t>(layout.key(item.e->key_index).midi_note & 0x7F);
		if (item.e->kind == piano::KeyEventKind::on) {
			track.push_back(0x90);
			track.push_back(note);
			track.push_back(static_cast<std::uint8_t>(std::clamp(item.e->velocity, 1, 127)));
		} else {
			track.push_back(0x80);
			track.push_back(note);
			track.push_back(0x40);
		}
	}
	track.insert(track.end(), {0x00, 0xFF, 0x2F, 0x00});

	std::vector<std::uint8_t> file;
	file.insert(file.end(), {'M', 'T', 'h', 'd'});
	put_u32(file, 6);
	put_u16(file, 0); // format 0
	put_u16(file, 1); // one track
	put_u16(file, kDivision);
	file.insert(file.end(), {'M', 'T', 'r', 'k'});
	put_u32(file, static_cast<std::uint32_t>(track.size()));
	file.insert(file.end(), track.begin(), track.end());
	return file;
}

void write_midi_file(const std::string& path, const std::vector<piano::KeyEvent>& events,
                     const piano::KeyboardLayout& layout) {
	const auto bytes = write_midi(events, layout);
	std::ofstream os(path, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + path);
	os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace sr3t::midi
