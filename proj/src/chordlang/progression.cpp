#include "chordseed/chordlang/progression.hpp"

#include <cctype>

namespace chordseed::chordlang {

namespace {

int mod(int value, int m) { return ((value % m) + m) % m; }

// Signed distance in (-6, 6] between two chromatic values.
int signed_semitones(int value) {
  int d = mod(value, 12);
  return d > 6 ? d - 12 : d;
}

}  // namespace

Progression parse_progression(std::string_view line, Key key, Mode mode) {
  Progression p{{}, key, mode};
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    try {
      p.chords.push_back(parse_chord(line.substr(pos, end - pos)));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.offset(), index);
    }
    ++index;
    pos = end;
  }
  if (p.chords.empty()) throw ParseError("empty progression", 0);
  return p;
}

std::string render_progression(const Progression& p) {
  std::string out;
  for (std::size_t i = 0; i < p.chords.size(); ++i) {
    if (i) out += ' ';
    out += render_chord(p.chords[i]);
  }
  return out;
}

std::vector<std::string> chord_tokens(const Progression& p) {
  std::vector<std::string> out;
  out.reserve(p.chords.size());
  for (const auto& c : p.chords) out.push_back(render_chord(c));
  return out;
}

PitchClass shift_pitch(const PitchClass& pc, int letter_shift, int semitones) {
  const Letter letter = letter_from_index(letter_index(pc.letter) + letter_shift);
  const int target = pc.chromatic() + semitones;
  const int accidental = signed_semitones(target - natural_chromatic(letter));
  if (accidental < -2 || accidental > 2) return sharp_spelling(target);
  return PitchClass{letter, accidental};
}

Chord transpose_chord(const Chord& chord, const Key& from, const Key& to) {
  const int letter_shift = letter_index(to.root.letter) - letter_index(from.root.letter);
  const int semitones = to.root.chromatic() - from.root.chromatic();
  Chord out = chord;
  out.root = shift_pitch(chord.root, letter_shift, semitones);
  if (chord.bass) out.bass = shift_pitch(*chord.bass, letter_shift, semitones);
  return out;
}

Progression transpose_progression(const Progression& p, const Key& target) {
  Progression out{{}, target, p.mode};
  out.chords.reserve(p.chords.size());
  for (const auto& c : p.chords) out.chords.push_back(transpose_chord(c, p.key, target));
  return out;
}

}  // namespace chordseed::chordlang
