#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chordseed/chordlang/chord.hpp"
#include "chordseed/chordlang/pitch.hpp"

namespace chordseed::chordlang {

/// One chord per bar, written in `key`/`mode`.
struct Progression {
  std::vector<Chord> chords;
  Key key;
  Mode mode = Mode::Maj;

  std::size_t bars() const { return chords.size(); }

  friend bool operator==(const Progression&, const Progression&) = default;
};

/// Parses a space-separated line of chord symbols. Errors carry the token index.
Progression parse_progression(std::string_view line, Key key, Mode mode);

/// Space-separated canonical symbols.
std::string render_progression(const Progression& p);

/// Canonical symbols, one string per bar.
std::vector<std::string> chord_tokens(const Progression& p);

/// Re-spells `pc` after moving every letter by `letter_shift` steps and the
/// pitch by `semitones`. Accidentals beyond a double sharp/flat fall back to
/// the sharp spelling of the resulting chromatic index.
PitchClass shift_pitch(const PitchClass& pc, int letter_shift, int semitones);

/// Moves `chord` from key `from` to key `to` under the same spelling rule.
Chord transpose_chord(const Chord& chord, const Key& from, const Key& to);

/// Transposes every root and bass from `p.key` to `target`; mode is kept.
Progression transpose_progression(const Progression& p, const Key& target);

}  // namespace chordseed::chordlang
