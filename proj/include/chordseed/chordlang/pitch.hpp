#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace chordseed::chordlang {

enum class Letter { C, D, E, F, G, A, B };

/// A spelled pitch class: letter name plus an accidental in [-2, 2]
/// (bb, b, natural, #, x).
struct PitchClass {
  Letter letter = Letter::C;
  int accidental = 0;

  /// Chromatic index in 0..11 with C = 0.
  int chromatic() const;
  std::string to_string() const;

  friend bool operator==(const PitchClass&, const PitchClass&) = default;
};

int natural_chromatic(Letter letter);
int letter_index(Letter letter);
Letter letter_from_index(int index);

/// Sharp-preferring spelling of a chromatic index (C, C#, D, D#, ...).
PitchClass sharp_spelling(int chromatic);

/// Reads a pitch class starting at `pos`, advancing it past the consumed bytes.
/// Accepts an upper- or lowercase letter; `*lowercase` reports which one was seen.
/// Returns nullopt (and leaves `pos` untouched) when no letter is present.
std::optional<PitchClass> read_pitch_class(std::string_view text, std::size_t& pos,
                                           bool* lowercase = nullptr);

/// Parses a whole string as a pitch class ("F#", "Bb", "Dx").
std::optional<PitchClass> parse_pitch_class(std::string_view text);

/// Tonal center of a progression. Any spelling is representable so that
/// externally detected keys ("Gb") can be carried; `is_standard()` tells
/// whether the root is one of the twelve spellings used for generation.
struct Key {
  PitchClass root;

  bool is_standard() const;
  std::string to_string() const { return root.to_string(); }

  friend bool operator==(const Key&, const Key&) = default;
};

/// The twelve key spellings accepted for generation requests.
std::span<const Key> standard_keys();

/// Parses a key root. With `standard_only`, spellings outside the twelve
/// generation keys are rejected.
std::optional<Key> parse_key(std::string_view text, bool standard_only = true);

enum class Mode { Maj, Min, Dor, Phr, Lyd, Mix, Loc, Hmin, Phdm };

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);
std::span<const Mode> all_modes();

/// Semitone offsets of the seven scale degrees above the tonic.
const std::array<int, 7>& scale_intervals(Mode mode);

}  // namespace chordseed::chordlang
