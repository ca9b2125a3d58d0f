#pragma once

// Random generators over the chord grammar for property tests. They build
// symbols component by component and never call into the parser.

#include <random>
#include <string>

#include "chordseed/chordlang/chord.hpp"

namespace chordseed::testing {

inline chordlang::PitchClass random_pitch(std::mt19937_64& rng, int max_accidental = 2) {
  std::uniform_int_distribution<int> letter(0, 6);
  std::uniform_int_distribution<int> acc(-max_accidental, max_accidental);
  return {chordlang::letter_from_index(letter(rng)), acc(rng)};
}

/// A uniformly mixed, well-formed chord: every component independently present.
inline chordlang::Chord random_chord(std::mt19937_64& rng, int max_accidental = 2) {
  using namespace chordlang;
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> q(0, 3);
  std::uniform_int_distribution<int> ext(0, 5);
  std::uniform_int_distribution<int> sus(0, 3);
  std::uniform_int_distribution<int> six(0, 5);

  Chord c;
  c.root = random_pitch(rng, max_accidental);
  c.quality = static_cast<Quality>(q(rng));
  if (coin(rng)) {
    c.extension = static_cast<Extension>(ext(rng));
    const bool seventh_family = *c.extension != Extension::Sixth && *c.extension != Extension::SixNine;
    c.major_seventh = seventh_family && coin(rng);
  }
  if (coin(rng)) c.suspension = static_cast<Suspension>(sus(rng));
  for (int i = 0; i < 6; ++i) {
    if (std::bernoulli_distribution(0.2)(rng)) c.adds.insert(static_cast<Added>(six(rng)));
  }
  const bool anchor = c.quality != Quality::Major || c.extension || c.suspension || !c.adds.empty();
  if (anchor) {
    for (int i = 0; i < 6; ++i) {
      if (std::bernoulli_distribution(0.2)(rng)) c.alterations.insert(static_cast<Alteration>(six(rng)));
    }
  }
  if (coin(rng)) c.bass = random_pitch(rng, max_accidental);
  return c;
}

/// Chord text in a lenient surface form: lowercase minor roots, shuffled
/// add/alteration order. Always parseable.
inline std::string random_chord_text(std::mt19937_64& rng) {
  using namespace chordlang;
  Chord c = random_chord(rng);
  std::string out = c.root.to_string();
  const bool lower_ok = c.quality == Quality::Minor || c.quality == Quality::Diminished;
  if (lower_ok && std::bernoulli_distribution(0.5)(rng)) {
    out[0] = static_cast<char>(out[0] - 'A' + 'a');
  }
  out += token(c.quality);
  if (c.major_seventh) out += "maj";
  if (c.extension) out += token(*c.extension);
  if (c.suspension) out += token(*c.suspension);
  std::string adds;
  for (Added a : c.adds) adds = std::string(token(a)) + adds;  // reversed order
  out += adds;
  std::string alts;
  for (Alteration a : c.alterations) alts = std::string(token(a)) + alts;
  out += alts;
  if (c.bass) out += "/" + c.bass->to_string();
  return out;
}

}  // namespace chordseed::testing
