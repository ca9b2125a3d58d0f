#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "chordseed/chordlang/chord.hpp"
#include "chordseed/chordlang/progression.hpp"
#include "support/chord_generators.hpp"

using namespace chordseed::chordlang;

namespace {

Key key(const char* text) { return *parse_key(text, /*standard_only=*/false); }

std::string transpose_line(const char* line, const char* from, const char* to) {
  return render_progression(transpose_progression(parse_progression(line, key(from), Mode::Maj), key(to)));
}

}  // namespace

TEST(PitchClass, ChromaticIndexAndSpelling) {
  EXPECT_EQ(parse_pitch_class("C")->chromatic(), 0);
  EXPECT_EQ(parse_pitch_class("B#")->chromatic(), 0);
  EXPECT_EQ(parse_pitch_class("Cb")->chromatic(), 11);
  EXPECT_EQ(parse_pitch_class("Dx")->chromatic(), 4);
  EXPECT_EQ(parse_pitch_class("Ebb")->chromatic(), 2);
  EXPECT_EQ(parse_pitch_class("Dx")->to_string(), "Dx");
  EXPECT_EQ(parse_pitch_class("Ebb")->to_string(), "Ebb");
  EXPECT_FALSE(parse_pitch_class("H"));
  EXPECT_FALSE(parse_pitch_class("C##"));
}

TEST(Key, StandardSpellingsOnly) {
  for (const char* k : {"C", "G", "D", "A", "E", "B", "F#", "Db", "Ab", "Eb", "Bb", "F"}) {
    EXPECT_TRUE(parse_key(k)) << k;
  }
  EXPECT_EQ(standard_keys().size(), 12u);
  EXPECT_FALSE(parse_key("Gb"));
  EXPECT_FALSE(parse_key("C#"));
  EXPECT_TRUE(parse_key("Gb", /*standard_only=*/false));
  EXPECT_FALSE(parse_key("c"));
}

TEST(Mode, NamesAndIntervals) {
  EXPECT_EQ(all_modes().size(), 9u);
  for (Mode m : all_modes()) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_FALSE(parse_mode("Major"));
  EXPECT_EQ(scale_intervals(Mode::Maj), (std::array<int, 7>{0, 2, 4, 5, 7, 9, 11}));
  EXPECT_EQ(scale_intervals(Mode::Hmin), (std::array<int, 7>{0, 2, 3, 5, 7, 8, 11}));
  EXPECT_EQ(scale_intervals(Mode::Phdm), (std::array<int, 7>{0, 1, 4, 5, 7, 8, 10}));
  EXPECT_EQ(scale_intervals(Mode::Loc), (std::array<int, 7>{0, 1, 3, 5, 6, 8, 10}));
}

TEST(ParseChord, MinorSeventh) {
  Chord c = parse_chord("C#m7");
  EXPECT_EQ(c.root, (PitchClass{Letter::C, 1}));
  EXPECT_EQ(c.quality, Quality::Minor);
  EXPECT_EQ(c.extension, Extension::Seventh);
  EXPECT_FALSE(c.major_seventh);
  EXPECT_FALSE(c.bass);
}

TEST(ParseChord, BareRootIsMajorTriad) {
  Chord c = parse_chord("C");
  EXPECT_EQ(c, Chord{});
  EXPECT_EQ(render_chord(c), "C");
}

TEST(ParseChord, LowercaseMinorWithSlashBass) {
  Chord c = parse_chord("gm/Bb");
  EXPECT_EQ(c.root, (PitchClass{Letter::G, 0}));
  EXPECT_EQ(c.quality, Quality::Minor);
  EXPECT_EQ(c.bass, (PitchClass{Letter::B, -1}));
  EXPECT_EQ(render_chord(c), "Gm/Bb");
}

TEST(ParseChord, RejectsStandaloneMajAndMin) {
  EXPECT_THROW(parse_chord("Gmaj"), ParseError);
  EXPECT_THROW(parse_chord("Cmin"), ParseError);
  EXPECT_THROW(parse_chord("Cmin7"), ParseError);
  try {
    parse_chord("Gmaj");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 1u);
  }
}

TEST(ParseChord, ErrorOffsets) {
  try {
    parse_chord("C7zz");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  EXPECT_THROW(parse_chord(""), ParseError);
  EXPECT_THROW(parse_chord("H7"), ParseError);
  EXPECT_THROW(parse_chord("D#m/"), ParseError);
  EXPECT_THROW(parse_chord("Csus"), ParseError);
  EXPECT_THROW(parse_chord("Cadd9add9"), ParseError);
  EXPECT_THROW(parse_chord("d"), ParseError);
  EXPECT_THROW(parse_chord("d7"), ParseError);
}

TEST(ParseChord, FullComponentOrder) {
  Chord c = parse_chord("Ebmaj9sus4add13#11/G");
  EXPECT_TRUE(c.major_seventh);
  EXPECT_EQ(c.extension, Extension::Ninth);
  EXPECT_EQ(c.suspension, Suspension::Sus4);
  EXPECT_EQ(c.adds, (std::set<Added>{Added::Add13}));
  EXPECT_EQ(c.alterations, (std::set<Alteration>{Alteration::Sharp11}));
  EXPECT_EQ(render_chord(c), "Ebmaj9sus4add13#11/G");
  EXPECT_EQ(render_chord(parse_chord("C6/9")), "C6/9");
  EXPECT_EQ(render_chord(parse_chord("C6/E")), "C6/E");
  EXPECT_EQ(render_chord(parse_chord("Cdim7")), "Cdim7");
  EXPECT_EQ(render_chord(parse_chord("Cmmaj7")), "Cmmaj7");
  EXPECT_EQ(render_chord(parse_chord("A#m7b5")), "A#m7b5");
}

TEST(RenderChord, Examples) {
  Chord bmaj9{PitchClass{Letter::B, 0}, Quality::Major, Extension::Ninth, true};
  EXPECT_EQ(render_chord(bmaj9), "Bmaj9");
  Chord ddim;
  ddim.root = {Letter::D, 1};
  ddim.quality = Quality::Diminished;
  ddim.bass = PitchClass{Letter::C, 0};
  EXPECT_EQ(render_chord(ddim), "D#dim/C");
  EXPECT_EQ(canonicalize("d#dim/C"), "D#dim/C");
}

TEST(Canonicalize, SortsAddsAndAlterations) {
  EXPECT_EQ(canonicalize("C7#9b9"), "C7b9#9");
  EXPECT_EQ(canonicalize("Cadd9add2"), "Cadd2add9");
  EXPECT_EQ(canonicalize("dm"), "Dm");
}

TEST(Canonicalize, Idempotent) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string s = chordseed::testing::random_chord_text(rng);
    std::string once = canonicalize(s);
    EXPECT_EQ(canonicalize(once), once) << s;
  }
}

TEST(RoundTrip, RandomWellFormedChords) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 2000; ++i) {
    Chord c = chordseed::testing::random_chord(rng);
    ASSERT_TRUE(is_well_formed(c));
    std::string text = render_chord(c);
    ASSERT_EQ(parse_chord(text), c) << text;
    ASSERT_EQ(text.find("Gmaj") == 0 && text.size() == 4, false);
  }
}

TEST(RoundTrip, AmbiguousShapesAreNotWellFormed) {
  Chord c;
  c.alterations.insert(Alteration::Flat9);
  EXPECT_FALSE(is_well_formed(c));
  Chord m;
  m.major_seventh = true;
  EXPECT_FALSE(is_well_formed(m));
}

TEST(ChromaticEquivalence, IgnoresSpelling) {
  EXPECT_TRUE(chromatically_equivalent(parse_chord("C#m7"), parse_chord("Dbm7")));
  EXPECT_FALSE(parse_chord("C#m7") == parse_chord("Dbm7"));
  EXPECT_FALSE(chromatically_equivalent(parse_chord("C#m7"), parse_chord("C#7")));
  EXPECT_TRUE(chromatically_equivalent(parse_chord("C/E"), parse_chord("C/Fb")));
}

TEST(ParseProgression, PromptExamples) {
  auto p = parse_progression("dm gm/Bb gm dm", key("D"), Mode::Min);
  EXPECT_EQ(p.bars(), 4u);
  EXPECT_EQ(render_progression(p), "Dm Gm/Bb Gm Dm");
  auto q = parse_progression("F# B/F# C#/G#", key("F#"), Mode::Maj);
  EXPECT_EQ(q.bars(), 3u);
  EXPECT_EQ(parse_progression("C#m7 F#7 Bmaj9 d#dim/C", key("B"), Mode::Maj).bars(), 4u);
  EXPECT_EQ(parse_progression("Emaj7 A#m7b5 D#m7 G#7", key("B"), Mode::Maj).bars(), 4u);
  EXPECT_EQ(parse_progression("Bb F C C#dim", key("D"), Mode::Min).bars(), 4u);
  EXPECT_EQ(parse_progression("  C   G\tAm F ", key("C"), Mode::Maj).bars(), 4u);
}

TEST(ParseProgression, ErrorsCarryTokenIndex) {
  EXPECT_THROW(parse_progression("", key("C"), Mode::Maj), ParseError);
  EXPECT_THROW(parse_progression("   ", key("C"), Mode::Maj), ParseError);
  try {
    parse_progression("C G Gmaj F", key("C"), Mode::Maj);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.token_index(), 2u);
    EXPECT_EQ(e.offset(), 1u);
  }
}

TEST(Transpose, WholeStepUp) {
  EXPECT_EQ(transpose_line("Am F C G", "C", "D"), "Bm G D A");
}

TEST(Transpose, SameKeyIsIdentity) {
  EXPECT_EQ(transpose_line("C", "C", "C"), "C");
  EXPECT_EQ(transpose_line("Cb B# Fx/Ebb", "C", "C"), "Cb B# Fx/Ebb");
}

TEST(Transpose, SemitoneShiftMatchesChromaticOracle) {
  const char* line = "C#m7 F#7 Bmaj9";
  auto src = parse_progression(line, key("B"), Mode::Maj);
  auto out = transpose_progression(src, key("C"));
  EXPECT_EQ(render_progression(out), "Dm7 G7 Cmaj9");
  for (std::size_t i = 0; i < src.chords.size(); ++i) {
    EXPECT_EQ(out.chords[i].root.chromatic(), (src.chords[i].root.chromatic() + 1) % 12);
  }
  EXPECT_EQ(out.mode, Mode::Maj);
  EXPECT_EQ(out.key, key("C"));
}

TEST(Transpose, FallsBackToSharpSpelling) {
  // Db -> F# moves letters by a third but pitches by five semitones, so an
  // A# root would need a triple sharp on C.
  EXPECT_EQ(transpose_line("A#", "Db", "F#"), "D#");
  EXPECT_EQ(transpose_line("A", "Db", "F#"), "Cx");
  EXPECT_EQ(transpose_line("G#", "Db", "F#"), "Bx");
}

TEST(Transpose, GroupLaws) {
  std::mt19937_64 rng(99);
  auto keys = standard_keys();
  std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
  for (int trial = 0; trial < 1000; ++trial) {
    Key from = keys[pick(rng)];
    Key to = keys[pick(rng)];
    Progression p{{}, from, Mode::Maj};
    for (int i = 0; i < 4; ++i) p.chords.push_back(chordseed::testing::random_chord(rng, /*max_accidental=*/1));

    Progression there = transpose_progression(p, to);
    const int interval = ((to.root.chromatic() - from.root.chromatic()) % 12 + 12) % 12;
    const int letter_shift = ((letter_index(to.root.letter) - letter_index(from.root.letter)) % 7 + 7) % 7;
    bool spelled_by_rule = true;
    for (std::size_t i = 0; i < p.chords.size(); ++i) {
      EXPECT_EQ(there.chords[i].root.chromatic(), (p.chords[i].root.chromatic() + interval) % 12);
      if (p.chords[i].bass) {
        EXPECT_EQ(there.chords[i].bass->chromatic(), (p.chords[i].bass->chromatic() + interval) % 12);
      }
      if (letter_index(there.chords[i].root.letter) != (letter_index(p.chords[i].root.letter) + letter_shift) % 7) {
        spelled_by_rule = false;
      }
      if (p.chords[i].bass &&
          letter_index(there.chords[i].bass->letter) != (letter_index(p.chords[i].bass->letter) + letter_shift) % 7) {
        spelled_by_rule = false;
      }
    }
    Progression back = transpose_progression(there, from);
    for (std::size_t i = 0; i < p.chords.size(); ++i) {
      EXPECT_TRUE(chromatically_equivalent(back.chords[i], p.chords[i]));
    }
    if (spelled_by_rule) EXPECT_EQ(back, p);
    EXPECT_EQ(transpose_progression(p, from), p);
  }
}
