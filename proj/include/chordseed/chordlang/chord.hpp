#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "chordseed/chordlang/pitch.hpp"
#include "chordseed/common/error.hpp"

namespace chordseed::chordlang {

/// Raised for unrecognized chord or progression text. `offset` is the byte
/// offset inside the offending symbol; `token_index` is set when the symbol
/// came from a whitespace-separated progression line.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset,
             std::optional<std::size_t> token_index = std::nullopt);

  std::size_t offset() const { return offset_; }
  std::optional<std::size_t> token_index() const { return token_index_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::size_t offset_;
  std::optional<std::size_t> token_index_;
};

enum class Quality { Major, Minor, Augmented, Diminished };

// Declaration order is the canonical render order within each group.
enum class Extension { Sixth, SixNine, Seventh, Ninth, Eleventh, Thirteenth };
enum class Suspension { Sus2, Sus4, SharpSus2, SharpSus4 };
enum class Added { Add2, Add4, Add6, Add9, Add11, Add13 };
enum class Alteration { Flat5, Sharp5, Flat9, Sharp9, Sharp11, Flat13 };

std::string_view token(Quality q);
std::string_view token(Extension e);
std::string_view token(Suspension s);
std::string_view token(Added a);
std::string_view token(Alteration a);

/// Structured chord symbol. Renders as
/// Root, Quality, [maj]Extension, Sus, Adds, Alterations, /Bass.
struct Chord {
  PitchClass root;
  Quality quality = Quality::Major;
  std::optional<Extension> extension;
  // Extension is of the major-seventh family (maj7, maj9, maj11, maj13).
  bool major_seventh = false;
  std::optional<Suspension> suspension;
  std::set<Added> adds;
  std::set<Alteration> alterations;
  std::optional<PitchClass> bass;

  friend bool operator==(const Chord&, const Chord&) = default;
};

/// Whether `render_chord(c)` parses back to `c`. Fails for a major-seventh flag
/// without a 7/9/11/13 extension, and for alterations written directly after a
/// bare root ("Cb9" would read as a Cb chord).
bool is_well_formed(const Chord& c);

Chord parse_chord(std::string_view text);
std::string render_chord(const Chord& c);

/// render(parse(text)).
std::string canonicalize(std::string_view text);

/// Same sounding chord, ignoring spelling (C# vs Db roots and basses).
bool chromatically_equivalent(const Chord& a, const Chord& b);

}  // namespace chordseed::chordlang
