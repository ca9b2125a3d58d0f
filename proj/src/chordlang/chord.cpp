#include "chordseed/chordlang/chord.hpp"

#include <array>
#include <utility>

namespace chordseed::chordlang {

namespace {

std::string format_message(const std::string& message, std::size_t offset,
                           std::optional<std::size_t> token_index) {
  std::string out = message + " (offset " + std::to_string(offset);
  if (token_index) out += ", token " + std::to_string(*token_index);
  return out + ")";
}

bool starts_with_at(std::string_view text, std::size_t pos, std::string_view prefix) {
  return text.substr(pos, prefix.size()) == prefix;
}

template <typename Enum, std::size_t N>
std::optional<Enum> match_longest(std::string_view text, std::size_t& pos,
                                  const std::array<Enum, N>& candidates) {
  std::optional<Enum> best;
  std::size_t best_len = 0;
  for (Enum e : candidates) {
    auto tok = token(e);
    if (tok.size() > best_len && starts_with_at(text, pos, tok)) {
      best = e;
      best_len = tok.size();
    }
  }
  if (best) pos += best_len;
  return best;
}

constexpr std::array<Extension, 6> kExtensions = {Extension::Sixth,   Extension::SixNine,
                                                  Extension::Seventh, Extension::Ninth,
                                                  Extension::Eleventh, Extension::Thirteenth};
constexpr std::array<Extension, 4> kMajorSeventhExtensions = {
    Extension::Seventh, Extension::Ninth, Extension::Eleventh, Extension::Thirteenth};
constexpr std::array<Suspension, 4> kSuspensions = {Suspension::Sus2, Suspension::Sus4,
                                                    Suspension::SharpSus2, Suspension::SharpSus4};
constexpr std::array<Added, 6> kAdds = {Added::Add2, Added::Add4,  Added::Add6,
                                        Added::Add9, Added::Add11, Added::Add13};
constexpr std::array<Alteration, 6> kAlterations = {Alteration::Flat5,  Alteration::Sharp5,
                                                    Alteration::Flat9,  Alteration::Sharp9,
                                                    Alteration::Sharp11, Alteration::Flat13};

bool is_major_seventh_extension(Extension e) {
  return e == Extension::Seventh || e == Extension::Ninth || e == Extension::Eleventh ||
         e == Extension::Thirteenth;
}

bool accidental_in_range(const PitchClass& pc) { return pc.accidental >= -2 && pc.accidental <= 2; }

}  // namespace

ParseError::ParseError(std::string message, std::size_t offset,
                       std::optional<std::size_t> token_index)
    : Error(format_message(message, offset, token_index)),
      detail_(std::move(message)),
      offset_(offset),
      token_index_(token_index) {}

std::string_view token(Quality q) {
  switch (q) {
    case Quality::Major: return "";
    case Quality::Minor: return "m";
    case Quality::Augmented: return "aug";
    case Quality::Diminished: return "dim";
  }
  return "";
}

std::string_view token(Extension e) {
  switch (e) {
    case Extension::Sixth: return "6";
    case Extension::SixNine: return "6/9";
    case Extension::Seventh: return "7";
    case Extension::Ninth: return "9";
    case Extension::Eleventh: return "11";
    case Extension::Thirteenth: return "13";
  }
  return "";
}

std::string_view token(Suspension s) {
  switch (s) {
    case Suspension::Sus2: return "sus2";
    case Suspension::Sus4: return "sus4";
    case Suspension::SharpSus2: return "sus#2";
    case Suspension::SharpSus4: return "sus#4";
  }
  return "";
}

std::string_view token(Added a) {
  switch (a) {
    case Added::Add2: return "add2";
    case Added::Add4: return "add4";
    case Added::Add6: return "add6";
    case Added::Add9: return "add9";
    case Added::Add11: return "add11";
    case Added::Add13: return "add13";
  }
  return "";
}

std::string_view token(Alteration a) {
  switch (a) {
    case Alteration::Flat5: return "b5";
    case Alteration::Sharp5: return "#5";
    case Alteration::Flat9: return "b9";
    case Alteration::Sharp9: return "#9";
    case Alteration::Sharp11: return "#11";
    case Alteration::Flat13: return "b13";
  }
  return "";
}

bool is_well_formed(const Chord& c) {
  if (!accidental_in_range(c.root)) return false;
  if (c.bass && !accidental_in_range(*c.bass)) return false;
  if (c.major_seventh && !(c.extension && is_major_seventh_extension(*c.extension))) return false;
  if (!c.alterations.empty() && c.quality == Quality::Major && !c.extension && !c.suspension &&
      c.adds.empty()) {
    return false;
  }
  return true;
}

Chord parse_chord(std::string_view text) {
  if (text.empty()) throw ParseError("empty chord symbol", 0);

  Chord chord;
  std::size_t pos = 0;
  bool lowercase = false;
  auto root = read_pitch_class(text, pos, &lowercase);
  if (!root) throw ParseError("expected root note A-G", 0);
  chord.root = *root;

  if (starts_with_at(text, pos, "min")) {
    throw ParseError("'min' is not a chord quality token, write 'm'", pos);
  }

  auto read_major_seventh = [&]() {
    const std::size_t at = pos;
    pos += 3;
    auto ext = match_longest(text, pos, kMajorSeventhExtensions);
    if (!ext) throw ParseError("'maj' must be fused with an extension (maj7, maj9, maj11, maj13)", at);
    chord.major_seventh = true;
    chord.extension = ext;
  };

  if (starts_with_at(text, pos, "maj")) {
    read_major_seventh();
  } else if (starts_with_at(text, pos, "m")) {
    chord.quality = Quality::Minor;
    ++pos;
  } else if (starts_with_at(text, pos, "aug")) {
    chord.quality = Quality::Augmented;
    pos += 3;
  } else if (starts_with_at(text, pos, "dim")) {
    chord.quality = Quality::Diminished;
    pos += 3;
  }

  if (lowercase && chord.quality != Quality::Minor && chord.quality != Quality::Diminished) {
    throw ParseError("lowercase root must be followed by 'm' or 'dim'", 0);
  }

  if (!chord.extension) {
    if (starts_with_at(text, pos, "maj")) {
      read_major_seventh();
    } else {
      chord.extension = match_longest(text, pos, kExtensions);
    }
  }

  if (starts_with_at(text, pos, "sus")) {
    const std::size_t at = pos;
    chord.suspension = match_longest(text, pos, kSuspensions);
    if (!chord.suspension) throw ParseError("unknown suspension", at);
  }

  while (starts_with_at(text, pos, "add")) {
    const std::size_t at = pos;
    auto add = match_longest(text, pos, kAdds);
    if (!add) throw ParseError("unknown added note", at);
    if (!chord.adds.insert(*add).second) throw ParseError("duplicate added note", at);
  }

  while (pos < text.size() && (text[pos] == 'b' || text[pos] == '#')) {
    const std::size_t at = pos;
    auto alt = match_longest(text, pos, kAlterations);
    if (!alt) break;
    if (!chord.alterations.insert(*alt).second) throw ParseError("duplicate alteration", at);
  }

  if (pos < text.size() && text[pos] == '/') {
    const std::size_t at = pos;
    ++pos;
    auto bass = read_pitch_class(text, pos);
    if (!bass) throw ParseError("expected bass note after '/'", at);
    chord.bass = *bass;
  }

  if (pos != text.size()) {
    throw ParseError("unrecognized token '" + std::string(text.substr(pos)) + "'", pos);
  }
  return chord;
}

std::string render_chord(const Chord& c) {
  std::string out = c.root.to_string();
  out += token(c.quality);
  if (c.major_seventh) out += "maj";
  if (c.extension) out += token(*c.extension);
  if (c.suspension) out += token(*c.suspension);
  for (Added a : c.adds) out += token(a);
  for (Alteration a : c.alterations) out += token(a);
  if (c.bass) {
    out += '/';
    out += c.bass->to_string();
  }
  return out;
}

std::string canonicalize(std::string_view text) { return render_chord(parse_chord(text)); }

bool chromatically_equivalent(const Chord& a, const Chord& b) {
  if (a.root.chromatic() != b.root.chromatic()) return false;
  if (a.bass.has_value() != b.bass.has_value()) return false;
  if (a.bass && a.bass->chromatic() != b.bass->chromatic()) return false;
  return a.quality == b.quality && a.extension == b.extension &&
         a.major_seventh == b.major_seventh && a.suspension == b.suspension && a.adds == b.adds &&
         a.alterations == b.alterations;
}

}  // namespace chordseed::chordlang
