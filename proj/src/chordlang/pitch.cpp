#include "chordseed/chordlang/pitch.hpp"

#include <cctype>

namespace chordseed::chordlang {

namespace {

constexpr std::array<int, 7> kNatural = {0, 2, 4, 5, 7, 9, 11};

std::optional<Letter> letter_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'C': return Letter::C;
    case 'D': return Letter::D;
    case 'E': return Letter::E;
    case 'F': return Letter::F;
    case 'G': return Letter::G;
    case 'A': return Letter::A;
    case 'B': return Letter::B;
    default: return std::nullopt;
  }
}

constexpr std::array<Key, 12> kStandardKeys = {{
    {{Letter::C, 0}},  {{Letter::G, 0}},  {{Letter::D, 0}},  {{Letter::A, 0}},
    {{Letter::E, 0}},  {{Letter::B, 0}},  {{Letter::F, 1}},  {{Letter::D, -1}},
    {{Letter::A, -1}}, {{Letter::E, -1}}, {{Letter::B, -1}}, {{Letter::F, 0}},
}};

constexpr std::array<Mode, 9> kModes = {Mode::Maj, Mode::Min, Mode::Dor, Mode::Phr, Mode::Lyd,
                                        Mode::Mix, Mode::Loc, Mode::Hmin, Mode::Phdm};

}  // namespace

int natural_chromatic(Letter letter) { return kNatural[static_cast<std::size_t>(letter)]; }

int letter_index(Letter letter) { return static_cast<int>(letter); }

Letter letter_from_index(int index) { return static_cast<Letter>(((index % 7) + 7) % 7); }

int PitchClass::chromatic() const {
  return ((natural_chromatic(letter) + accidental) % 12 + 12) % 12;
}

std::string PitchClass::to_string() const {
  static constexpr char kLetters[] = "CDEFGAB";
  std::string out(1, kLetters[letter_index(letter)]);
  switch (accidental) {
    case -2: out += "bb"; break;
    case -1: out += "b"; break;
    case 1: out += "#"; break;
    case 2: out += "x"; break;
    default: break;
  }
  return out;
}

PitchClass sharp_spelling(int chromatic) {
  static constexpr std::array<PitchClass, 12> kSharp = {{
      {Letter::C, 0}, {Letter::C, 1}, {Letter::D, 0}, {Letter::D, 1},
      {Letter::E, 0}, {Letter::F, 0}, {Letter::F, 1}, {Letter::G, 0},
      {Letter::G, 1}, {Letter::A, 0}, {Letter::A, 1}, {Letter::B, 0},
  }};
  return kSharp[static_cast<std::size_t>(((chromatic % 12) + 12) % 12)];
}

std::optional<PitchClass> read_pitch_class(std::string_view text, std::size_t& pos,
                                           bool* lowercase) {
  if (pos >= text.size()) return std::nullopt;
  auto letter = letter_from_char(text[pos]);
  if (!letter) return std::nullopt;
  if (lowercase) *lowercase = std::islower(static_cast<unsigned char>(text[pos])) != 0;
  std::size_t p = pos + 1;
  int accidental = 0;
  if (p < text.size()) {
    if (text[p] == '#') {
      accidental = 1;
      ++p;
    } else if (text[p] == 'x') {
      accidental = 2;
      ++p;
    } else if (text[p] == 'b') {
      if (p + 1 < text.size() && text[p + 1] == 'b') {
        accidental = -2;
        p += 2;
      } else {
        accidental = -1;
        ++p;
      }
    }
  }
  pos = p;
  return PitchClass{*letter, accidental};
}

std::optional<PitchClass> parse_pitch_class(std::string_view text) {
  std::size_t pos = 0;
  auto pc = read_pitch_class(text, pos);
  if (!pc || pos != text.size()) return std::nullopt;
  return pc;
}

bool Key::is_standard() const {
  for (const auto& k : kStandardKeys) {
    if (k == *this) return true;
  }
  return false;
}

std::span<const Key> standard_keys() { return kStandardKeys; }

std::optional<Key> parse_key(std::string_view text, bool standard_only) {
  if (text.empty() || !std::isupper(static_cast<unsigned char>(text.front()))) return std::nullopt;
  auto pc = parse_pitch_class(text);
  if (!pc) return std::nullopt;
  Key key{*pc};
  if (standard_only && !key.is_standard()) return std::nullopt;
  return key;
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Maj: return "Maj";
    case Mode::Min: return "Min";
    case Mode::Dor: return "Dor";
    case Mode::Phr: return "Phr";
    case Mode::Lyd: return "Lyd";
    case Mode::Mix: return "Mix";
    case Mode::Loc: return "Loc";
    case Mode::Hmin: return "Hmin";
    case Mode::Phdm: return "Phdm";
  }
  return "Maj";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : kModes) {
    if (mode_name(m) == text) return m;
  }
  return std::nullopt;
}

std::span<const Mode> all_modes() { return kModes; }

const std::array<int, 7>& scale_intervals(Mode mode) {
  static constexpr std::array<std::array<int, 7>, 9> kIntervals = {{
      {0, 2, 4, 5, 7, 9, 11},  // Maj
      {0, 2, 3, 5, 7, 8, 10},  // Min
      {0, 2, 3, 5, 7, 9, 10},  // Dor
      {0, 1, 3, 5, 7, 8, 10},  // Phr
      {0, 2, 4, 6, 7, 9, 11},  // Lyd
      {0, 2, 4, 5, 7, 9, 10},  // Mix
      {0, 1, 3, 5, 6, 8, 10},  // Loc
      {0, 2, 3, 5, 7, 8, 11},  // Hmin
      {0, 1, 4, 5, 7, 8, 10},  // Phdm
  }};
  return kIntervals[static_cast<std::size_t>(mode)];
}

}  // namespace chordseed::chordlang
