// Writes the synthetic desk corpora under data/corpus:
//   human_desk.jsonl  functional-harmony progressions in many keys
//   llm_desk.jsonl    looser, extension-heavy progressions standing in for
//                     LLM output
// Both are seeded and reproducible.

#include <array>
#include <filesystem>
#include <iostream>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/corpus/corpus.hpp"

namespace cl = chordseed::chordlang;
namespace corpus = chordseed::corpus;

namespace {

struct Style {
  std::array<std::array<double, 7>, 7> next;  // degree -> degree weights
  std::array<double, 7> start;
  double seventh = 0.0;
  double sus = 0.0;
  double add9 = 0.0;
  double borrowed = 0.0;
  double slash = 0.0;
};

// Common-practice-ish pop transitions over degrees I..vii.
Style human_style() {
  Style s;
  s.start = {0.55, 0.05, 0.02, 0.12, 0.06, 0.20, 0.0};
  s.next = {{
      {0.02, 0.08, 0.03, 0.35, 0.30, 0.22, 0.00},  // I
      {0.05, 0.02, 0.02, 0.15, 0.65, 0.08, 0.03},  // ii
      {0.05, 0.05, 0.02, 0.30, 0.08, 0.50, 0.00},  // iii
      {0.35, 0.08, 0.02, 0.02, 0.43, 0.10, 0.00},  // IV
      {0.55, 0.03, 0.04, 0.13, 0.02, 0.23, 0.00},  // V
      {0.10, 0.20, 0.05, 0.42, 0.21, 0.02, 0.00},  // vi
      {0.80, 0.00, 0.10, 0.00, 0.00, 0.10, 0.00},  // vii
  }};
  s.seventh = 0.10;
  s.sus = 0.03;
  s.add9 = 0.02;
  s.borrowed = 0.03;
  s.slash = 0.04;
  return s;
}

// Flatter movement and heavier colour: the proposal distribution.
Style llm_style() {
  Style s;
  s.start = {0.30, 0.14, 0.08, 0.18, 0.08, 0.20, 0.02};
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) s.next[i][j] = i == j ? 0.02 : (j == 6 ? 0.04 : 0.17);
  }
  s.seventh = 0.45;
  s.sus = 0.08;
  s.add9 = 0.10;
  s.borrowed = 0.15;
  s.slash = 0.06;
  return s;
}

template <std::size_t N>
std::size_t draw(const std::array<double, N>& weights, std::mt19937_64& rng) {
  std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
  return d(rng);
}

bool chance(double p, std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

// Diatonic chord on `degree` of key/mode; 7ths and colour tones per style.
cl::Chord realize(int degree, const cl::Key& key, cl::Mode mode, const Style& style, std::mt19937_64& rng) {
  const auto& iv = cl::scale_intervals(mode);
  const auto at = [&](int d) { return iv[static_cast<std::size_t>(d % 7)] + (d >= 7 ? 12 : 0); };
  cl::Chord c;
  c.root = cl::shift_pitch(key.root, degree, at(degree));
  const int third = at(degree + 2) - at(degree);
  const int fifth = at(degree + 4) - at(degree);
  if (third == 4) {
    c.quality = fifth == 8 ? cl::Quality::Augmented : cl::Quality::Major;
  } else {
    c.quality = fifth == 6 ? cl::Quality::Diminished : cl::Quality::Minor;
  }
  if (c.quality == cl::Quality::Diminished && chance(0.5, rng)) {
    c.quality = cl::Quality::Minor;  // half-diminished spelled m7b5
    c.extension = cl::Extension::Seventh;
    c.alterations.insert(cl::Alteration::Flat5);
    return c;
  }
  if (chance(style.seventh, rng) && c.quality != cl::Quality::Augmented) {
    c.extension = cl::Extension::Seventh;
    c.major_seventh = at(degree + 6) - at(degree) == 11 && c.quality == cl::Quality::Major;
    if (c.quality == cl::Quality::Diminished) c.major_seventh = false;
    if (chance(0.25, rng) && c.quality != cl::Quality::Diminished) c.extension = cl::Extension::Ninth;
  } else if (c.quality == cl::Quality::Major && chance(style.sus, rng)) {
    c.suspension = chance(0.7, rng) ? cl::Suspension::Sus4 : cl::Suspension::Sus2;
  } else if (c.quality != cl::Quality::Diminished && chance(style.add9, rng)) {
    c.adds.insert(cl::Added::Add9);
  }
  if (!c.extension && c.quality == cl::Quality::Major && chance(style.slash, rng)) {
    c.bass = cl::shift_pitch(c.root, 2, 4);  // first inversion
  }
  return c;
}

// bVI or bVII borrowed from the parallel minor.
cl::Chord borrowed(const cl::Key& key, std::mt19937_64& rng) {
  cl::Chord c;
  if (chance(0.5, rng)) {
    c.root = cl::shift_pitch(key.root, 5, 8);
  } else {
    c.root = cl::shift_pitch(key.root, 6, 10);
  }
  return c;
}

std::vector<corpus::CorpusRecord> generate(std::size_t count, const Style& style, corpus::Source source,
                                           double c_major_bias, std::mt19937_64& rng) {
  const auto keys = cl::standard_keys();
  std::vector<corpus::CorpusRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    cl::Progression p;
    p.key = chance(c_major_bias, rng) ? cl::Key{} : keys[rng() % keys.size()];
    const double m = std::uniform_real_distribution<double>(0, 1)(rng);
    p.mode = m < 0.72 ? cl::Mode::Maj : m < 0.94 ? cl::Mode::Min : m < 0.97 ? cl::Mode::Dor : cl::Mode::Mix;
    const std::size_t bars = chance(0.06, rng) ? 3 : 4;
    // The degree table is read relative to the tonic in every mode.
    auto degree = static_cast<int>(draw(style.start, rng));
    for (std::size_t b = 0; b < bars; ++b) {
      if (b > 0) degree = static_cast<int>(draw(style.next[static_cast<std::size_t>(degree)], rng));
      if (p.mode == cl::Mode::Maj && b > 0 && chance(style.borrowed, rng)) {
        p.chords.push_back(borrowed(p.key, rng));
      } else {
        p.chords.push_back(realize(degree, p.key, p.mode, style, rng));
      }
    }
    out.push_back(corpus::CorpusRecord::from_progression(p, source));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic desk corpora"};
  std::filesystem::path out_dir = "data/corpus";
  std::size_t human = 2400, llm = 2400;
  std::uint64_t seed = 20240601;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--human", human, "human-style progressions");
  app.add_option("--llm", llm, "LLM-style progressions");
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    std::mt19937_64 rng(seed);
    const auto h = generate(human, human_style(), corpus::Source::HumanCorpus, 0.0, rng);
    const auto l = generate(llm, llm_style(), corpus::Source::LlmGenerated, 0.5, rng);
    corpus::write_corpus(out_dir / "human_desk.jsonl", h);
    corpus::write_corpus(out_dir / "llm_desk.jsonl", l);
    std::cout << "wrote " << h.size() << " human and " << l.size() << " LLM-style records to " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
