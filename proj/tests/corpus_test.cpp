#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chordseed/corpus/corpus.hpp"
#include "chordseed/corpus/split.hpp"
#include "chordseed/corpus/vocab.hpp"

using namespace chordseed::corpus;
namespace cl = chordseed::chordlang;

namespace {

LoadedCorpus read(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in, Source::HumanCorpus);
}

CorpusRecord record(const char* key, std::vector<std::string> chords, cl::Mode mode = cl::Mode::Maj) {
  return CorpusRecord{*cl::parse_key(key, false), mode, std::move(chords), Source::HumanCorpus};
}

}  // namespace

TEST(LoadCorpus, SchemaExample) {
  auto loaded = read(R"({"key":"C","mode":"Maj","chords":["C","Am","F","G"]})");
  ASSERT_EQ(loaded.records.size(), 1u);
  EXPECT_EQ(loaded.records[0].chords, (std::vector<std::string>{"C", "Am", "F", "G"}));
  EXPECT_EQ(loaded.records[0].source, Source::HumanCorpus);
  EXPECT_TRUE(loaded.skipped.empty());
}

TEST(LoadCorpus, SkipsMalformedLinesWithLineNumbers) {
  auto loaded = read(
      "{\"key\":\"C\",\"mode\":\"Maj\",\"chords\":[\"C\",\"G\"]}\n"
      "\n"
      "{\"key\":\"C\",\"mode\":\"Maj\",\"chords\":[\"Gmaj\"]}\n"
      "{\"key\":\"D\",\"mode\":\"Min\",\"chords\":[\"dm\",\"gm/Bb\"],\"source\":\"llm_generated\"}\n");
  ASSERT_EQ(loaded.records.size(), 2u);
  ASSERT_EQ(loaded.skipped.size(), 1u);
  EXPECT_EQ(loaded.skipped[0].line, 3u);
  EXPECT_EQ(loaded.records[1].chords, (std::vector<std::string>{"Dm", "Gm/Bb"}));
  EXPECT_EQ(loaded.records[1].source, Source::LlmGenerated);
}

TEST(LoadCorpus, EmptyFileIsFormatError) {
  EXPECT_THROW(read(""), FormatError);
  EXPECT_THROW(read("\n\n"), FormatError);
  EXPECT_THROW(read("not json\n"), FormatError);
}

TEST(LoadCorpus, FractionLimitOnLargerFiles) {
  std::string good = "{\"key\":\"C\",\"mode\":\"Maj\",\"chords\":[\"C\"]}\n";
  std::string bad = "{\"key\":\"H\",\"mode\":\"Maj\",\"chords\":[\"C\"]}\n";
  std::string ok_text, bad_text;
  for (int i = 0; i < 18; ++i) ok_text += good;
  ok_text += bad + bad;  // 2 of 20 = 10%, allowed
  EXPECT_EQ(read(ok_text).records.size(), 18u);
  for (int i = 0; i < 17; ++i) bad_text += good;
  bad_text += bad + bad + bad;  // 15%
  EXPECT_THROW(read(bad_text), FormatError);
}

TEST(LoadCorpus, MissingFileIsIoError) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl", Source::HumanCorpus), IoError);
}

TEST(LoadCorpus, WriteThenLoad) {
  auto path = std::filesystem::temp_directory_path() / "chordseed_corpus_test.jsonl";
  std::vector<CorpusRecord> recs = {record("D", {"Bm", "G", "D", "A"}), record("F#", {"F#", "B/F#", "C#/G#"})};
  write_corpus(path, recs);
  auto loaded = load_corpus(path, Source::LlmGenerated);
  EXPECT_EQ(loaded.records, recs);
  std::filesystem::remove(path);
}

TEST(NormalizeToC, TransposesAndFiltersBars) {
  std::vector<CorpusRecord> recs = {record("D", {"Bm", "G", "D", "A"}), record("C", {"C", "Am", "F", "G"}),
                                    record("F#", {"F#", "B/F#", "C#/G#"})};
  auto norm = normalize_to_c(recs);
  ASSERT_EQ(norm.all.size(), 3u);
  ASSERT_EQ(norm.training.size(), 2u);
  EXPECT_EQ(norm.training[0].chords, (std::vector<std::string>{"Am", "F", "C", "G"}));
  EXPECT_EQ(norm.training[1].chords, (std::vector<std::string>{"C", "Am", "F", "G"}));
  EXPECT_EQ(norm.all[2].chords, (std::vector<std::string>{"C", "F/C", "G/D"}));
  for (const auto& r : norm.all) EXPECT_EQ(r.key.to_string(), "C");
}

TEST(NormalizeToC, FilterCountMatchesOracle) {
  std::vector<CorpusRecord> recs;
  std::size_t expected = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> chords(static_cast<std::size_t>(2 + i % 4), "Am");
    if (chords.size() == 4) ++expected;
    recs.push_back(record("A", chords, cl::Mode::Min));
  }
  auto norm = normalize_to_c(recs);
  EXPECT_EQ(norm.training.size(), expected);
  EXPECT_EQ(norm.all.size(), recs.size());
}

TEST(NormalizeToC, Idempotent) {
  std::vector<CorpusRecord> recs = {record("Eb", {"Cm7", "Fm7", "Bb7", "Ebmaj7"}), record("B", {"C#m7", "F#7", "Bmaj9", "D#dim/C"})};
  auto once = normalize_to_c(recs);
  auto twice = normalize_to_c(once.all);
  EXPECT_EQ(once.all, twice.all);
  EXPECT_EQ(once.training, twice.training);
}

TEST(NormalizeToC, OptionalDeduplication) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G", "Am", "F"}), record("D", {"D", "A", "Bm", "G"})};
  EXPECT_EQ(normalize_to_c(recs).training.size(), 2u);
  EXPECT_EQ(normalize_to_c(recs, {4, true}).training.size(), 1u);
}

TEST(BuildVocab, ReservedPlusTokens) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G"})};
  TokenVocab v = build_vocab(recs);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.token_of(0), "PAD");
  EXPECT_EQ(v.token_of(1), "BOS");
  EXPECT_EQ(v.token_of(2), "EOS");
  EXPECT_EQ(v.token_of(3), "UNK");
  EXPECT_EQ(v.token_of(4), "C");
  EXPECT_EQ(v.token_of(5), "G");
}

TEST(BuildVocab, FrequencyThenLexicographicOrder) {
  std::vector<CorpusRecord> recs = {record("C", {"G", "F", "C"}), record("C", {"G", "Am", "F"})};
  TokenVocab v = build_vocab(recs);
  EXPECT_EQ(std::vector<std::string>(v.chord_tokens().begin(), v.chord_tokens().end()),
            (std::vector<std::string>{"F", "G", "Am", "C"}));
}

TEST(BuildVocab, UnionAcrossSourcesAndDeterministic) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G"}), record("C", {"Cmaj9#11", "G"})};
  recs[1].source = Source::LlmGenerated;
  TokenVocab a = build_vocab(recs);
  TokenVocab b = build_vocab(recs);
  EXPECT_TRUE(a.contains("Cmaj9#11"));
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_EQ(a.version(), b.version());
}

TEST(BuildVocab, MinFrequencyMapsRareTokensToUnk) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G", "C", "Ebaug"})};
  // Frequency-count oracle: C=2, G=1, Ebaug=1.
  std::map<std::string, int> counts;
  for (const auto& c : recs[0].chords) ++counts[c];
  TokenVocab v = build_vocab(recs, {2});
  for (const auto& [tok, n] : counts) {
    EXPECT_EQ(v.contains(tok), n >= 2) << tok;
  }
  auto ids = encode(std::vector<std::string>{"G"}, v);
  EXPECT_EQ(ids[1], TokenVocab::kUnk);
}

TEST(Encode, FramedIds) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "Am", "F", "G"})};
  TokenVocab v = build_vocab(recs);
  auto p = cl::parse_progression("C Am F G", *cl::parse_key("C"), cl::Mode::Maj);
  Sequence ids = encode(p, v);
  EXPECT_EQ(ids, (Sequence{TokenVocab::kBos, v.id_of("C"), v.id_of("Am"), v.id_of("F"), v.id_of("G"),
                           TokenVocab::kEos}));
  EXPECT_EQ(decode(ids, v), (std::vector<std::string>{"C", "Am", "F", "G"}));
}

TEST(Encode, OutOfVocabularyIsUnk) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G"})};
  TokenVocab v = build_vocab(recs);
  EXPECT_FALSE(v.contains("Fx13b9"));
  auto ids = encode(std::vector<std::string>{"Fx13b9"}, v);
  EXPECT_EQ(ids[1], TokenVocab::kUnk);
  EXPECT_EQ(decode(ids, v), (std::vector<std::string>{"UNK"}));
}

TEST(Vocab, JsonRoundTripAndVersionCheck) {
  std::vector<CorpusRecord> recs = {record("C", {"C", "G", "Dm7"})};
  TokenVocab v = build_vocab(recs);
  auto path = std::filesystem::temp_directory_path() / "chordseed_vocab_test.json";
  v.save(path);
  TokenVocab w = TokenVocab::load(path);
  EXPECT_EQ(v, w);
  EXPECT_EQ(v.version(), w.version());
  auto j = v.to_json();
  j["version"] = "0000000000000000";
  EXPECT_THROW(TokenVocab::from_json(j), FormatError);
  std::filesystem::remove(path);
}

TEST(Split, DisjointAndReproducible) {
  std::vector<Sequence> seqs;
  for (int i = 0; i < 100; ++i) seqs.push_back({1, 4 + i, 2});
  auto a = make_split(seqs, 0.2, 5);
  auto b = make_split(seqs, 0.2, 5);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_EQ(a.validation.size(), 20u);
  EXPECT_EQ(a.train.size(), 80u);
  for (const auto& v : a.validation) {
    for (const auto& t : a.train) EXPECT_NE(v, t);
  }
  auto c = make_split(seqs, 0.2, 6);
  EXPECT_NE(a.validation, c.validation);
}
