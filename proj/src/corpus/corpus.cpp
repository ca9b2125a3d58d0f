#include "chordseed/corpus/corpus.hpp"

#include <fstream>
#include <istream>
#include <set>

#include <nlohmann/json.hpp>

namespace chordseed::corpus {

using nlohmann::json;
namespace cl = chordseed::chordlang;

std::string_view source_name(Source s) {
  return s == Source::HumanCorpus ? "human_corpus" : "llm_generated";
}

std::optional<Source> parse_source(std::string_view text) {
  if (text == "human_corpus") return Source::HumanCorpus;
  if (text == "llm_generated") return Source::LlmGenerated;
  return std::nullopt;
}

cl::Progression CorpusRecord::to_progression() const {
  cl::Progression p{{}, key, mode};
  p.chords.reserve(chords.size());
  for (const auto& c : chords) p.chords.push_back(cl::parse_chord(c));
  return p;
}

CorpusRecord CorpusRecord::from_progression(const cl::Progression& p, Source source) {
  return CorpusRecord{p.key, p.mode, cl::chord_tokens(p), source};
}

namespace {

CorpusRecord parse_line(const std::string& line, Source default_source) {
  json j = json::parse(line);  // throws json::parse_error
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  if (!j.contains("key") || !j["key"].is_string()) throw FormatError("missing string field 'key'");
  if (!j.contains("mode") || !j["mode"].is_string()) throw FormatError("missing string field 'mode'");
  if (!j.contains("chords") || !j["chords"].is_array()) throw FormatError("missing array field 'chords'");

  auto key = cl::parse_key(j["key"].get<std::string>(), /*standard_only=*/false);
  if (!key) throw FormatError("invalid key '" + j["key"].get<std::string>() + "'");
  auto mode = cl::parse_mode(j["mode"].get<std::string>());
  if (!mode) throw FormatError("invalid mode '" + j["mode"].get<std::string>() + "'");

  CorpusRecord rec{*key, *mode, {}, default_source};
  if (j.contains("source")) {
    if (!j["source"].is_string()) throw FormatError("'source' must be a string");
    auto src = parse_source(j["source"].get<std::string>());
    if (!src) throw FormatError("invalid source '" + j["source"].get<std::string>() + "'");
    rec.source = *src;
  }
  if (j["chords"].empty()) throw FormatError("empty chord list");
  for (const auto& c : j["chords"]) {
    if (!c.is_string()) throw FormatError("chord entries must be strings");
    rec.chords.push_back(cl::canonicalize(c.get<std::string>()));
  }
  return rec;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

LoadedCorpus read_corpus(std::istream& in, Source default_source, const LoadOptions& options) {
  LoadedCorpus out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ++non_blank;
    try {
      out.records.push_back(parse_line(line, default_source));
    } catch (const std::exception& e) {
      out.skipped.push_back({line_no, e.what()});
    }
  }
  if (non_blank == 0) throw FormatError("corpus contains no records");
  const bool too_many =
      non_blank >= options.min_lines_for_fraction &&
      static_cast<double>(out.skipped.size()) > options.max_malformed_fraction * static_cast<double>(non_blank);
  if (out.records.empty() || too_many) {
    throw FormatError("too many malformed lines: " + std::to_string(out.skipped.size()) + " of " +
                      std::to_string(non_blank) + " (first at line " +
                      std::to_string(out.skipped.front().line) + ": " +
                      out.skipped.front().message + ")");
  }
  return out;
}

LoadedCorpus load_corpus(const std::filesystem::path& path, Source default_source,
                         const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return read_corpus(in, default_source, options);
}

std::string to_jsonl_line(const CorpusRecord& record) {
  json j;
  j["key"] = record.key.to_string();
  j["mode"] = std::string(cl::mode_name(record.mode));
  j["chords"] = record.chords;
  j["source"] = std::string(source_name(record.source));
  return j.dump();
}

void write_corpus(const std::filesystem::path& path, std::span<const CorpusRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

CorpusRecord transpose_to_c(const CorpusRecord& record) {
  const cl::Key c{cl::PitchClass{cl::Letter::C, 0}};
  if (record.key == c) return record;
  return CorpusRecord::from_progression(cl::transpose_progression(record.to_progression(), c),
                                        record.source);
}

NormalizedCorpus normalize_to_c(std::span<const CorpusRecord> records,
                                const NormalizeOptions& options) {
  NormalizedCorpus out;
  out.all.reserve(records.size());
  std::set<std::pair<cl::Mode, std::vector<std::string>>> seen;
  for (const auto& r : records) {
    CorpusRecord t = transpose_to_c(r);
    if (t.chords.size() == options.bars) {
      if (!options.drop_duplicates || seen.emplace(t.mode, t.chords).second) {
        out.training.push_back(t);
      }
    }
    out.all.push_back(std::move(t));
  }
  return out;
}

}  // namespace chordseed::corpus
