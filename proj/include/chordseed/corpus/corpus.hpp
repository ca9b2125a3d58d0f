#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chordseed/chordlang/pitch.hpp"
#include "chordseed/chordlang/progression.hpp"
#include "chordseed/common/error.hpp"

namespace chordseed::corpus {

enum class Source { HumanCorpus, LlmGenerated };

std::string_view source_name(Source s);
std::optional<Source> parse_source(std::string_view text);

/// One progression from a corpus file. Chords are stored as canonical symbols.
struct CorpusRecord {
  chordlang::Key key;
  chordlang::Mode mode = chordlang::Mode::Maj;
  std::vector<std::string> chords;
  Source source = Source::HumanCorpus;

  chordlang::Progression to_progression() const;
  static CorpusRecord from_progression(const chordlang::Progression& p, Source source);

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadedCorpus {
  std::vector<CorpusRecord> records;
  std::vector<LineIssue> skipped;
};

struct LoadOptions {
  double max_malformed_fraction = 0.1;
  // The malformed-fraction limit is only enforced from this many non-blank
  // lines on; smaller files fail only when nothing parses.
  std::size_t min_lines_for_fraction = 20;
};

/// Reads JSONL records: {"key","mode","chords":[...],"source"?}. Lines whose
/// "source" is absent get `default_source`. Malformed lines are skipped and
/// reported with their line numbers.
LoadedCorpus load_corpus(const std::filesystem::path& path, Source default_source,
                         const LoadOptions& options = {});
LoadedCorpus read_corpus(std::istream& in, Source default_source, const LoadOptions& options = {});

void write_corpus(const std::filesystem::path& path, std::span<const CorpusRecord> records);
std::string to_jsonl_line(const CorpusRecord& record);

struct NormalizeOptions {
  std::size_t bars = 4;
  bool drop_duplicates = false;
};

struct NormalizedCorpus {
  std::vector<CorpusRecord> all;       // every record, transposed to C
  std::vector<CorpusRecord> training;  // bar-count filtered (optionally deduplicated)
};

/// Transposes one record so its key root is C; mode is kept.
CorpusRecord transpose_to_c(const CorpusRecord& record);

NormalizedCorpus normalize_to_c(std::span<const CorpusRecord> records,
                                const NormalizeOptions& options = {});

}  // namespace chordseed::corpus
