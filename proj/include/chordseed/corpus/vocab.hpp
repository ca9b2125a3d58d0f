#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/corpus/corpus.hpp"

namespace chordseed::corpus {

using TokenId = std::int32_t;
using Sequence = std::vector<TokenId>;

/// Chord-token vocabulary shared by every sequence model. Ids 0..3 are
/// reserved (PAD, BOS, EOS, UNK); chord tokens follow in frequency-descending,
/// then lexicographic, order.
class TokenVocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr std::size_t kReserved = 4;
  static constexpr int kFormatVersion = 1;

  TokenVocab() = default;
  explicit TokenVocab(std::vector<std::string> chord_tokens);

  std::size_t size() const { return kReserved + tokens_.size(); }
  std::span<const std::string> chord_tokens() const { return tokens_; }

  /// UNK for unknown tokens.
  TokenId id_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  /// Reserved ids decode to "PAD", "BOS", "EOS", "UNK".
  const std::string& token_of(TokenId id) const;
  bool is_chord(TokenId id) const;

  /// Content hash of the token list; stamped into model artifacts.
  const std::string& version() const { return version_; }

  nlohmann::json to_json() const;
  static TokenVocab from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TokenVocab load(const std::filesystem::path& path);

  friend bool operator==(const TokenVocab& a, const TokenVocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::string version_;
};

struct VocabOptions {
  std::size_t min_frequency = 1;
};

/// Union of canonical chord tokens across all given records (both sources).
TokenVocab build_vocab(std::span<const CorpusRecord> records, const VocabOptions& options = {});

/// [BOS, chord ids..., EOS]; out-of-vocabulary chords map to UNK.
Sequence encode(std::span<const std::string> chords, const TokenVocab& vocab);
Sequence encode(const chordlang::Progression& p, const TokenVocab& vocab);
Sequence encode(const CorpusRecord& r, const TokenVocab& vocab);

/// Chord strings for every non-framing id (BOS/EOS/PAD dropped, UNK -> "UNK").
std::vector<std::string> decode(std::span<const TokenId> ids, const TokenVocab& vocab);

}  // namespace chordseed::corpus
