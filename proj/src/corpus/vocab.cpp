#include "chordseed/corpus/vocab.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "chordseed/common/digest.hpp"

namespace chordseed::corpus {

using nlohmann::json;

namespace {

const std::array<std::string, TokenVocab::kReserved> kReservedNames = {"PAD", "BOS", "EOS", "UNK"};

}  // namespace

TokenVocab::TokenVocab(std::vector<std::string> chord_tokens) : tokens_(std::move(chord_tokens)) {
  std::string digest_input;
  for (const auto& r : kReservedNames) digest_input += r + '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(kReserved + i)).second) {
      throw FormatError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
    digest_input += tokens_[i] + '\n';
  }
  version_ = sha256_hex(digest_input).substr(0, 16);
}

TokenId TokenVocab::id_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool TokenVocab::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const std::string& TokenVocab::token_of(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
  }
  if (static_cast<std::size_t>(id) < kReserved) return kReservedNames[static_cast<std::size_t>(id)];
  return tokens_[static_cast<std::size_t>(id) - kReserved];
}

bool TokenVocab::is_chord(TokenId id) const {
  return id >= static_cast<TokenId>(kReserved) && static_cast<std::size_t>(id) < size();
}

json TokenVocab::to_json() const {
  json j;
  j["format"] = kFormatVersion;
  j["version"] = version_;
  j["reserved"] = kReservedNames;
  j["tokens"] = tokens_;
  return j;
}

TokenVocab TokenVocab::from_json(const json& j) {
  if (j.value("format", 0) != kFormatVersion) throw FormatError("unsupported vocabulary format");
  if (j.at("reserved").get<std::vector<std::string>>() !=
      std::vector<std::string>(kReservedNames.begin(), kReservedNames.end())) {
    throw FormatError("unexpected reserved tokens in vocabulary");
  }
  TokenVocab v(j.at("tokens").get<std::vector<std::string>>());
  if (j.contains("version") && j["version"].get<std::string>() != v.version()) {
    throw FormatError("vocabulary version stamp does not match its tokens");
  }
  return v;
}

void TokenVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  out << to_json().dump(2) << '\n';
}

TokenVocab TokenVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  return from_json(json::parse(in));
}

TokenVocab build_vocab(std::span<const CorpusRecord> records, const VocabOptions& options) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    for (const auto& c : r.chords) ++counts[chordlang::canonicalize(c)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= options.min_frequency) ranked.emplace_back(tok, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [tok, n] : ranked) tokens.push_back(tok);
  return TokenVocab(std::move(tokens));
}

Sequence encode(std::span<const std::string> chords, const TokenVocab& vocab) {
  Sequence ids;
  ids.reserve(chords.size() + 2);
  ids.push_back(TokenVocab::kBos);
  for (const auto& c : chords) ids.push_back(vocab.id_of(c));
  ids.push_back(TokenVocab::kEos);
  return ids;
}

Sequence encode(const chordlang::Progression& p, const TokenVocab& vocab) {
  auto tokens = chordlang::chord_tokens(p);
  return encode(tokens, vocab);
}

Sequence encode(const CorpusRecord& r, const TokenVocab& vocab) { return encode(r.chords, vocab); }

std::vector<std::string> decode(std::span<const TokenId> ids, const TokenVocab& vocab) {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == TokenVocab::kBos || id == TokenVocab::kEos || id == TokenVocab::kPad) continue;
    out.push_back(vocab.token_of(id));
  }
  return out;
}

}  // namespace chordseed::corpus
