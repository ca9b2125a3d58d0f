#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chordseed/corpus/corpus.hpp"
#include "chordseed/corpus/split.hpp"
#include "chordseed/corpus/vocab.hpp"

namespace chordseed::corpus {

struct PrepareOptions {
  std::size_t bars = 4;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

/// Both corpora transposed to C, one vocabulary over both, and a split per
/// source holding the progressions with `bars` chords.
struct PreparedCorpora {
  TokenVocab vocab;
  NormalizedCorpus human;
  NormalizedCorpus llm;
  DatasetSplit human_split;
  DatasetSplit llm_split;
};

PreparedCorpora prepare_corpora(std::span<const CorpusRecord> human, std::span<const CorpusRecord> llm,
                                const PrepareOptions& options = {});

}  // namespace chordseed::corpus
