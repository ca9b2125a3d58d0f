#include "chordseed/corpus/prepare.hpp"

namespace chordseed::corpus {

namespace {

std::vector<Sequence> encode_all(std::span<const CorpusRecord> records, const TokenVocab& vocab) {
  std::vector<Sequence> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(encode(r, vocab));
  return out;
}

}  // namespace

PreparedCorpora prepare_corpora(std::span<const CorpusRecord> human, std::span<const CorpusRecord> llm,
                                const PrepareOptions& options) {
  PreparedCorpora out;
  const NormalizeOptions norm{options.bars, false};
  out.human = normalize_to_c(human, norm);
  out.llm = normalize_to_c(llm, norm);
  std::vector<CorpusRecord> both = out.human.all;
  both.insert(both.end(), out.llm.all.begin(), out.llm.all.end());
  out.vocab = build_vocab(both);
  out.human_split = make_split(encode_all(out.human.training, out.vocab), options.validation_fraction, options.seed);
  out.llm_split = make_split(encode_all(out.llm.training, out.vocab), options.validation_fraction, options.seed + 1);
  return out;
}

}  // namespace chordseed::corpus
