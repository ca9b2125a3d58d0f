#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/common/error.hpp"

namespace chordseed::evalkit {

using TokenSeq = std::vector<std::string>;

class OrderMismatch : public Error {
 public:
  using Error::Error;
};

struct BleuOptions {
  int max_n = 4;
  double epsilon = 1e-9;
};

/// Sentence BLEU with clipped n-gram precision, the geometric mean over the
/// orders the hypothesis is long enough to have, add-epsilon on zero matches
/// and the closest-reference brevity penalty.
double sentence_bleu(const TokenSeq& hypothesis, std::span<const TokenSeq> references,
                     const BleuOptions& options = {});

/// Mean BLEU of each member against all the others. Needs at least two members
/// (InsufficientData otherwise).
double self_bleu(std::span<const TokenSeq> set, const BleuOptions& options = {});
double self_bleu(std::span<const chordlang::Progression> set, const BleuOptions& options = {});

/// Canonical chord strings of a progression.
TokenSeq tokens_of(const chordlang::Progression& p);

/// Relative frequencies of chord unigrams or within-progression bigrams.
class NGramDistribution {
 public:
  explicit NGramDistribution(int order);
  static NGramDistribution from_sequences(std::span<const TokenSeq> sequences, int order);

  void add(const TokenSeq& sequence);
  void add_count(const std::string& gram, double count);

  int order() const { return order_; }
  double total() const { return total_; }
  /// Bigram keys join the two tokens with a single space.
  const std::map<std::string, double>& counts() const { return counts_; }
  double probability(const std::string& gram) const;

 private:
  int order_;
  std::map<std::string, double> counts_;
  double total_ = 0.0;
};

/// Base-2 Jensen-Shannon divergence, in [0, 1]. Throws OrderMismatch for
/// different orders and InsufficientData for an empty distribution.
double jsd(const NGramDistribution& a, const NGramDistribution& b);

}  // namespace chordseed::evalkit
