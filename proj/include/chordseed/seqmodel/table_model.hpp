#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>

#include "chordseed/seqmodel/model.hpp"

namespace chordseed::seqmodel {

/// Exact next-token lookup table keyed on (position, previous token).
/// Position 0 predicts the first chord (previous token is BOS). Entries set
/// without a position apply at every position not given its own entry;
/// unknown contexts are uniform over the live tokens.
class TableModel : public SequenceModel {
 public:
  explicit TableModel(TokenVocab vocab);

  /// `probs` must sum to 1; ids left out get zero probability.
  void set(std::optional<std::size_t> position, TokenId previous,
           const std::map<TokenId, double>& probs);

  const TokenVocab& vocab() const override { return vocab_; }
  std::unique_ptr<Decoder> start() const override;

  Eigen::VectorXd logits_for(std::size_t position, TokenId previous) const;

 private:
  TokenVocab vocab_;
  std::map<std::pair<std::size_t, TokenId>, Eigen::VectorXd> positional_;
  std::map<TokenId, Eigen::VectorXd> any_position_;
};

}  // namespace chordseed::seqmodel
