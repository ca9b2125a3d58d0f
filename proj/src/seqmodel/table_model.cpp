#include "chordseed/seqmodel/table_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chordseed::seqmodel {

namespace {

class TableDecoder : public Decoder {
 public:
  explicit TableDecoder(const TableModel& model) : model_(model) {}

  Eigen::VectorXd logits() const override { return model_.logits_for(position_, previous_); }

  void feed(TokenId id) override {
    previous_ = id;
    ++position_;
  }

 private:
  const TableModel& model_;
  std::size_t position_ = 0;
  TokenId previous_ = TokenVocab::kBos;
};

}  // namespace

TableModel::TableModel(TokenVocab vocab) : vocab_(std::move(vocab)) {}

void TableModel::set(std::optional<std::size_t> position, TokenId previous,
                     const std::map<TokenId, double>& probs) {
  const auto n = static_cast<Eigen::Index>(vocab_.size());
  Eigen::VectorXd logits = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  double total = 0.0;
  for (const auto& [id, p] : probs) {
    if (id < 0 || id >= n) throw VocabMismatch("table entry outside vocabulary");
    if (id == TokenVocab::kPad || id == TokenVocab::kBos) {
      throw std::invalid_argument("PAD and BOS cannot be predicted");
    }
    if (p < 0.0) throw std::invalid_argument("negative probability");
    total += p;
    if (p > 0.0) logits(id) = std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("table probabilities must sum to 1");
  if (position) {
    positional_[{*position, previous}] = std::move(logits);
  } else {
    any_position_[previous] = std::move(logits);
  }
}

Eigen::VectorXd TableModel::logits_for(std::size_t position, TokenId previous) const {
  if (auto it = positional_.find({position, previous}); it != positional_.end()) return it->second;
  if (auto it = any_position_.find(previous); it != any_position_.end()) return it->second;
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_.size()));
}

std::unique_ptr<Decoder> TableModel::start() const { return std::make_unique<TableDecoder>(*this); }

}  // namespace chordseed::seqmodel
