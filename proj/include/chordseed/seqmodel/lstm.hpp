#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/seqmodel/model.hpp"

namespace chordseed::seqmodel {

struct ModelConfig {
  int layers = 2;
  int embed_dim = 512;
  int hidden_dim = 512;
  double dropout = 0.2;
  double learning_rate = 1e-5;
  int max_epochs = 200;
  int batch_size = 64;
  int patience = 5;
  std::uint64_t seed = 0;

  /// Reference settings for the human-corpus prior P.
  static ModelConfig prior_reference();
  /// Reference settings for the LLM proposal model Q (256-wide).
  static ModelConfig proposal_reference();
  /// Small model that trains in seconds on the desk corpora.
  static ModelConfig desk();

  /// Throws std::invalid_argument on non-positive sizes or dropout outside [0, 1).
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing fields keep their defaults.
  static ModelConfig from_json(const nlohmann::json& j);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class Init { Uniform, Zero };

/// Token embedding, stacked LSTM layers and a softmax output projection, with
/// all parameters in one flat vector:
///   embedding (E x V), per layer W (4H x (in + H)) and b (4H), output W (V x H) and b (V).
/// Gate order inside W and b is input, forget, cell, output.
class LstmModel : public SequenceModel {
 public:
  LstmModel(TokenVocab vocab, ModelConfig config, Role role, Init init = Init::Uniform);

  const TokenVocab& vocab() const override { return vocab_; }
  std::unique_ptr<Decoder> start() const override;

  const ModelConfig& config() const { return config_; }
  Role role() const { return role_; }

  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& mutable_parameters() { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  /// Summed next-token NLL of `batch` at temperature 1. When `grad` is given
  /// it is resized if needed and the gradient of that sum is added to it.
  /// Dropout is active only when `dropout_rng` is given.
  double loss_and_gradient(std::span<const Sequence> batch, Eigen::VectorXd* grad,
                           std::mt19937_64* dropout_rng = nullptr) const;

  struct Layout {
    Eigen::Index embedding = 0;
    std::vector<Eigen::Index> weights;
    std::vector<Eigen::Index> biases;
    Eigen::Index out_weights = 0;
    Eigen::Index out_bias = 0;
    Eigen::Index total = 0;
  };
  const Layout& layout() const { return layout_; }

 private:
  friend class LstmDecoder;

  int input_dim(int layer) const { return layer == 0 ? config_.embed_dim : config_.hidden_dim; }
  double sequence_loss(const Sequence& ids, Eigen::VectorXd* grad, std::mt19937_64* dropout_rng) const;

  TokenVocab vocab_;
  ModelConfig config_;
  Role role_;
  Layout layout_;
  Eigen::VectorXd params_;
};

}  // namespace chordseed::seqmodel
