#pragma once

#include <functional>
#include <span>
#include <vector>

#include "chordseed/corpus/split.hpp"
#include "chordseed/seqmodel/lstm.hpp"

namespace chordseed::seqmodel {

struct EpochStats {
  int epoch = 0;
  double train_nll = 0.0;       // per token
  double validation_nll = 0.0;  // per token
};

struct TrainReport {
  int epochs_run = 0;
  int best_epoch = 0;
  double train_nll = 0.0;
  double validation_nll = 0.0;
  double wall_seconds = 0.0;
  std::vector<EpochStats> history;
};

struct TrainResult {
  LstmModel model;
  TrainReport report;
};

/// Mean next-token NLL per predicted token (EOS included), without dropout.
double mean_nll(const LstmModel& model, std::span<const Sequence> seqs);

/// Adam on per-token averaged minibatch NLL, reshuffled each epoch from the
/// config seed. Stops after `patience` epochs without validation improvement
/// and returns the parameters of the best epoch. With an empty validation set
/// the training NLL drives early stopping.
/// Throws DivergenceError if the loss goes non-finite.
TrainResult train(const TokenVocab& vocab, const corpus::DatasetSplit& data, const ModelConfig& config,
                  Role role, const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace chordseed::seqmodel
