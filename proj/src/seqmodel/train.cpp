#include "chordseed/seqmodel/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chordseed::seqmodel {

namespace {

std::size_t predicted_tokens(std::span<const Sequence> seqs) {
  std::size_t n = 0;
  for (const auto& s : seqs) n += s.size() - 1;
  return n;
}

struct Adam {
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  Adam(Eigen::Index n, double learning_rate)
      : lr(learning_rate), m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++step;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace

double mean_nll(const LstmModel& model, std::span<const Sequence> seqs) {
  const std::size_t n = predicted_tokens(seqs);
  if (n == 0) throw std::invalid_argument("no tokens to score");
  return model.loss_and_gradient(seqs, nullptr) / static_cast<double>(n);
}

TrainResult train(const TokenVocab& vocab, const corpus::DatasetSplit& data, const ModelConfig& config,
                  Role role, const std::function<void(const EpochStats&)>& on_epoch) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("training set is empty");
  const auto started = std::chrono::steady_clock::now();

  LstmModel model(vocab, config, role);
  Adam adam(model.parameter_count(), config.learning_rate);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  Eigen::VectorXd best = model.parameters();
  double best_score = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<Sequence> batch;
      batch.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) batch.push_back(data.train[order[k]]);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.parameter_count());
      const double loss = model.loss_and_gradient(batch, &grad, &rng);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw DivergenceError("training loss diverged in epoch " + std::to_string(epoch));
      }
      grad /= static_cast<double>(predicted_tokens(batch));
      adam.apply(model.mutable_parameters(), grad);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_nll = mean_nll(model, data.train);
    stats.validation_nll = data.validation.empty() ? stats.train_nll : mean_nll(model, data.validation);
    if (!std::isfinite(stats.train_nll) || !std::isfinite(stats.validation_nll)) {
      throw DivergenceError("non-finite NLL after epoch " + std::to_string(epoch));
    }
    report.history.push_back(stats);
    report.epochs_run = epoch;
    if (on_epoch) on_epoch(stats);

    if (stats.validation_nll < best_score) {
      best_score = stats.validation_nll;
      best = model.parameters();
      report.best_epoch = epoch;
      report.train_nll = stats.train_nll;
      report.validation_nll = stats.validation_nll;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  model.mutable_parameters() = best;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{std::move(model), std::move(report)};
}

}  // namespace chordseed::seqmodel
