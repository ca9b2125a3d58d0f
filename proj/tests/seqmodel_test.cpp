#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chordseed/seqmodel/artifact.hpp"
#include "chordseed/seqmodel/lstm.hpp"
#include "chordseed/seqmodel/table_model.hpp"
#include "chordseed/seqmodel/train.hpp"

namespace cs = chordseed;
using namespace chordseed::seqmodel;
using chordseed::corpus::DatasetSplit;

namespace {

ModelConfig tiny_config(std::uint64_t seed = 7) {
  ModelConfig c;
  c.layers = 2;
  c.embed_dim = 3;
  c.hidden_dim = 4;
  c.dropout = 0.0;
  c.learning_rate = 0.01;
  c.max_epochs = 40;
  c.batch_size = 10;
  c.patience = 5;
  c.seed = seed;
  return c;
}

TokenVocab vocab_of(std::vector<std::string> tokens) { return TokenVocab(std::move(tokens)); }

Sequence random_sequence(std::mt19937_64& rng, const TokenVocab& vocab, std::size_t len) {
  std::uniform_int_distribution<TokenId> tok(static_cast<TokenId>(TokenVocab::kReserved),
                                             static_cast<TokenId>(vocab.size() - 1));
  Sequence s{TokenVocab::kBos};
  for (std::size_t i = 0; i < len; ++i) s.push_back(tok(rng));
  s.push_back(TokenVocab::kEos);
  return s;
}

double entropy(const Eigen::VectorXd& lp) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < lp.size(); ++k) {
    if (std::isfinite(lp(k))) h -= std::exp(lp(k)) * lp(k);
  }
  return h;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chordseed_seqmodel_" + name);
}

}  // namespace

TEST(ModelConfig, ReferenceSettings) {
  const auto p = ModelConfig::prior_reference();
  EXPECT_EQ(p.layers, 2);
  EXPECT_EQ(p.embed_dim, 512);
  EXPECT_EQ(p.hidden_dim, 512);
  EXPECT_DOUBLE_EQ(p.learning_rate, 1e-5);
  EXPECT_DOUBLE_EQ(p.dropout, 0.2);
  const auto q = ModelConfig::proposal_reference();
  EXPECT_EQ(q.embed_dim, 256);
  EXPECT_EQ(q.hidden_dim, 256);
  EXPECT_DOUBLE_EQ(q.learning_rate, p.learning_rate);
  EXPECT_DOUBLE_EQ(q.dropout, p.dropout);
}

TEST(ModelConfig, ValidationAndJson) {
  auto c = tiny_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.hidden_dim = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(LstmModel(vocab_of({"C"}), c, Role::P), std::invalid_argument);
  const auto partial = ModelConfig::from_json(nlohmann::json{{"hidden_dim", 32}});
  EXPECT_EQ(partial.hidden_dim, 32);
  EXPECT_EQ(partial.embed_dim, ModelConfig{}.embed_dim);
}

TEST(Lstm, StepDistributionsNormalize) {
  const auto vocab = vocab_of({"C", "F", "G", "Am", "Dm", "Em"});
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = tiny_config(seed);
    cfg.embed_dim = 5;
    cfg.hidden_dim = 6;
    LstmModel model(vocab, cfg, Role::P);
    // Spread the weights well past the init range.
    std::normal_distribution<double> n(0.0, 2.0);
    for (Eigen::Index k = 0; k < model.parameter_count(); ++k) model.mutable_parameters()(k) = n(rng);
    const Sequence s = random_sequence(rng, vocab, 8);
    auto dec = model.start();
    for (std::size_t t = 1; t < s.size(); ++t) {
      for (double tau : {0.3, 1.0, 1.7, 10.0}) {
        const Eigen::VectorXd lp = next_token_log_probs(dec->logits(), tau);
        EXPECT_NEAR(lp.array().exp().sum(), 1.0, 1e-6);
        EXPECT_EQ(std::exp(lp(TokenVocab::kPad)), 0.0);
        EXPECT_EQ(std::exp(lp(TokenVocab::kBos)), 0.0);
      }
      dec->feed(s[t]);
    }
  }
}

TEST(Lstm, LogProbMatchesTrainingLoss) {
  const auto vocab = vocab_of({"C", "F", "G"});
  LstmModel model(vocab, tiny_config(), Role::P);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Sequence s = random_sequence(rng, vocab, 4);
    const std::vector<Sequence> batch{s};
    EXPECT_NEAR(-log_prob(model, s), model.loss_and_gradient(batch, nullptr), 1e-10);
  }
}

// Central differences over every parameter against the BPTT gradient.
void check_gradient(const LstmModel& base, const std::vector<Sequence>& batch, bool with_dropout) {
  LstmModel model = base;
  const std::uint64_t mask_seed = 99;
  auto loss_at = [&](const LstmModel& m, Eigen::VectorXd* grad) {
    std::mt19937_64 rng(mask_seed);
    return m.loss_and_gradient(batch, grad, with_dropout ? &rng : nullptr);
  };
  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(model.parameter_count());
  loss_at(model, &analytic);
  const double h = 1e-4;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < model.parameter_count(); ++k) {
    const double saved = model.parameters()(k);
    model.mutable_parameters()(k) = saved + h;
    const double up = loss_at(model, nullptr);
    model.mutable_parameters()(k) = saved - h;
    const double down = loss_at(model, nullptr);
    model.mutable_parameters()(k) = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max(std::abs(numeric) + std::abs(analytic(k)), 1e-5);
    worst = std::max(worst, std::abs(numeric - analytic(k)) / denom);
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
  const auto vocab = vocab_of({"C", "F", "G"});
  std::mt19937_64 rng(5);
  auto cfg = tiny_config(21);
  LstmModel model(vocab, cfg, Role::P);
  std::normal_distribution<double> n(0.0, 0.5);
  for (Eigen::Index k = 0; k < model.parameter_count(); ++k) model.mutable_parameters()(k) = n(rng);
  std::vector<Sequence> batch;
  for (int i = 0; i < 3; ++i) batch.push_back(random_sequence(rng, vocab, 4));
  check_gradient(model, batch, false);
}

TEST(Lstm, GradientMatchesFiniteDifferencesWithDropout) {
  const auto vocab = vocab_of({"C", "G"});
  std::mt19937_64 rng(6);
  auto cfg = tiny_config(22);
  cfg.layers = 3;
  cfg.dropout = 0.3;
  LstmModel model(vocab, cfg, Role::Q);
  std::vector<Sequence> batch{random_sequence(rng, vocab, 4), random_sequence(rng, vocab, 3)};
  check_gradient(model, batch, true);
}

TEST(Lstm, HigherTemperatureNeverLowersEntropy) {
  const auto vocab = vocab_of({"C", "F", "G", "Am"});
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    LstmModel model(vocab, tiny_config(seed), Role::P);
    std::normal_distribution<double> n(0.0, 1.5);
    for (Eigen::Index k = 0; k < model.parameter_count(); ++k) model.mutable_parameters()(k) = n(rng);
    const Sequence s = random_sequence(rng, vocab, 5);
    auto dec = model.start();
    for (std::size_t t = 1; t < s.size(); ++t) {
      const Eigen::VectorXd logits = dec->logits();
      double previous = -1.0;
      for (double tau : {0.25, 0.5, 1.0, 1.7, 3.0, 10.0}) {
        const double h = entropy(next_token_log_probs(logits, tau));
        EXPECT_GE(h, previous - 1e-12);
        previous = h;
      }
      dec->feed(s[t]);
    }
  }
}

TEST(Lstm, ZeroInitGivesUniformLogProb) {
  const auto vocab = vocab_of({"C", "F", "G", "Am", "Dm"});
  LstmModel model(vocab, tiny_config(), Role::P, Init::Zero);
  std::mt19937_64 rng(1);
  // PAD and BOS are never predicted, so EOS, UNK and the chord tokens share the mass.
  const double live = static_cast<double>(vocab.size() - 2);
  for (std::size_t len : {1u, 4u, 8u}) {
    const Sequence s = random_sequence(rng, vocab, len);
    EXPECT_NEAR(log_prob(model, s), static_cast<double>(len + 1) * std::log(1.0 / live), 1e-12);
    EXPECT_NEAR(log_prob(model, s, 1.7), static_cast<double>(len + 1) * std::log(1.0 / live), 1e-12);
  }
}

TEST(Lstm, LargeTemperatureFlattensSequenceScores) {
  const auto vocab = vocab_of({"C", "F", "G"});
  LstmModel model(vocab, tiny_config(4), Role::P);
  std::normal_distribution<double> n(0.0, 2.0);
  std::mt19937_64 rng(4);
  for (Eigen::Index k = 0; k < model.parameter_count(); ++k) model.mutable_parameters()(k) = n(rng);
  const Sequence a = random_sequence(rng, vocab, 4);
  const Sequence b = random_sequence(rng, vocab, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (double tau : {1.0, 10.0, 100.0, 1e4}) {
    const double gap = std::abs(log_prob(model, a, tau) - log_prob(model, b, tau));
    EXPECT_LE(gap, previous + 1e-12);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Lstm, LogProbPreconditions) {
  const auto vocab = vocab_of({"C", "F"});
  LstmModel model(vocab, tiny_config(), Role::P);
  const Sequence good{TokenVocab::kBos, 4, 5, TokenVocab::kEos};
  EXPECT_LT(log_prob(model, good), 0.0);
  EXPECT_THROW(log_prob(model, Sequence{4, 5, TokenVocab::kEos}), std::invalid_argument);
  EXPECT_THROW(log_prob(model, Sequence{TokenVocab::kBos, 4, 5}), std::invalid_argument);
  EXPECT_THROW(log_prob(model, Sequence{TokenVocab::kBos, 4, 9, TokenVocab::kEos}), VocabMismatch);
  EXPECT_THROW(log_prob(model, good, 0.0), std::invalid_argument);
}

TEST(Lstm, NonFiniteParametersRaiseDivergence) {
  const auto vocab = vocab_of({"C", "F"});
  LstmModel model(vocab, tiny_config(), Role::P);
  model.mutable_parameters().setConstant(std::numeric_limits<double>::quiet_NaN());
  const std::vector<Sequence> seqs{{TokenVocab::kBos, 4, TokenVocab::kEos}};
  EXPECT_THROW(mean_nll(model, seqs), DivergenceError);
}

TEST(TableModel, ChainRuleMatchesHandComputation) {
  const auto vocab = vocab_of({"C", "G"});
  const TokenId c = vocab.id_of("C");
  const TokenId g = vocab.id_of("G");
  TableModel model(vocab);
  model.set(std::nullopt, TokenVocab::kBos, {{c, 0.7}, {g, 0.3}});
  model.set(std::nullopt, c, {{c, 0.1}, {g, 0.6}, {TokenVocab::kEos, 0.3}});
  model.set(std::nullopt, g, {{c, 0.5}, {g, 0.25}, {TokenVocab::kEos, 0.25}});

  EXPECT_NEAR(log_prob(model, Sequence{TokenVocab::kBos, c, g, TokenVocab::kEos}),
              std::log(0.7 * 0.6 * 0.25), 1e-12);
  EXPECT_NEAR(log_prob(model, Sequence{TokenVocab::kBos, g, c, c, TokenVocab::kEos}),
              std::log(0.3 * 0.5 * 0.1 * 0.3), 1e-12);
  // At temperature tau the step distribution is p^(1/tau) renormalized.
  const double tau = 1.7;
  auto smoothed = [&](std::vector<double> row, std::size_t pick) {
    double z = 0.0;
    for (double p : row) z += std::pow(p, 1.0 / tau);
    return std::pow(row[pick], 1.0 / tau) / z;
  };
  const double expected = smoothed({0.7, 0.3}, 0) * smoothed({0.1, 0.6, 0.3}, 1) * smoothed({0.5, 0.25, 0.25}, 2);
  EXPECT_NEAR(log_prob(model, Sequence{TokenVocab::kBos, c, g, TokenVocab::kEos}, tau), std::log(expected),
              1e-12);
  EXPECT_TRUE(std::isinf(log_prob(model, Sequence{TokenVocab::kBos, TokenVocab::kEos})));
}

TEST(TableModel, RejectsInvalidRows) {
  const auto vocab = vocab_of({"C"});
  TableModel model(vocab);
  EXPECT_THROW(model.set(std::nullopt, TokenVocab::kBos, {{4, 0.5}}), std::invalid_argument);
  EXPECT_THROW(model.set(std::nullopt, TokenVocab::kBos, {{TokenVocab::kPad, 0.5}, {4, 0.5}}),
               std::invalid_argument);
  EXPECT_THROW(model.set(std::nullopt, TokenVocab::kBos, {{7, 1.0}}), VocabMismatch);
}

TEST(Sampling, BigramFrequenciesMatchTable) {
  const auto vocab = vocab_of({"C", "F", "G"});
  const TokenId c = vocab.id_of("C"), f = vocab.id_of("F"), g = vocab.id_of("G");
  const std::size_t bars = 4;
  std::map<TokenId, std::map<TokenId, double>> rows = {
      {c, {{c, 0.1}, {f, 0.5}, {g, 0.4}}},
      {f, {{c, 0.3}, {f, 0.2}, {g, 0.5}}},
      {g, {{c, 0.7}, {f, 0.1}, {g, 0.2}}},
  };
  TableModel model(vocab);
  model.set(std::nullopt, TokenVocab::kBos, {{c, 0.5}, {f, 0.25}, {g, 0.25}});
  for (const auto& [prev, row] : rows) {
    model.set(std::nullopt, prev, row);
    model.set(bars, prev, {{TokenVocab::kEos, 1.0}});
  }

  std::mt19937_64 rng(2024);
  std::map<TokenId, std::map<TokenId, double>> counts;
  std::map<TokenId, double> totals;
  for (int i = 0; i < 10000; ++i) {
    const Sequence s = sample_ids(model, bars, rng);
    ASSERT_EQ(s.size(), bars + 2);
    for (std::size_t t = 1; t + 2 < s.size(); ++t) {
      counts[s[t]][s[t + 1]] += 1.0;
      totals[s[t]] += 1.0;
    }
  }
  for (const auto& [prev, row] : rows) {
    double l1 = 0.0;
    for (const auto& [next, p] : row) l1 += std::abs(counts[prev][next] / totals[prev] - p);
    EXPECT_LT(l1, 0.05) << vocab.token_of(prev);
  }
}

TEST(Sampling, DeterministicModelAlwaysSameProgression) {
  const auto vocab = vocab_of({"C", "Am", "F", "G"});
  TableModel model(vocab);
  model.set(0, TokenVocab::kBos, {{vocab.id_of("C"), 1.0}});
  model.set(1, vocab.id_of("C"), {{vocab.id_of("Am"), 1.0}});
  model.set(2, vocab.id_of("Am"), {{vocab.id_of("F"), 1.0}});
  model.set(3, vocab.id_of("F"), {{vocab.id_of("G"), 1.0}});
  model.set(4, vocab.id_of("G"), {{TokenVocab::kEos, 1.0}});
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(cs::chordlang::render_progression(sample(model, 4, rng)), "C Am F G");
  }
}

TEST(Sampling, NeverEmitsReservedTokensAsChords) {
  const auto vocab = vocab_of({"C", "F", "G"});
  LstmModel model(vocab, tiny_config(), Role::P, Init::Zero);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const Sequence s = sample_ids(model, 3, rng, SampleOptions{.max_attempts = 10000});
    ASSERT_EQ(s.size(), 5u);
    for (std::size_t t = 1; t + 1 < s.size(); ++t) EXPECT_TRUE(vocab.is_chord(s[t]));
  }
}

TEST(Sampling, ExhaustsWhenLengthUnreachable) {
  const auto vocab = vocab_of({"C"});
  TableModel model(vocab);
  model.set(std::nullopt, TokenVocab::kBos, {{TokenVocab::kEos, 1.0}});
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_ids(model, 2, rng), SamplingExhausted);
}

TEST(Training, RepeatedProgressionBeatsEveryAlternative) {
  const auto vocab = vocab_of({"C", "Am", "F", "G"});
  const Sequence target = cs::corpus::encode(std::vector<std::string>{"C", "Am", "F", "G"}, vocab);
  DatasetSplit data;
  data.train.assign(100, target);
  auto cfg = tiny_config(3);
  cfg.embed_dim = 8;
  cfg.hidden_dim = 16;
  cfg.max_epochs = 30;
  const auto result = train(vocab, data, cfg, Role::P);
  const double best = log_prob(result.model, target);
  const std::vector<TokenId> chords{vocab.id_of("C"), vocab.id_of("Am"), vocab.id_of("F"), vocab.id_of("G")};
  int alternatives = 0;
  for (int code = 0; code < 256; ++code) {
    Sequence s{TokenVocab::kBos};
    for (int k = 0, rest = code; k < 4; ++k, rest /= 4) s.push_back(chords[static_cast<std::size_t>(rest % 4)]);
    s.push_back(TokenVocab::kEos);
    if (s == target) continue;
    ++alternatives;
    EXPECT_GT(best, log_prob(result.model, s));
  }
  EXPECT_EQ(alternatives, 255);
}

TEST(Training, EmptyDatasetIsRejected) {
  EXPECT_THROW(train(vocab_of({"C"}), DatasetSplit{}, tiny_config(), Role::P), std::invalid_argument);
}

// A corpus drawn from a fixed bigram table has structure a trained model can learn.
std::vector<Sequence> structured_corpus(const TokenVocab& vocab, std::size_t n, std::uint64_t seed) {
  TableModel table(vocab);
  const TokenId c = vocab.id_of("C"), f = vocab.id_of("F"), g = vocab.id_of("G"), a = vocab.id_of("Am");
  table.set(std::nullopt, TokenVocab::kBos, {{c, 0.8}, {a, 0.2}});
  table.set(std::nullopt, c, {{f, 0.6}, {g, 0.3}, {a, 0.1}});
  table.set(std::nullopt, f, {{g, 0.8}, {c, 0.2}});
  table.set(std::nullopt, g, {{c, 0.7}, {a, 0.3}});
  table.set(std::nullopt, a, {{f, 0.9}, {g, 0.1}});
  for (TokenId prev : {c, f, g, a}) table.set(4, prev, {{TokenVocab::kEos, 1.0}});
  std::mt19937_64 rng(seed);
  std::vector<Sequence> out;
  for (std::size_t i = 0; i < n; ++i) {
    Sequence s = sample_ids(table, 4, rng);
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Training, HeldOutNllBeatsUntrainedModel) {
  const auto vocab = vocab_of({"C", "F", "G", "Am"});
  auto data = cs::corpus::make_split(structured_corpus(vocab, 300, 5), 0.2, 9);
  auto cfg = tiny_config(17);
  cfg.embed_dim = 8;
  cfg.hidden_dim = 16;
  cfg.dropout = 0.1;
  cfg.max_epochs = 25;
  const auto result = train(vocab, data, cfg, Role::P);
  const LstmModel untrained(vocab, cfg, Role::P);
  const double before = mean_nll(untrained, data.validation);
  EXPECT_LT(result.report.validation_nll, before);
  EXPECT_DOUBLE_EQ(result.report.validation_nll, mean_nll(result.model, data.validation));
  EXPECT_TRUE(std::isfinite(result.report.validation_nll));
  EXPECT_GE(result.report.epochs_run, result.report.best_epoch);
  EXPECT_EQ(result.report.history.size(), static_cast<std::size_t>(result.report.epochs_run));
}

TEST(Training, SameSeedSameResult) {
  const auto vocab = vocab_of({"C", "F", "G", "Am"});
  auto data = cs::corpus::make_split(structured_corpus(vocab, 80, 2), 0.25, 4);
  auto cfg = tiny_config(5);
  cfg.dropout = 0.2;
  cfg.max_epochs = 5;
  const auto a = train(vocab, data, cfg, Role::Q);
  const auto b = train(vocab, data, cfg, Role::Q);
  EXPECT_EQ(a.report.validation_nll, b.report.validation_nll);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
}

TEST(Training, StopsEarlyWithoutImprovement) {
  const auto vocab = vocab_of({"C", "F", "G", "Am"});
  auto data = cs::corpus::make_split(structured_corpus(vocab, 60, 3), 0.3, 1);
  auto cfg = tiny_config(6);
  cfg.learning_rate = 0.5;  // overshoots quickly, so validation stalls
  cfg.max_epochs = 200;
  cfg.patience = 2;
  const auto result = train(vocab, data, cfg, Role::P);
  EXPECT_LT(result.report.epochs_run, 200);
  EXPECT_EQ(result.report.epochs_run, result.report.best_epoch + cfg.patience);
}

TEST(Artifact, RoundTripIsBitExact) {
  const auto vocab = vocab_of({"C", "F", "G", "Am", "Dm"});
  auto cfg = tiny_config(31);
  cfg.embed_dim = 6;
  cfg.hidden_dim = 7;
  LstmModel model(vocab, cfg, Role::Q);
  const auto path = temp_path("roundtrip.model");
  save_model(model, path);
  const LstmModel loaded = load_model(path, vocab);
  EXPECT_EQ(loaded.role(), Role::Q);
  EXPECT_EQ(loaded.config(), cfg);
  EXPECT_EQ(loaded.vocab(), vocab);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  for (int i = 0; i < 100; ++i) {
    const Sequence s = random_sequence(rng, vocab, len(rng));
    EXPECT_EQ(log_prob(model, s, 1.7), log_prob(loaded, s, 1.7));
  }
  std::filesystem::remove(path);
}

TEST(Artifact, TamperedPayloadFailsChecksum) {
  const auto vocab = vocab_of({"C", "F"});
  LstmModel model(vocab, tiny_config(), Role::P);
  const auto path = temp_path("tamper.model");
  save_model(model, path);
  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(-3, std::ios::end);
    io.put('\x5a');
  }
  EXPECT_THROW(load_model(path), ChecksumError);

  save_model(model, path);
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto pos = text.find("\"checksum\":\"") + 12;
  text[pos] = text[pos] == '0' ? '1' : '0';
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
  }
  EXPECT_THROW(load_model(path), ChecksumError);
  std::filesystem::remove(path);
}

TEST(Artifact, VocabVersionMismatch) {
  const auto v1 = vocab_of({"C", "F"});
  const auto v2 = vocab_of({"C", "F", "G"});
  LstmModel model(v1, tiny_config(), Role::P);
  const auto path = temp_path("version.model");
  save_model(model, path);
  EXPECT_NO_THROW(load_model(path, v1));
  EXPECT_THROW(load_model(path, v2), VersionMismatch);
  std::filesystem::remove(path);
}
