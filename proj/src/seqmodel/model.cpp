#include "chordseed/seqmodel/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chordseed::seqmodel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ids(const TokenVocab& vocab, std::span<const TokenId> ids) {
  if (ids.size() < 2 || ids.front() != TokenVocab::kBos || ids.back() != TokenVocab::kEos) {
    throw std::invalid_argument("sequence must start with BOS and end with EOS");
  }
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.size()) {
      throw VocabMismatch("token id " + std::to_string(id) + " outside vocabulary of size " +
                          std::to_string(vocab.size()));
    }
  }
}

}  // namespace

std::string_view role_name(Role role) { return role == Role::P ? "P" : "Q"; }

Role parse_role(std::string_view text) {
  if (text == "P") return Role::P;
  if (text == "Q") return Role::Q;
  throw std::invalid_argument("role must be P or Q");
}

Eigen::VectorXd next_token_log_probs(const Eigen::VectorXd& logits, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("temperature must be positive");
  Eigen::VectorXd z = logits / tau;
  z(TokenVocab::kPad) = kNegInf;
  z(TokenVocab::kBos) = kNegInf;
  const double max = z.maxCoeff();
  if (!std::isfinite(max)) throw DivergenceError("no finite logit in next-token distribution");
  const double lse = max + std::log((z.array() - max).exp().sum());
  return z.array() - lse;
}

double log_prob(const SequenceModel& model, std::span<const TokenId> ids, double tau) {
  check_ids(model.vocab(), ids);
  auto dec = model.start();
  double total = 0.0;
  for (std::size_t t = 1; t < ids.size(); ++t) {
    total += next_token_log_probs(dec->logits(), tau)(ids[t]);
    if (t + 1 < ids.size()) dec->feed(ids[t]);
  }
  return total;
}

double log_prob(const SequenceModel& model, const chordlang::Progression& p, double tau) {
  const Sequence ids = corpus::encode(p, model.vocab());
  return log_prob(model, ids, tau);
}

Sequence sample_ids(const SequenceModel& model, std::size_t bars, std::mt19937_64& rng,
                    const SampleOptions& options) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    auto dec = model.start();
    Sequence ids{TokenVocab::kBos};
    bool ok = true;
    for (std::size_t step = 0; step <= bars; ++step) {
      Eigen::VectorXd lp = next_token_log_probs(dec->logits(), options.tau);
      lp(TokenVocab::kUnk) = kNegInf;
      Eigen::VectorXd probs = lp.array().exp();
      const double mass = probs.sum();
      if (!(mass > 0.0)) {
        ok = false;
        break;
      }
      double u = unif(rng) * mass;
      TokenId drawn = static_cast<TokenId>(probs.size() - 1);
      for (Eigen::Index k = 0; k < probs.size(); ++k) {
        if (probs(k) <= 0.0) continue;
        u -= probs(k);
        if (u < 0.0) {
          drawn = static_cast<TokenId>(k);
          break;
        }
      }
      while (probs(drawn) <= 0.0 && drawn > 0) --drawn;  // guard against rounding past the end
      const bool is_eos = drawn == TokenVocab::kEos;
      if (step < bars && is_eos) {
        ok = false;
        break;
      }
      if (step == bars) {
        ok = is_eos;
        break;
      }
      ids.push_back(drawn);
      dec->feed(drawn);
    }
    if (ok) {
      ids.push_back(TokenVocab::kEos);
      return ids;
    }
  }
  throw SamplingExhausted("no " + std::to_string(bars) + "-bar sample after " +
                          std::to_string(options.max_attempts) + " attempts");
}

chordlang::Progression sample(const SequenceModel& model, std::size_t bars, std::mt19937_64& rng,
                              const SampleOptions& options) {
  const Sequence ids = sample_ids(model, bars, rng, options);
  chordlang::Progression p{{}, options.key, options.mode};
  for (const auto& tok : corpus::decode(ids, model.vocab())) {
    p.chords.push_back(chordlang::parse_chord(tok));
  }
  return p;
}

}  // namespace chordseed::seqmodel
