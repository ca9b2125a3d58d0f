#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/common/error.hpp"
#include "chordseed/corpus/vocab.hpp"

namespace chordseed::seqmodel {

using corpus::Sequence;
using corpus::TokenId;
using corpus::TokenVocab;

/// Which prior a model stands for: P is trained on the human corpus, Q on
/// LLM generations.
enum class Role { P, Q };

std::string_view role_name(Role role);
Role parse_role(std::string_view text);

class VocabMismatch : public Error {
 public:
  using Error::Error;
};
class DivergenceError : public Error {
 public:
  using Error::Error;
};
class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

/// Incremental next-token state. `logits()` describes the token following
/// everything fed so far; a fresh decoder has consumed BOS.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual Eigen::VectorXd logits() const = 0;
  virtual void feed(TokenId id) = 0;
};

/// Autoregressive distribution over chord-token sequences. Implementations
/// are immutable after construction and safe to score from many threads.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual const TokenVocab& vocab() const = 0;
  virtual std::unique_ptr<Decoder> start() const = 0;
};

/// log softmax(logits / tau) with PAD and BOS excluded from the support.
Eigen::VectorXd next_token_log_probs(const Eigen::VectorXd& logits, double tau = 1.0);

/// Sum over steps of the next-token log-probability. `ids` must start with
/// BOS and end with EOS; ids outside the vocabulary raise VocabMismatch.
double log_prob(const SequenceModel& model, std::span<const TokenId> ids, double tau = 1.0);
double log_prob(const SequenceModel& model, const chordlang::Progression& p, double tau = 1.0);

struct SampleOptions {
  double tau = 1.0;
  std::size_t max_attempts = 100;
  chordlang::Key key{};
  chordlang::Mode mode = chordlang::Mode::Maj;
};

/// Ancestral sampling from BOS. Reserved tokens are never emitted as chords;
/// draws whose EOS does not land right after `bars` chords are discarded and
/// retried, up to `max_attempts` (then SamplingExhausted).
Sequence sample_ids(const SequenceModel& model, std::size_t bars, std::mt19937_64& rng,
                    const SampleOptions& options = {});
chordlang::Progression sample(const SequenceModel& model, std::size_t bars, std::mt19937_64& rng,
                              const SampleOptions& options = {});

}  // namespace chordseed::seqmodel
