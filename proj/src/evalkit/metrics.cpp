#include "chordseed/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace chordseed::evalkit {

namespace {

std::map<std::string, int> ngram_counts(const TokenSeq& seq, int n) {
  std::map<std::string, int> out;
  if (static_cast<int>(seq.size()) < n) return out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
    std::string key = seq[i];
    for (int k = 1; k < n; ++k) key += '\x1f' + seq[i + static_cast<std::size_t>(k)];
    ++out[key];
  }
  return out;
}

}  // namespace

double sentence_bleu(const TokenSeq& hypothesis, std::span<const TokenSeq> references, const BleuOptions& options) {
  if (options.max_n < 1) throw std::invalid_argument("max_n must be at least 1");
  if (references.empty()) throw std::invalid_argument("BLEU needs at least one reference");
  if (hypothesis.empty()) return 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= options.max_n; ++n) {
    const auto hyp = ngram_counts(hypothesis, n);
    if (hyp.empty()) break;
    std::map<std::string, int> max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, c] : ngram_counts(ref, n)) max_ref[gram] = std::max(max_ref[gram], c);
    }
    double clipped = 0.0, total = 0.0;
    for (const auto& [gram, c] : hyp) {
      total += c;
      const auto it = max_ref.find(gram);
      if (it != max_ref.end()) clipped += std::min(c, it->second);
    }
    const double precision = clipped > 0.0 ? clipped / total : options.epsilon / total;
    log_sum += std::log(precision);
    ++orders;
  }

  const auto c = static_cast<long>(hypothesis.size());
  long r = static_cast<long>(references.front().size());
  for (const auto& ref : references) {
    const auto len = static_cast<long>(ref.size());
    if (std::labs(len - c) < std::labs(r - c) || (std::labs(len - c) == std::labs(r - c) && len < r)) r = len;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / orders);
}

double self_bleu(std::span<const TokenSeq> set, const BleuOptions& options) {
  if (set.size() < 2) throw InsufficientData("Self-BLEU needs at least two progressions");
  double sum = 0.0;
  std::vector<TokenSeq> refs;
  refs.reserve(set.size() - 1);
  for (std::size_t i = 0; i < set.size(); ++i) {
    refs.clear();
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j != i) refs.push_back(set[j]);
    }
    sum += sentence_bleu(set[i], refs, options);
  }
  return sum / static_cast<double>(set.size());
}

TokenSeq tokens_of(const chordlang::Progression& p) { return chordlang::chord_tokens(p); }

double self_bleu(std::span<const chordlang::Progression> set, const BleuOptions& options) {
  std::vector<TokenSeq> seqs;
  seqs.reserve(set.size());
  for (const auto& p : set) seqs.push_back(tokens_of(p));
  return self_bleu(seqs, options);
}

NGramDistribution::NGramDistribution(int order) : order_(order) {
  if (order != 1 && order != 2) throw std::invalid_argument("n-gram order must be 1 or 2");
}

NGramDistribution NGramDistribution::from_sequences(std::span<const TokenSeq> sequences, int order) {
  NGramDistribution d(order);
  for (const auto& s : sequences) d.add(s);
  return d;
}

void NGramDistribution::add(const TokenSeq& sequence) {
  if (order_ == 1) {
    for (const auto& t : sequence) add_count(t, 1.0);
  } else {
    for (std::size_t i = 0; i + 1 < sequence.size(); ++i) add_count(sequence[i] + " " + sequence[i + 1], 1.0);
  }
}

void NGramDistribution::add_count(const std::string& gram, double count) {
  if (!(count >= 0.0) || !std::isfinite(count)) throw std::invalid_argument("n-gram counts must be finite and >= 0");
  if (count == 0.0) return;
  counts_[gram] += count;
  total_ += count;
}

double NGramDistribution::probability(const std::string& gram) const {
  if (total_ == 0.0) return 0.0;
  const auto it = counts_.find(gram);
  return it == counts_.end() ? 0.0 : it->second / total_;
}

double jsd(const NGramDistribution& a, const NGramDistribution& b) {
  if (a.order() != b.order()) throw OrderMismatch("cannot compare unigram and bigram distributions");
  if (a.total() == 0.0 || b.total() == 0.0) throw InsufficientData("JSD of an empty distribution");
  // Walk the union support in key order; both maps are sorted.
  double kl_a = 0.0, kl_b = 0.0;
  auto ia = a.counts().begin(), ib = b.counts().begin();
  const auto ea = a.counts().end(), eb = b.counts().end();
  while (ia != ea || ib != eb) {
    double p = 0.0, q = 0.0;
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      p = ia->second / a.total();
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      q = ib->second / b.total();
      ++ib;
    } else {
      p = ia->second / a.total();
      q = ib->second / b.total();
      ++ia;
      ++ib;
    }
    const double m = 0.5 * (p + q);
    if (p > 0.0) kl_a += p * std::log2(p / m);
    if (q > 0.0) kl_b += q * std::log2(q / m);
  }
  return std::clamp(0.5 * kl_a + 0.5 * kl_b, 0.0, 1.0);
}

}  // namespace chordseed::evalkit
