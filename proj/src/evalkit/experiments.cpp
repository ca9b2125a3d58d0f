#include "chordseed/evalkit/experiments.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "chordseed/llmgate/candidates.hpp"
#include "chordseed/llmgate/prompts.hpp"
#include "chordseed/sampler/suggest.hpp"

namespace chordseed::evalkit {

namespace cl = chordseed::chordlang;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> draw_keywords(const std::vector<std::string>& pool, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::string> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), std::min(k, pool.size()), rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace

std::vector<std::string> keyword_pool(std::string_view keyword_list) {
  std::vector<std::string> out;
  std::istringstream in{std::string(keyword_list)};
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    std::string_view rest(line);
    if (colon != std::string::npos) rest.remove_prefix(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      if (comma == std::string_view::npos) comma = rest.size();
      auto word = trim(rest.substr(start, comma - start));
      if (!word.empty() && std::find(out.begin(), out.end(), word) == out.end()) out.push_back(std::move(word));
      start = comma + 1;
    }
  }
  return out;
}

ExperimentReport self_bleu_report(const std::map<std::string, std::vector<std::vector<TokenSeq>>>& sets,
                                  const BleuOptions& options) {
  ExperimentReport report;
  report.experiment = "diversity";
  report.metric_columns = {"Self-BLEU"};
  report.config = {{"max_n", options.max_n}, {"epsilon", options.epsilon}};
  for (const auto& [condition, group] : sets) {
    if (group.empty()) throw InsufficientData("no sets for condition " + condition);
    ReportRow row;
    row.condition = condition;
    auto& values = row.values["Self-BLEU"];
    for (const auto& set : group) values.push_back(self_bleu(set, options));
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_diversity_experiment(llmgate::LLMProvider& provider, const DiversityOptions& options) {
  if (options.pairs == 0) throw InsufficientData("diversity experiment needs at least one pair of sets");
  if (options.set_size < 2) throw InsufficientData("Self-BLEU sets need at least two progressions");
  const auto pool = options.keywords.empty() ? keyword_pool(llmgate::default_keyword_list()) : options.keywords;
  if (pool.empty()) throw InsufficientData("keyword pool is empty");

  std::mt19937_64 rng(options.seed);
  std::map<std::string, std::vector<std::vector<TokenSeq>>> sets;
  auto& batch_sets = sets[std::string(kBatchCondition)];
  auto& single_sets = sets[std::string(kSingleCondition)];

  llmgate::CandidateRequest req;
  req.key = cl::Key{};
  req.mode = cl::Mode::Maj;
  req.bars = options.bars;
  req.model = options.model;
  for (std::size_t pair = 0; pair < options.pairs; ++pair) {
    req.n = options.set_size;
    req.keywords = draw_keywords(pool, options.keywords_per_generation, rng);
    const auto batch = llmgate::generate_candidates_batch(req, provider);
    std::vector<TokenSeq> bset;
    for (const auto& p : batch.progressions) bset.push_back(tokens_of(p));
    if (bset.size() < 2) throw InsufficientData("batch prompt returned fewer than two progressions");
    batch_sets.push_back(std::move(bset));

    req.n = 1;
    std::vector<TokenSeq> sset;
    for (std::size_t i = 0; i < options.set_size; ++i) {
      req.keywords = draw_keywords(pool, options.keywords_per_generation, rng);
      sset.push_back(tokens_of(llmgate::generate_candidate_single(req, provider)));
    }
    single_sets.push_back(std::move(sset));
  }

  auto report = self_bleu_report(sets, options.bleu);
  // Keep the batch row first, as in the published table.
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.condition == kBatchCondition && b.condition != kBatchCondition; });
  report.config["pairs"] = options.pairs;
  report.config["set_size"] = options.set_size;
  report.config["bars"] = options.bars;
  report.config["keywords_per_generation"] = options.keywords_per_generation;
  report.config["key"] = "C";
  report.config["mode"] = "Maj";
  if (!options.model.empty()) report.config["model"] = options.model;
  report.seeds = {options.seed};
  return report;
}

ExperimentReport run_coherence_experiment(std::span<const corpus::CorpusRecord> corpus,
                                          std::span<const Condition> conditions, const CoherenceOptions& options) {
  if (corpus.empty()) throw InsufficientData("reference corpus is empty");
  std::vector<TokenSeq> reference;
  reference.reserve(corpus.size());
  for (const auto& r : corpus) reference.push_back(corpus::transpose_to_c(r).chords);
  const auto ref1 = NGramDistribution::from_sequences(reference, 1);
  const auto ref2 = NGramDistribution::from_sequences(reference, 2);

  ExperimentReport report;
  report.experiment = "coherence";
  report.attribute_columns = {"Keyword Conditional"};
  report.metric_columns = {"Unigram JSD", "Bigram JSD"};
  report.config = {{"min_per_condition", options.min_per_condition}, {"corpus_size", corpus.size()}};
  for (const auto& c : conditions) {
    if (c.progressions.size() < options.min_per_condition) {
      throw InsufficientData("condition " + c.label + " has " + std::to_string(c.progressions.size()) +
                             " progressions, needs " + std::to_string(options.min_per_condition));
    }
    ReportRow row;
    row.condition = c.label;
    row.attributes["Keyword Conditional"] = c.keyword_conditional ? "yes" : "no";
    row.values["Unigram JSD"] = {jsd(NGramDistribution::from_sequences(c.progressions, 1), ref1)};
    row.values["Bigram JSD"] = {jsd(NGramDistribution::from_sequences(c.progressions, 2), ref2)};
    report.config["condition_sizes"][c.label] = c.progressions.size();
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<TokenSeq> prior_samples(const seqmodel::SequenceModel& model, std::size_t count, std::size_t bars,
                                    std::mt19937_64& rng) {
  std::vector<TokenSeq> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(tokens_of(seqmodel::sample(model, bars, rng)));
  return out;
}

std::vector<TokenSeq> uniform_samples(const corpus::TokenVocab& vocab, std::size_t count, std::size_t bars,
                                      std::mt19937_64& rng) {
  const auto tokens = vocab.chord_tokens();
  if (tokens.empty()) throw InsufficientData("vocabulary has no chord tokens");
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  std::vector<TokenSeq> out(count);
  for (auto& seq : out) {
    for (std::size_t b = 0; b < bars; ++b) seq.push_back(tokens[pick(rng)]);
  }
  return out;
}

std::vector<TokenSeq> rejection_samples(std::span<const chordlang::Progression> pool,
                                        const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                                        const sampler::SamplerConfig& cfg, std::mt19937_64& rng) {
  sampler::SamplerConfig run = cfg;
  run.fallback = false;
  run.target_count = run.n;
  std::vector<TokenSeq> out;
  for (std::size_t start = 0; start < pool.size(); start += run.n) {
    const std::size_t stop = std::min(pool.size(), start + run.n);
    std::vector<sampler::ScoredCandidate> scored;
    for (std::size_t i = start; i < stop; ++i) scored.push_back(sampler::score_in_c(pool[i], p, q, run));
    const auto set = sampler::run_rejection(scored, run, rng);
    for (const auto& s : set.suggestions) out.push_back(tokens_of(cl::transpose_progression(s, cl::Key{})));
  }
  return out;
}

}  // namespace chordseed::evalkit
