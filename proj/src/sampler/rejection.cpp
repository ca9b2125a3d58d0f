#include "chordseed/sampler/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chordseed/corpus/corpus.hpp"

namespace chordseed::sampler {

void SamplerConfig::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("M must be positive and finite");
  if (!(p_temperature() > 0.0) || !(q_temperature() > 0.0)) {
    throw std::invalid_argument("temperatures must be positive");
  }
  if (target_count == 0) throw std::invalid_argument("target_count must be at least 1");
  if (n < target_count) throw std::invalid_argument("N must be at least target_count");
}

nlohmann::json SamplerConfig::to_json() const {
  nlohmann::json j = {{"M", m},
                      {"N", n},
                      {"tau", tau},
                      {"target_count", target_count},
                      {"fallback", fallback},
                      {"order", order == SelectionOrder::Ratio ? "ratio" : "acceptance"}};
  if (tau_p) j["tau_p"] = *tau_p;
  if (tau_q) j["tau_q"] = *tau_q;
  return j;
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  c.m = j.value("M", c.m);
  c.n = j.value("N", c.n);
  c.tau = j.value("tau", c.tau);
  if (j.contains("tau_p")) c.tau_p = j.at("tau_p").get<double>();
  if (j.contains("tau_q")) c.tau_q = j.at("tau_q").get<double>();
  c.target_count = j.value("target_count", c.target_count);
  c.fallback = j.value("fallback", c.fallback);
  const std::string order = j.value("order", std::string("ratio"));
  if (order == "ratio") {
    c.order = SelectionOrder::Ratio;
  } else if (order == "acceptance") {
    c.order = SelectionOrder::Acceptance;
  } else {
    throw std::invalid_argument("order must be \"ratio\" or \"acceptance\"");
  }
  c.validate();
  return c;
}

SamplerConfig SamplerConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw corpus::IoError("cannot open sampler config " + path.string());
  return from_json(nlohmann::json::parse(in));
}

std::string_view provenance_name(Provenance p) { return p == Provenance::Accepted ? "accepted" : "topk_fill"; }

nlohmann::json AcceptanceRecord::to_json() const {
  nlohmann::json j = {{"candidate", chordlang::render_progression(candidate)},
                      {"log_p", log_p},
                      {"log_q", log_q},
                      {"ratio", ratio},
                      {"u", u},
                      {"accepted", accepted},
                      {"duplicate", duplicate}};
  j["selected"] = selected ? nlohmann::json(std::string(provenance_name(*selected))) : nlohmann::json(nullptr);
  return j;
}

std::size_t SuggestionSet::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(audit.begin(), audit.end(), [](const AcceptanceRecord& r) { return r.accepted; }));
}

double acceptance_ratio(double log_p, double log_q, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("M must be positive");
  if (std::isnan(log_p) || std::isnan(log_q)) throw std::invalid_argument("log-score is NaN");
  if (log_p == -std::numeric_limits<double>::infinity()) return 0.0;
  if (log_q == -std::numeric_limits<double>::infinity()) return 1.0;
  return std::min(1.0, std::exp(log_p - log_q) / m);
}

ScoredCandidate score(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                      const seqmodel::SequenceModel& q, const SamplerConfig& cfg) {
  if (p.vocab().version() != q.vocab().version()) {
    throw seqmodel::VocabMismatch("P and Q were built on different vocabularies");
  }
  return {x, seqmodel::log_prob(p, x, cfg.p_temperature()), seqmodel::log_prob(q, x, cfg.q_temperature())};
}

double acceptance_ratio(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                        const seqmodel::SequenceModel& q, const SamplerConfig& cfg) {
  const auto s = score(x, p, q, cfg);
  return acceptance_ratio(s.log_p, s.log_q, cfg.m);
}

SuggestionSet run_rejection(const std::vector<ScoredCandidate>& candidates, const SamplerConfig& cfg,
                            std::mt19937_64& rng) {
  cfg.validate();
  SuggestionSet out;
  if (candidates.empty()) {
    out.warnings.push_back("no candidates to sample from");
    return out;
  }
  if (candidates.size() < cfg.n) {
    out.warnings.push_back("received " + std::to_string(candidates.size()) + " candidates, expected " +
                           std::to_string(cfg.n));
  }

  std::map<std::string, int> seen;
  std::vector<std::string> rendered;
  for (const auto& c : candidates) {
    rendered.push_back(chordlang::render_progression(c.candidate));
    ++seen[rendered.back()];
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    AcceptanceRecord r;
    r.candidate = c.candidate;
    r.log_p = c.log_p;
    r.log_q = c.log_q;
    r.ratio = acceptance_ratio(c.log_p, c.log_q, cfg.m);
    r.u = unif(rng);
    r.accepted = r.u < r.ratio;
    r.duplicate = seen[rendered[i]] > 1;
    (r.accepted ? accepted : rejected).push_back(i);
    out.audit.push_back(std::move(r));
  }

  auto by_ratio = [&](std::vector<std::size_t>& idx) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return out.audit[a].ratio > out.audit[b].ratio; });
  };
  if (cfg.order == SelectionOrder::Ratio || accepted.size() > cfg.target_count) by_ratio(accepted);
  if (accepted.size() > cfg.target_count) {
    accepted.resize(cfg.target_count);
    if (cfg.order == SelectionOrder::Acceptance) std::sort(accepted.begin(), accepted.end());
  }
  auto take = [&](std::size_t i, Provenance prov) {
    out.audit[i].selected = prov;
    out.suggestions.push_back(out.audit[i].candidate);
    out.provenance.push_back(prov);
    out.ratios.push_back(out.audit[i].ratio);
  };
  for (std::size_t i : accepted) take(i, Provenance::Accepted);
  if (cfg.fallback && accepted.size() < cfg.target_count) {
    by_ratio(rejected);
    const std::size_t k = std::min(cfg.target_count - accepted.size(), rejected.size());
    for (std::size_t j = 0; j < k; ++j) take(rejected[j], Provenance::TopkFill);
  }
  return out;
}

SuggestionSet run_rejection(const std::vector<chordlang::Progression>& candidates,
                            const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                            const SamplerConfig& cfg, std::mt19937_64& rng) {
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& x : candidates) scored.push_back(score(x, p, q, cfg));
  return run_rejection(scored, cfg, rng);
}

}  // namespace chordseed::sampler
