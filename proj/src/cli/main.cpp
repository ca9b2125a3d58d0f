#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/common/log.hpp"
#include "chordseed/corpus/prepare.hpp"
#include "chordseed/evalkit/experiments.hpp"
#include "chordseed/llmgate/mock.hpp"
#include "chordseed/llmgate/openai.hpp"
#include "chordseed/sampler/calibration.hpp"
#include "chordseed/sampler/suggest.hpp"
#include "chordseed/seqmodel/artifact.hpp"
#include "chordseed/seqmodel/train.hpp"
#include "chordseed/server/app.hpp"
#include "chordseed/server/config.hpp"

// After the Eigen headers: resolv.h, pulled in here, defines _res.
#include <httplib.h>

namespace fs = std::filesystem;
namespace cl = chordseed::chordlang;
namespace corpus = chordseed::corpus;
namespace ek = chordseed::evalkit;
namespace lg = chordseed::llmgate;
namespace sm = chordseed::seqmodel;
namespace sp = chordseed::sampler;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Paths {
  fs::path data = CHORDSEED_DATA_DIR;
  fs::path human() const { return data / "corpus/human_desk.jsonl"; }
  fs::path llm() const { return data / "corpus/llm_desk.jsonl"; }
  fs::path p_model() const { return data / "models/p_desk.bin"; }
  fs::path q_model() const { return data / "models/q_desk.bin"; }
  fs::path calibration() const { return data / "models/calibration_desk.json"; }
  fs::path llm_fixtures() const { return data / "fixtures/llm"; }
};

std::vector<corpus::CorpusRecord> load_records(const fs::path& path, corpus::Source source) {
  auto loaded = corpus::load_corpus(path, source);
  for (const auto& issue : loaded.skipped) {
    chordseed::log(chordseed::LogLevel::Warn, path.string() + ":" + std::to_string(issue.line) + ": " + issue.message);
  }
  return std::move(loaded.records);
}

sp::SamplerConfig sampler_config(const std::optional<fs::path>& file, const std::optional<fs::path>& calibration,
                                 std::optional<double> m) {
  auto cfg = file ? sp::SamplerConfig::load(*file) : sp::SamplerConfig{};
  if (calibration) cfg.m = sp::resolve_m(calibration);
  if (m) cfg.m = *m;
  cfg.validate();
  return cfg;
}

std::unique_ptr<lg::LLMProvider> make_llm(const std::optional<fs::path>& mock, bool openai,
                                          const std::optional<fs::path>& openai_config) {
  if (mock && openai) throw UsageError("--mock and --openai are exclusive");
  if (openai) {
    lg::ProviderConfig cfg;
    if (openai_config) {
      std::ifstream in(*openai_config);
      if (!in) throw chordseed::Error("cannot read " + openai_config->string());
      cfg = lg::ProviderConfig::from_json(json::parse(in));
    }
    return std::make_unique<lg::OpenAIProvider>(cfg);
  }
  if (!mock) throw UsageError("choose an LLM backend with --mock <dir> or --openai");
  return std::make_unique<lg::MockProvider>(*mock);
}

std::vector<std::string> split_keywords(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

std::vector<ek::TokenSeq> c_tokens(const std::vector<corpus::CorpusRecord>& records) {
  std::vector<ek::TokenSeq> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(corpus::transpose_to_c(r).chords);
  return out;
}

void emit_report(const ek::ExperimentReport& report, const std::optional<fs::path>& out) {
  std::cout << report.to_markdown();
  if (out) {
    report.write(*out);
    std::cerr << "wrote " << (*out / (report.experiment + ".{json,md,csv}")).string() << "\n";
  }
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  fs::path human, llm, out;
  std::string role = "p";
  std::string preset = "desk";
  std::optional<fs::path> config;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  double validation = 0.1;
  bool quiet = false;
};

void run_train(const TrainArgs& a) {
  const auto role = sm::parse_role(a.role == "p" ? "P" : "Q");
  sm::ModelConfig cfg;
  if (a.config) {
    std::ifstream in(*a.config);
    if (!in) throw chordseed::Error("cannot read " + a.config->string());
    cfg = sm::ModelConfig::from_json(json::parse(in));
  } else if (a.preset == "desk") {
    cfg = sm::ModelConfig::desk();
  } else if (a.preset == "reference") {
    cfg = role == sm::Role::P ? sm::ModelConfig::prior_reference() : sm::ModelConfig::proposal_reference();
  } else {
    throw UsageError("unknown preset " + a.preset);
  }
  if (a.epochs) cfg.max_epochs = *a.epochs;
  if (a.seed) cfg.seed = *a.seed;

  const auto human = load_records(a.human, corpus::Source::HumanCorpus);
  const auto llm = load_records(a.llm, corpus::Source::LlmGenerated);
  const auto prepared = corpus::prepare_corpora(human, llm, {4, a.validation, cfg.seed});
  const auto& split = role == sm::Role::P ? prepared.human_split : prepared.llm_split;
  std::cerr << "training " << sm::role_name(role) << " on " << split.train.size() << " progressions ("
            << split.validation.size() << " held out), vocabulary " << prepared.vocab.size() << "\n";

  const auto result = sm::train(prepared.vocab, split, cfg, role, [&](const sm::EpochStats& s) {
    if (!a.quiet) std::cerr << "epoch " << s.epoch << "  train " << s.train_nll << "  valid " << s.validation_nll << "\n";
  });
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  sm::save_model(result.model, a.out);
  const auto& r = result.report;
  std::cout << json{{"model", a.out.string()},
                    {"role", sm::role_name(role)},
                    {"config", cfg.to_json()},
                    {"epochs_run", r.epochs_run},
                    {"best_epoch", r.best_epoch},
                    {"train_nll", r.train_nll},
                    {"validation_nll", r.validation_nll},
                    {"wall_seconds", r.wall_seconds}}
                   .dump(2)
            << "\n";
}

// ---- calibrate --------------------------------------------------------------

struct CalibrateArgs {
  fs::path p, q, pool;
  double percentile = sp::kDefaultPercentile;
  std::optional<fs::path> sampler;
  std::optional<fs::path> out;
};

void run_calibrate(const CalibrateArgs& a) {
  const auto p = sm::load_model(a.p);
  const auto q = sm::load_model(a.q, p.vocab());
  const auto cfg = sampler_config(a.sampler, std::nullopt, std::nullopt);
  std::vector<cl::Progression> pool;
  for (const auto& r : load_records(a.pool, corpus::Source::LlmGenerated)) {
    pool.push_back(corpus::transpose_to_c(r).to_progression());
  }
  const auto ratios = sp::probability_ratios(pool, p, q, cfg);
  sp::Calibration cal{sp::calibrate_m(ratios, a.percentile), a.percentile, ratios.size()};
  std::cout << "M = " << cal.m << " (nearest-rank " << a.percentile * 100.0 << "th percentile of " << cal.count
            << " P/Q ratios)\n";
  if (a.out) {
    cal.save(*a.out);
    std::cerr << "wrote " << a.out->string() << "\n";
  }
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string keywords, key = "C", mode = "Maj";
  std::size_t bars = 4;
  std::optional<fs::path> mock;
  bool openai = false;
  std::optional<fs::path> openai_config;
  fs::path p, q;
  std::optional<fs::path> sampler, calibration;
  std::optional<std::uint64_t> seed;
  bool json_out = false;
};

void run_generate(const GenerateArgs& a) {
  const auto keywords = split_keywords(a.keywords);
  if (keywords.empty()) throw UsageError("--keywords needs at least one keyword");
  const auto key = cl::parse_key(a.key);
  if (!key) throw UsageError("unknown key " + a.key);
  const auto mode = cl::parse_mode(a.mode);
  if (!mode) throw UsageError("unknown mode " + a.mode);
  if (a.bars != 3 && a.bars != 4) throw UsageError("--bars must be 3 or 4");

  auto llm = make_llm(a.mock, a.openai, a.openai_config);
  const auto p = sm::load_model(a.p);
  const auto q = sm::load_model(a.q, p.vocab());
  const auto cfg = sampler_config(a.sampler, a.calibration, std::nullopt);
  std::mt19937_64 rng(a.seed.value_or(std::random_device{}()));
  const auto result = sp::generate_suggestions(keywords, *key, *mode, a.bars, sp::SuggestDeps{*llm, p, q, cfg, rng, ""});

  if (a.json_out) {
    json out{{"suggestions", json::array()}, {"warnings", result.set.warnings}};
    for (std::size_t i = 0; i < result.set.suggestions.size(); ++i) {
      out["suggestions"].push_back({{"chords", cl::chord_tokens(result.set.suggestions[i])},
                                    {"provenance", sp::provenance_name(result.set.provenance[i])},
                                    {"ratio", result.set.ratios[i]}});
    }
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& s : result.set.suggestions) std::cout << cl::render_progression(s) << "\n";
  std::cerr << result.set.accepted_count() << " of " << result.set.audit.size() << " candidates accepted (M = " << cfg.m
            << ")\n";
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::optional<fs::path> in, out, mock;
  bool openai = false;
  std::optional<fs::path> openai_config;
  std::size_t pairs = 10;
  int max_n = 4;
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  bool fixtures = false;
};

// Each <condition>.jsonl line is one set: a JSON array of progression strings.
std::map<std::string, std::vector<std::vector<ek::TokenSeq>>> read_sets(const fs::path& dir) {
  std::map<std::string, std::vector<std::vector<ek::TokenSeq>>> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    auto& group = out[entry.path().stem().string()];
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<ek::TokenSeq> set;
      for (const auto& s : json::parse(line)) {
        set.push_back(ek::tokens_of(cl::parse_progression(s.get<std::string>(), cl::Key{}, cl::Mode::Maj)));
      }
      group.push_back(std::move(set));
    }
  }
  if (out.empty()) throw chordseed::Error("no <condition>.jsonl set files in " + dir.string());
  return out;
}

void run_self_bleu(const EvalArgs& a) {
  const ek::BleuOptions bleu{a.max_n, 1e-9};
  if (a.in) {
    emit_report(ek::self_bleu_report(read_sets(*a.in), bleu), a.out);
    return;
  }
  auto llm = make_llm(a.mock, a.openai, a.openai_config);
  ek::DiversityOptions opts;
  opts.pairs = a.pairs;
  opts.bleu = bleu;
  opts.seed = a.seed;
  emit_report(ek::run_diversity_experiment(*llm, opts), a.out);
}

// reference.jsonl plus one corpus-format file per condition; conditions.json
// may map a file stem to {"label": ..., "keyword_conditional": bool}.
void run_jsd(const EvalArgs& a) {
  if (!a.in) throw UsageError("eval jsd needs --in <dir>");
  const auto reference = load_records(*a.in / "reference.jsonl", corpus::Source::HumanCorpus);
  json meta = json::object();
  if (fs::exists(*a.in / "conditions.json")) {
    std::ifstream in(*a.in / "conditions.json");
    meta = json::parse(in);
  }
  std::vector<ek::Condition> conditions;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(*a.in)) {
    if (entry.path().extension() == ".jsonl" && entry.path().stem() != "reference") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto stem = f.stem().string();
    const auto m = meta.value(stem, json::object());
    conditions.push_back({m.value("label", stem), m.value("keyword_conditional", false),
                          c_tokens(load_records(f, corpus::Source::LlmGenerated))});
  }
  if (conditions.empty()) throw chordseed::Error("no condition files next to reference.jsonl");
  emit_report(ek::run_coherence_experiment(reference, conditions, {a.samples}), a.out);
}

// Rejection sampling over the LLM pool, drawn with replacement in rounds of N,
// until `count` candidates are accepted.
std::vector<ek::TokenSeq> accepted_from_pool(const std::vector<cl::Progression>& pool, const sm::LstmModel& p,
                                             const sm::LstmModel& q, const sp::SamplerConfig& cfg, std::size_t count,
                                             std::mt19937_64& rng) {
  std::vector<ek::TokenSeq> out;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const std::size_t max_rounds = 200 * count;
  for (std::size_t round = 0; out.size() < count && round < max_rounds; ++round) {
    std::vector<cl::Progression> batch;
    for (std::size_t i = 0; i < cfg.n; ++i) batch.push_back(pool[pick(rng)]);
    for (auto& s : ek::rejection_samples(batch, p, q, cfg, rng)) out.push_back(std::move(s));
  }
  if (out.size() < count) throw chordseed::InsufficientData("rejection sampling accepted too few candidates");
  out.resize(count);
  return out;
}

void run_tables(const EvalArgs& a, const Paths& paths) {
  if (a.in) {
    for (const char* name : {"diversity", "coherence"}) {
      const auto file = *a.in / (std::string(name) + ".json");
      if (!fs::exists(file)) continue;
      std::ifstream in(file);
      const auto report = ek::ExperimentReport::from_json(json::parse(in));
      std::cout << "### " << name << "\n\n" << report.to_markdown() << "\n";
    }
    return;
  }
  if (!a.fixtures) throw UsageError("eval tables needs --fixtures or --in <dir>");

  std::mt19937_64 rng(a.seed);
  lg::MockProvider llm(paths.llm_fixtures());
  ek::DiversityOptions dopts;
  dopts.pairs = a.pairs;
  dopts.bleu.max_n = a.max_n;
  dopts.seed = a.seed;
  const auto diversity = ek::run_diversity_experiment(llm, dopts);

  const auto human = load_records(paths.human(), corpus::Source::HumanCorpus);
  const auto llm_records = load_records(paths.llm(), corpus::Source::LlmGenerated);
  const auto p = sm::load_model(paths.p_model());
  const auto q = sm::load_model(paths.q_model(), p.vocab());
  auto cfg = sampler_config(std::nullopt, fs::exists(paths.calibration()) ? std::optional(paths.calibration()) : std::nullopt,
                            std::nullopt);

  std::vector<cl::Progression> pool;
  for (const auto& r : llm_records) {
    if (r.chords.size() == 4) pool.push_back(corpus::transpose_to_c(r).to_progression());
  }
  std::vector<ek::TokenSeq> llm_samples;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t i = 0; i < a.samples; ++i) llm_samples.push_back(ek::tokens_of(pool[pick(rng)]));

  std::vector<ek::Condition> conditions{
      {"Prior samples", false, ek::prior_samples(p, a.samples, 4, rng)},
      {"LLM samples", true, llm_samples},
      {"Rejection sampled", true, accepted_from_pool(pool, p, q, cfg, a.samples, rng)},
      {"Uniform random", false, ek::uniform_samples(p.vocab(), a.samples, 4, rng)},
  };
  auto coherence = ek::run_coherence_experiment(human, conditions, {a.samples});
  coherence.seeds = {a.seed};
  coherence.config["sampler"] = cfg.to_json();

  std::cout << "### diversity\n\n" << diversity.to_markdown() << "\n### coherence\n\n" << coherence.to_markdown();
  if (a.out) {
    diversity.write(*a.out);
    coherence.write(*a.out);
    std::cerr << "wrote reports to " << a.out->string() << "\n";
  }
}

// ---- serve ------------------------------------------------------------------

httplib::Server* g_server = nullptr;

void run_serve(const fs::path& config_path, std::optional<int> port, std::optional<std::string> host) {
  auto config = chordseed::server::ServerConfig::load(config_path);
  if (port) config.port = *port;
  if (host) config.host = *host;
  auto rt = chordseed::server::Runtime::build(config);
  chordseed::server::App app({*rt.llm, *rt.p, *rt.q, rt.sampler, rt.transcription.get(), *rt.audit, config.upload_dir,
                              config.allow_seed_header});
  httplib::Server server;
  app.mount(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "listening on http://" << config.host << ":" << config.port << " (M = " << rt.sampler.m << ")\n";
  if (!server.listen(config.host, config.port)) throw chordseed::Error("cannot listen on port " + std::to_string(config.port));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chordseed: keyword-driven chord progression suggestions"};
  app.require_subcommand(1);
  Paths paths;
  app.add_option("--data-dir", paths.data, "directory holding corpus/, models/ and fixtures/")->capture_default_str();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the prior P or the proposal Q");
  train_cmd->add_option("--role", train.role, "p (human corpus) or q (LLM corpus)")->check(CLI::IsMember({"p", "q"}));
  train_cmd->add_option("--human", train.human, "human corpus JSONL");
  train_cmd->add_option("--llm", train.llm, "LLM corpus JSONL");
  train_cmd->add_option("--out", train.out, "model artifact to write")->required();
  train_cmd->add_option("--preset", train.preset, "desk or reference")->check(CLI::IsMember({"desk", "reference"}));
  train_cmd->add_option("--config", train.config, "model config JSON (overrides --preset)");
  train_cmd->add_option("--epochs", train.epochs, "maximum epochs");
  train_cmd->add_option("--seed", train.seed, "training seed");
  train_cmd->add_option("--validation", train.validation, "held-out fraction");
  train_cmd->add_flag("--quiet", train.quiet, "no per-epoch lines");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "estimate M from P/Q ratios over an LLM corpus");
  cal_cmd->add_option("--p", cal.p, "prior artifact");
  cal_cmd->add_option("--q", cal.q, "proposal artifact");
  cal_cmd->add_option("--pool", cal.pool, "LLM corpus JSONL");
  cal_cmd->add_option("--percentile", cal.percentile, "nearest-rank percentile in (0, 1]");
  cal_cmd->add_option("--sampler-config", cal.sampler, "sampler config JSON (temperatures)");
  cal_cmd->add_option("--out", cal.out, "calibration JSON to write");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "suggest four progressions");
  gen_cmd->add_option("--keywords", gen.keywords, "comma-separated keywords")->required();
  gen_cmd->add_option("--key", gen.key, "key root");
  gen_cmd->add_option("--mode", gen.mode, "Maj, Min, Dor, Phr, Lyd, Mix, Loc, Hmin, Phdm");
  gen_cmd->add_option("--bars", gen.bars, "3 or 4");
  gen_cmd->add_option("--mock", gen.mock, "LLM fixture directory");
  gen_cmd->add_flag("--openai", gen.openai, "use the chat-completions API (key from OPENAI_API_KEY)");
  gen_cmd->add_option("--openai-config", gen.openai_config, "provider config JSON");
  gen_cmd->add_option("--p", gen.p, "prior artifact");
  gen_cmd->add_option("--q", gen.q, "proposal artifact");
  gen_cmd->add_option("--sampler-config", gen.sampler, "sampler config JSON");
  gen_cmd->add_option("--calibration", gen.calibration, "calibration JSON (M)");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_flag("--json", gen.json_out, "JSON output with provenance and ratios");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "diversity and coherence metrics");
  eval_cmd->require_subcommand(1);
  const auto common_eval = [&](CLI::App* c) {
    c->add_option("--in", ev.in, "input directory");
    c->add_option("--out", ev.out, "directory for JSON, markdown and CSV reports");
    c->add_option("--seed", ev.seed, "RNG seed");
  };
  auto* sb = eval_cmd->add_subcommand("self-bleu", "Self-BLEU per set: from --in set files or a live/mock run");
  common_eval(sb);
  sb->add_option("--mock", ev.mock, "LLM fixture directory");
  sb->add_flag("--openai", ev.openai, "use the chat-completions API");
  sb->add_option("--openai-config", ev.openai_config, "provider config JSON");
  sb->add_option("--pairs", ev.pairs, "pairs of sets to generate");
  sb->add_option("--max-n", ev.max_n, "largest n-gram order");
  auto* jsd_cmd = eval_cmd->add_subcommand("jsd", "unigram and bigram JSD of condition files against reference.jsonl");
  common_eval(jsd_cmd);
  jsd_cmd->add_option("--min", ev.samples, "minimum progressions per condition");
  auto* tables = eval_cmd->add_subcommand("tables", "both tables from shipped fixtures or from report JSON in --in");
  common_eval(tables);
  tables->add_flag("--fixtures", ev.fixtures, "use the shipped desk corpora, models and LLM fixtures");
  tables->add_option("--pairs", ev.pairs, "pairs of sets for the diversity table");
  tables->add_option("--samples", ev.samples, "progressions per coherence condition");
  tables->add_option("--max-n", ev.max_n, "largest n-gram order");

  fs::path serve_config = "config/server.json";
  std::optional<int> serve_port;
  std::optional<std::string> serve_host;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  serve_cmd->add_option("--config", serve_config, "server config JSON")->capture_default_str();
  serve_cmd->add_option("--port", serve_port, "override the configured port");
  serve_cmd->add_option("--host", serve_host, "override the configured host");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  chordseed::set_min_log_level(verbose ? chordseed::LogLevel::Debug : chordseed::LogLevel::Info);

  // Defaults that depend on --data-dir.
  if (train.human.empty()) train.human = paths.human();
  if (train.llm.empty()) train.llm = paths.llm();
  if (cal.p.empty()) cal.p = paths.p_model();
  if (cal.q.empty()) cal.q = paths.q_model();
  if (cal.pool.empty()) cal.pool = paths.llm();
  if (gen.p.empty()) gen.p = paths.p_model();
  if (gen.q.empty()) gen.q = paths.q_model();
  if (!gen.calibration && !gen.sampler && fs::exists(paths.calibration())) gen.calibration = paths.calibration();

  try {
    if (train_cmd->parsed()) run_train(train);
    if (cal_cmd->parsed()) run_calibrate(cal);
    if (gen_cmd->parsed()) run_generate(gen);
    if (sb->parsed()) run_self_bleu(ev);
    if (jsd_cmd->parsed()) run_jsd(ev);
    if (tables->parsed()) run_tables(ev, paths);
    if (serve_cmd->parsed()) run_serve(serve_config, serve_port, serve_host);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
