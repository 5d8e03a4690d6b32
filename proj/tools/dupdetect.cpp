// Copyright 2026 The dupdetect authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the duplicate-question pipeline.
//
// Conventions:
//   - logs go to stderr, data goes to stdout or --out;
//   - a JSON config file (--config, flat object, keys = long flag names)
//     supplies defaults; explicit flags always win;
//   - the fully resolved configuration is echoed to stderr on every run;
//   - failures print one machine-parsable line:  error class=<c> message=<m>
//     and exit with the class code: argument=2 io=3 format=4 config=5
//     domain=6 data=7 (unexpected internal failures exit 1).

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dupdetect/dupdetect.hpp"
#include "dupdetect/remote.hpp"

namespace dd = dupdetect;
using nlohmann::json;

namespace {

int exit_code_for(dd::ErrorClass klass) {
  switch (klass) {
    case dd::ErrorClass::argument: return 2;
    case dd::ErrorClass::io: return 3;
    case dd::ErrorClass::format: return 4;
    case dd::ErrorClass::config: return 5;
    case dd::ErrorClass::domain: return 6;
    case dd::ErrorClass::data: return 7;
  }
  return 1;
}

// Config-file values fill in only where the flag was not passed.
class ConfigLayer {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw dd::io_error("cannot open config file " + path);
    try {
      in >> cfg_;
    } catch (const json::exception& e) {
      throw dd::format_error("config file " + path + ": " + e.what());
    }
    if (!cfg_.is_object()) {
      throw dd::format_error("config file " + path + ": expected a JSON object");
    }
  }

  template <typename T>
  void fill(const CLI::Option* opt, const char* key, T& value) const {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg_.is_object() || !cfg_.contains(key)) return;
    try {
      value = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw dd::config_error(std::string("config key '") + key + "': " + e.what());
    }
  }

 private:
  json cfg_;
};

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) {
    throw dd::argument_error(std::string("missing required ") + flag);
  }
}

// Set from the global --threads flag (or config) before dispatch; echoed with
// every resolved configuration.
std::size_t g_threads = 1;

void echo_config(const json& resolved) {
  json j = resolved;
  j["threads"] = g_threads;
  std::cerr << "config " << j.dump() << "\n";
}

std::ifstream open_in(const std::string& path) { return dd::binio::open_input(path); }

std::ofstream open_out(const std::string& path) { return dd::binio::open_output(path); }

// ---------------------------------------------------------------- ingest --

struct IngestArgs {
  std::string posts, links, out;
  CLI::Option *posts_opt = nullptr, *links_opt = nullptr, *out_opt = nullptr;
};

int run_ingest(IngestArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.posts_opt, "posts", a.posts);
  cfg.fill(a.links_opt, "links", a.links);
  cfg.fill(a.out_opt, "out", a.out);
  require_path(a.posts, "--posts");
  require_path(a.links, "--links");
  require_path(a.out, "--out");
  echo_config(json{{"command", "ingest"}, {"posts", a.posts}, {"links", a.links},
                   {"out", a.out}});

  auto posts_in = open_in(a.posts);
  auto links_in = open_in(a.links);
  dd::IngestStats stats;
  const dd::Corpus corpus = dd::ingest_corpus(posts_in, links_in, &stats);
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << "\n";
  auto out = open_out(a.out);
  dd::write_corpus(out, corpus);
  dd::binio::finish_output(out, a.out);
  std::cerr << "ingest "
            << json{{"posts", corpus.posts.size()},
                    {"posts_malformed", stats.posts_malformed},
                    {"posts_empty", stats.posts_empty},
                    {"pairs", corpus.pairs.size()},
                    {"pairs_dropped_missing", stats.pairs_dropped_missing},
                    {"pairs_dropped_self", stats.pairs_dropped_self},
                    {"pairs_dropped_repeat", stats.pairs_dropped_repeat}}
                   .dump()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- census --

struct CensusArgs {
  std::string corpus, out;
  CLI::Option *corpus_opt = nullptr, *out_opt = nullptr;
};

int run_census(CensusArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.corpus_opt, "corpus", a.corpus);
  cfg.fill(a.out_opt, "out", a.out);
  require_path(a.corpus, "--corpus");
  require_path(a.out, "--out");
  echo_config(json{{"command", "census"}, {"corpus", a.corpus}, {"out", a.out}});

  auto in = open_in(a.corpus);
  const dd::Corpus corpus = dd::read_corpus(in, a.corpus);
  const dd::CensusReport report = dd::census(corpus);
  auto out = open_out(a.out);
  dd::write_census_csv(out, report);
  dd::binio::finish_output(out, a.out);
  std::cout << json{{"common_tag_rate", report.common_tag_rate},
                    {"mean_dups_per_post", report.mean_dups_per_post},
                    {"single_dup_fraction", report.single_dup_fraction},
                    {"closure_classes", report.closure_classes},
                    {"closure_pairs", report.closure_pairs},
                    {"topics", report.per_topic.size()},
                    {"degenerate", report.degenerate}}
                   .dump()
            << "\n";
  return 0;
}

// ----------------------------------------------------------------- embed --

struct EmbedArgs {
  std::string corpus, provider = "offline", base_url, model, out;
  std::uint32_t dim = 256;
  std::uint64_t seed = 0;
  std::size_t max_tokens = 8191;
  std::size_t retry_limit = 3;
  std::size_t retry_base_ms = 100;
  std::size_t request_batch = 64;
  CLI::Option *corpus_opt = nullptr, *provider_opt = nullptr, *base_url_opt = nullptr,
              *model_opt = nullptr, *out_opt = nullptr, *dim_opt = nullptr,
              *seed_opt = nullptr, *max_tokens_opt = nullptr, *retry_limit_opt = nullptr,
              *retry_base_ms_opt = nullptr, *request_batch_opt = nullptr;
};

int run_embed(EmbedArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.corpus_opt, "corpus", a.corpus);
  cfg.fill(a.provider_opt, "provider", a.provider);
  cfg.fill(a.base_url_opt, "base-url", a.base_url);
  cfg.fill(a.model_opt, "model", a.model);
  cfg.fill(a.out_opt, "out", a.out);
  cfg.fill(a.dim_opt, "dim", a.dim);
  cfg.fill(a.seed_opt, "seed", a.seed);
  cfg.fill(a.max_tokens_opt, "max-tokens", a.max_tokens);
  cfg.fill(a.retry_limit_opt, "retry-limit", a.retry_limit);
  cfg.fill(a.retry_base_ms_opt, "retry-base-ms", a.retry_base_ms);
  cfg.fill(a.request_batch_opt, "request-batch", a.request_batch);
  require_path(a.corpus, "--corpus");
  require_path(a.out, "--out");
  if (a.provider != "remote" && a.provider != "offline") {
    throw dd::argument_error("--provider must be remote or offline, got '" + a.provider + "'");
  }

  dd::ProviderConfig pc;
  pc.kind = a.provider == "remote" ? dd::ProviderKind::remote : dd::ProviderKind::offline_hash;
  pc.base_url = a.base_url;
  if (!a.model.empty()) pc.model_name = a.model;
  pc.dim = a.dim;
  pc.seed = a.seed;
  pc.max_tokens = a.max_tokens;
  pc.retry_limit = a.retry_limit;
  pc.retry_base_ms = a.retry_base_ms;
  pc.batch_size = a.request_batch;
  echo_config(json{{"command", "embed"},
                   {"corpus", a.corpus},
                   {"provider", a.provider},
                   {"base-url", a.base_url},
                   {"model", pc.model_name},
                   {"dim", a.dim},
                   {"seed", a.seed},
                   {"max-tokens", a.max_tokens},
                   {"retry-limit", a.retry_limit},
                   {"retry-base-ms", a.retry_base_ms},
                   {"request-batch", a.request_batch},
                   {"out", a.out}});

  auto in = open_in(a.corpus);
  const dd::Corpus corpus = dd::read_corpus(in, a.corpus);

  if (pc.kind == dd::ProviderKind::offline_hash) {
    dd::EmbedStats stats;
    const dd::EmbeddingStore store = dd::embed_corpus_offline(corpus, pc, &stats);
    auto out = open_out(a.out);
    dd::save_store(out, store);
    dd::binio::finish_output(out, a.out);
    std::cerr << "embed "
              << json{{"embedded", stats.embedded},
                      {"skipped_empty", stats.skipped_empty},
                      {"skipped_no_tokens", stats.skipped_no_tokens},
                      {"dim", store.dim()}}
                     .dump()
              << "\n";
  } else {
    dd::RemoteStats stats;
    // The output file doubles as the request cache; re-runs fetch only
    // missing ids and aborted runs keep their partial progress.
    const dd::EmbeddingStore store = dd::embed_corpus_remote(corpus, pc, a.out, &stats);
    auto out = open_out(a.out);
    dd::save_store(out, store);
    dd::binio::finish_output(out, a.out);
    std::cerr << "embed "
              << json{{"cached", stats.cached},
                      {"fetched", stats.fetched},
                      {"skipped_empty", stats.skipped_empty},
                      {"requests", stats.requests},
                      {"retries", stats.retries},
                      {"dim", store.dim()}}
                     .dump()
              << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- train --

struct TrainArgs {
  std::string corpus, store, out, loss = "mnr", tag;
  double margin = 0.5, scale = 20.0, lr = 5e-2, ratio = 0.8;
  std::size_t batch_size = 64, epochs = 10;
  std::uint32_t out_dim = 50;
  std::uint64_t seed = 0;
  CLI::Option *corpus_opt = nullptr, *store_opt = nullptr, *out_opt = nullptr,
              *loss_opt = nullptr, *tag_opt = nullptr, *margin_opt = nullptr,
              *scale_opt = nullptr, *lr_opt = nullptr, *ratio_opt = nullptr,
              *batch_opt = nullptr, *epochs_opt = nullptr, *out_dim_opt = nullptr,
              *seed_opt = nullptr;
};

int run_train(TrainArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.corpus_opt, "corpus", a.corpus);
  cfg.fill(a.store_opt, "store", a.store);
  cfg.fill(a.out_opt, "out", a.out);
  cfg.fill(a.loss_opt, "loss", a.loss);
  cfg.fill(a.tag_opt, "tag", a.tag);
  cfg.fill(a.margin_opt, "margin", a.margin);
  cfg.fill(a.scale_opt, "scale", a.scale);
  cfg.fill(a.lr_opt, "lr", a.lr);
  cfg.fill(a.ratio_opt, "ratio", a.ratio);
  cfg.fill(a.batch_opt, "batch-size", a.batch_size);
  cfg.fill(a.epochs_opt, "epochs", a.epochs);
  cfg.fill(a.out_dim_opt, "out-dim", a.out_dim);
  cfg.fill(a.seed_opt, "seed", a.seed);
  require_path(a.corpus, "--corpus");
  require_path(a.store, "--store");
  require_path(a.out, "--out");

  dd::TrainingConfig tc;
  tc.loss = dd::loss_kind_from_string(a.loss);
  tc.margin = a.margin;
  tc.scale = a.scale;
  tc.batch_size = a.batch_size;
  tc.epochs = a.epochs;
  tc.learning_rate = a.lr;
  tc.seed = a.seed;
  tc.out_dim = a.out_dim;
  tc.validate();
  if (!(a.ratio > 0.0 && a.ratio < 1.0)) {
    throw dd::argument_error("--ratio must be in (0,1)");
  }
  json resolved = tc.to_json();
  resolved["command"] = "train";
  resolved["corpus"] = a.corpus;
  resolved["store"] = a.store;
  resolved["out"] = a.out;
  resolved["ratio"] = a.ratio;
  resolved["tag"] = a.tag;
  echo_config(resolved);

  auto cin_ = open_in(a.corpus);
  dd::Corpus corpus = dd::read_corpus(cin_, a.corpus);
  if (!a.tag.empty()) {
    corpus = dd::filter_by_tag(corpus, a.tag);
    if (corpus.pairs.empty()) {
      throw dd::data_error("train: no duplicate pairs carry tag '" + a.tag + "'");
    }
  }
  auto sin_ = open_in(a.store);
  const dd::EmbeddingStore store = dd::load_store(sin_, a.store);

  const dd::SplitSpec split = dd::split(corpus, a.ratio, a.seed);
  auto [head, log] = dd::train(corpus, split, store, tc);
  auto out = open_out(a.out);
  dd::save_head(out, head);
  dd::binio::finish_output(out, a.out);
  std::cout << log.to_json().dump() << "\n";
  return 0;
}

// --------------------------------------------------------------- project --

struct ProjectArgs {
  std::string store, model, out;
  CLI::Option *store_opt = nullptr, *model_opt = nullptr, *out_opt = nullptr;
};

int run_project(ProjectArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.store_opt, "store", a.store);
  cfg.fill(a.model_opt, "model", a.model);
  cfg.fill(a.out_opt, "out", a.out);
  require_path(a.store, "--store");
  require_path(a.model, "--model");
  require_path(a.out, "--out");
  echo_config(json{{"command", "project"}, {"store", a.store}, {"model", a.model},
                   {"out", a.out}});

  auto sin_ = open_in(a.store);
  const dd::EmbeddingStore store = dd::load_store(sin_, a.store);
  auto min_ = open_in(a.model);
  const dd::ProjectionHead head = dd::load_head(min_, a.model);
  std::size_t rejected = 0;
  const dd::LatentIndex index = dd::project(store, head, &rejected);
  auto out = open_out(a.out);
  dd::save_index(out, index);
  dd::binio::finish_output(out, a.out);
  std::cerr << "project " << json{{"projected", index.size()}, {"rejected", rejected}}.dump()
            << "\n";
  return 0;
}

// ------------------------------------------------------------------ rank --

struct RankArgs {
  std::string index, corpus, text, model;
  std::uint64_t query_id = 0;
  std::size_t k = 30;
  std::vector<std::string> tag_filter;
  std::uint32_t dim = 256;
  std::uint64_t seed = 0;
  std::size_t max_tokens = 8191;
  CLI::Option *index_opt = nullptr, *corpus_opt = nullptr, *text_opt = nullptr,
              *model_opt = nullptr, *query_opt = nullptr, *k_opt = nullptr,
              *filter_opt = nullptr, *dim_opt = nullptr, *seed_opt = nullptr,
              *max_tokens_opt = nullptr;
};

int run_rank(RankArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.index_opt, "index", a.index);
  cfg.fill(a.corpus_opt, "corpus", a.corpus);
  cfg.fill(a.text_opt, "text", a.text);
  cfg.fill(a.model_opt, "model", a.model);
  cfg.fill(a.query_opt, "query-id", a.query_id);
  cfg.fill(a.k_opt, "k", a.k);
  cfg.fill(a.filter_opt, "tag-filter", a.tag_filter);
  cfg.fill(a.dim_opt, "dim", a.dim);
  cfg.fill(a.seed_opt, "seed", a.seed);
  cfg.fill(a.max_tokens_opt, "max-tokens", a.max_tokens);
  require_path(a.index, "--index");
  const bool by_id = a.query_opt != nullptr && a.query_opt->count() > 0;
  const bool by_text = !a.text.empty();
  if (by_id == by_text) {
    throw dd::argument_error("rank: pass exactly one of --query-id or --text");
  }
  echo_config(json{{"command", "rank"},
                   {"index", a.index},
                   {"corpus", a.corpus},
                   {"query-id", by_id ? json(a.query_id) : json()},
                   {"text", a.text},
                   {"model", a.model},
                   {"k", a.k},
                   {"tag-filter", a.tag_filter}});

  auto iin = open_in(a.index);
  const dd::LatentIndex index = dd::load_index(iin, a.index);

  dd::RankedList ranked;
  if (by_id) {
    std::optional<dd::Corpus> corpus;
    if (!a.tag_filter.empty()) {
      require_path(a.corpus, "--corpus (needed with --tag-filter)");
      auto cin_ = open_in(a.corpus);
      corpus = dd::read_corpus(cin_, a.corpus);
    }
    ranked = dd::top_k(index, a.query_id, a.k, a.tag_filter,
                       corpus ? &*corpus : nullptr);
  } else {
    if (!a.tag_filter.empty()) {
      throw dd::argument_error("rank: --tag-filter applies to --query-id mode only");
    }
    require_path(a.model, "--model (needed with --text)");
    auto min_ = open_in(a.model);
    const dd::ProjectionHead head = dd::load_head(min_, a.model);
    dd::ProviderConfig pc;
    pc.kind = dd::ProviderKind::offline_hash;
    pc.dim = a.dim;
    pc.seed = a.seed;
    pc.max_tokens = a.max_tokens;
    ranked = dd::top_k_text(index, head, pc, a.text, a.k);
  }
  dd::write_ranked_csv(std::cout, ranked);
  return 0;
}

// -------------------------------------------------------------- evaluate --

struct EvaluateArgs {
  std::string index, corpus, store, out, compare;
  std::uint64_t split_seed = 0, seed = 0;
  double ratio = 0.8, margin = 0.5, scale = 20.0, lr = 5e-2;
  std::size_t batch_size = 64, epochs = 10, neg_ratio = 9;
  std::uint32_t out_dim = 50;
  CLI::Option *index_opt = nullptr, *corpus_opt = nullptr, *store_opt = nullptr,
              *out_opt = nullptr, *compare_opt = nullptr, *split_seed_opt = nullptr,
              *seed_opt = nullptr, *ratio_opt = nullptr, *margin_opt = nullptr,
              *scale_opt = nullptr, *lr_opt = nullptr, *batch_opt = nullptr,
              *epochs_opt = nullptr, *neg_ratio_opt = nullptr, *out_dim_opt = nullptr;
};

int run_evaluate(EvaluateArgs& a, const ConfigLayer& cfg) {
  cfg.fill(a.index_opt, "index", a.index);
  cfg.fill(a.corpus_opt, "corpus", a.corpus);
  cfg.fill(a.store_opt, "store", a.store);
  cfg.fill(a.out_opt, "out", a.out);
  cfg.fill(a.compare_opt, "compare", a.compare);
  cfg.fill(a.split_seed_opt, "split-seed", a.split_seed);
  cfg.fill(a.seed_opt, "seed", a.seed);
  cfg.fill(a.ratio_opt, "ratio", a.ratio);
  cfg.fill(a.margin_opt, "margin", a.margin);
  cfg.fill(a.scale_opt, "scale", a.scale);
  cfg.fill(a.lr_opt, "lr", a.lr);
  cfg.fill(a.batch_opt, "batch-size", a.batch_size);
  cfg.fill(a.epochs_opt, "epochs", a.epochs);
  cfg.fill(a.neg_ratio_opt, "neg-ratio", a.neg_ratio);
  cfg.fill(a.out_dim_opt, "out-dim", a.out_dim);
  require_path(a.corpus, "--corpus");
  require_path(a.out, "--out");

  std::vector<std::string> settings;
  for (const auto& part : dd::split_on(a.compare.empty() ? "index" : a.compare, ',')) {
    const std::string name = dd::trim(part);
    if (name.empty()) continue;
    if (name != "raw" && name != "triplet" && name != "mnr" && name != "index") {
      throw dd::argument_error("evaluate: unknown --compare setting '" + name +
                               "' (expected raw, triplet, mnr, or index)");
    }
    settings.push_back(name);
  }
  if (settings.empty()) throw dd::argument_error("evaluate: empty --compare list");

  echo_config(json{{"command", "evaluate"},
                   {"index", a.index},
                   {"corpus", a.corpus},
                   {"store", a.store},
                   {"compare", settings},
                   {"split-seed", a.split_seed},
                   {"seed", a.seed},
                   {"ratio", a.ratio},
                   {"neg-ratio", a.neg_ratio},
                   {"batch-size", a.batch_size},
                   {"epochs", a.epochs},
                   {"lr", a.lr},
                   {"margin", a.margin},
                   {"scale", a.scale},
                   {"out-dim", a.out_dim},
                   {"out", a.out}});

  auto cin_ = open_in(a.corpus);
  const dd::Corpus corpus = dd::read_corpus(cin_, a.corpus);
  const dd::SplitSpec split = dd::split(corpus, a.ratio, a.split_seed);

  std::optional<dd::LatentIndex> given_index;
  std::optional<dd::EmbeddingStore> store;
  for (const auto& name : settings) {
    if (name == "index" && !given_index) {
      require_path(a.index, "--index (needed for the 'index' setting)");
      auto iin = open_in(a.index);
      given_index = dd::load_index(iin, a.index);
    }
    if (name != "index" && !store) {
      require_path(a.store, "--store (needed for raw/triplet/mnr settings)");
      auto sin_ = open_in(a.store);
      store = dd::load_store(sin_, a.store);
    }
  }

  const auto& ns = dd::default_top_ns();
  std::vector<dd::MetricsReport> reports;
  for (const auto& name : settings) {
    if (name == "index") {
      reports.push_back(dd::evaluate_index(*given_index, corpus, split.test_pairs, ns,
                                           a.neg_ratio, a.split_seed, "index"));
      continue;
    }
    if (name == "raw") {
      const dd::LatentIndex raw = dd::build_index(*store, nullptr);
      reports.push_back(dd::evaluate_index(raw, corpus, split.test_pairs, ns, a.neg_ratio,
                                           a.split_seed, "raw"));
      continue;
    }
    dd::TrainingConfig tc;
    tc.loss = dd::loss_kind_from_string(name);
    tc.margin = a.margin;
    tc.scale = a.scale;
    tc.batch_size = a.batch_size;
    tc.epochs = a.epochs;
    tc.learning_rate = a.lr;
    tc.seed = a.seed;
    tc.out_dim = a.out_dim;
    tc.validate();
    auto [head, log] = dd::train(corpus, split, *store, tc);
    const dd::LatentIndex index = dd::project(*store, head);
    reports.push_back(dd::evaluate_index(index, corpus, split.test_pairs, ns, a.neg_ratio,
                                         a.split_seed, name));
  }

  const json report{{"split_seed", a.split_seed},
                    {"ratio", a.ratio},
                    {"neg_ratio", a.neg_ratio},
                    {"settings", dd::reports_to_json(reports)}};
  auto out = open_out(a.out);
  out << report.dump(2) << "\n";
  dd::binio::finish_output(out, a.out);
  dd::write_compare_csv(std::cout, reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dupdetect: detect duplicate forum questions with refined embeddings.\n"
      "Exit codes: 0 ok, 2 argument, 3 io, 4 format, 5 config, 6 domain,\n"
      "7 data, 1 internal."};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file (flat object, keys = long flag names; flags win)");
  std::size_t threads = 1;
  auto* threads_opt =
      app.add_option("--threads", threads,
                     "upper bound for data-parallel sections (current pipeline is "
                     "single-threaded for determinism)")
          ->check(CLI::PositiveNumber);

  IngestArgs ing;
  auto* c_ingest = app.add_subcommand("ingest", "Parse, clean, and persist posts and pairs")->fallthrough();
  ing.posts_opt = c_ingest->add_option("--posts", ing.posts, "posts.jsonl input");
  ing.links_opt = c_ingest->add_option("--links", ing.links, "pairs.csv input");
  ing.out_opt = c_ingest->add_option("--out", ing.out, "corpus.bin output");

  CensusArgs cen;
  auto* c_census = app.add_subcommand("census", "Corpus statistics per topic")->fallthrough();
  cen.corpus_opt = c_census->add_option("--corpus", cen.corpus, "corpus.bin input");
  cen.out_opt = c_census->add_option("--out", cen.out, "census.csv output");

  EmbedArgs emb;
  auto* c_embed = app.add_subcommand("embed", "Embed posts via a provider")->fallthrough();
  emb.corpus_opt = c_embed->add_option("--corpus", emb.corpus, "corpus.bin input");
  emb.provider_opt = c_embed->add_option("--provider", emb.provider, "remote|offline");
  emb.base_url_opt = c_embed->add_option("--base-url", emb.base_url, "remote API root");
  emb.model_opt = c_embed->add_option("--model", emb.model, "remote model name");
  emb.dim_opt = c_embed->add_option("--dim", emb.dim, "offline vector dimension");
  emb.seed_opt = c_embed->add_option("--seed", emb.seed, "offline hashing seed");
  emb.max_tokens_opt = c_embed->add_option("--max-tokens", emb.max_tokens, "input budget");
  emb.retry_limit_opt = c_embed->add_option("--retry-limit", emb.retry_limit, "remote retries");
  emb.retry_base_ms_opt =
      c_embed->add_option("--retry-base-ms", emb.retry_base_ms, "backoff base (ms)");
  emb.request_batch_opt =
      c_embed->add_option("--request-batch", emb.request_batch, "texts per remote request");
  emb.out_opt = c_embed->add_option("--out", emb.out, "store.emb output (remote: also cache)");

  TrainArgs trn;
  auto* c_train = app.add_subcommand("train", "Train the projection head")->fallthrough();
  trn.corpus_opt = c_train->add_option("--corpus", trn.corpus, "corpus.bin input");
  trn.store_opt = c_train->add_option("--store", trn.store, "store.emb input");
  trn.loss_opt = c_train->add_option("--loss", trn.loss, "triplet|mnr");
  trn.margin_opt = c_train->add_option("--margin", trn.margin, "triplet margin");
  trn.scale_opt = c_train->add_option("--scale", trn.scale, "mnr softmax scale");
  trn.batch_opt = c_train->add_option("--batch-size", trn.batch_size, "pairs per batch")
                      ->check(CLI::PositiveNumber);
  trn.epochs_opt = c_train->add_option("--epochs", trn.epochs, "training epochs");
  trn.lr_opt = c_train->add_option("--lr", trn.lr, "learning rate");
  trn.tag_opt = c_train->add_option("--tag", trn.tag, "restrict to one topic");
  trn.ratio_opt = c_train->add_option("--ratio", trn.ratio, "train fraction");
  trn.out_dim_opt = c_train->add_option("--out-dim", trn.out_dim, "latent dimension");
  trn.seed_opt = c_train->add_option("--seed", trn.seed, "run seed");
  trn.out_opt = c_train->add_option("--out", trn.out, "model.sia output");

  ProjectArgs prj;
  auto* c_project = app.add_subcommand("project", "Project a store through a model")->fallthrough();
  prj.store_opt = c_project->add_option("--store", prj.store, "store.emb input");
  prj.model_opt = c_project->add_option("--model", prj.model, "model.sia input");
  prj.out_opt = c_project->add_option("--out", prj.out, "index.lat output");

  RankArgs rnk;
  auto* c_rank = app.add_subcommand("rank", "Query top-k duplicates (CSV to stdout)")->fallthrough();
  rnk.index_opt = c_rank->add_option("--index", rnk.index, "index.lat input");
  rnk.query_opt = c_rank->add_option("--query-id", rnk.query_id, "query post id");
  rnk.text_opt = c_rank->add_option("--text", rnk.text, "free-text query (offline provider)");
  rnk.model_opt = c_rank->add_option("--model", rnk.model, "model.sia (with --text)");
  rnk.dim_opt = c_rank->add_option("--dim", rnk.dim, "offline dim (with --text)");
  rnk.seed_opt = c_rank->add_option("--seed", rnk.seed, "offline seed (with --text)");
  rnk.max_tokens_opt =
      c_rank->add_option("--max-tokens", rnk.max_tokens, "input budget (with --text)");
  rnk.k_opt = c_rank->add_option("-k,--k", rnk.k, "result count");
  rnk.filter_opt = c_rank->add_option("--tag-filter", rnk.tag_filter, "candidate tag filter")
                       ->delimiter(',');
  rnk.corpus_opt = c_rank->add_option("--corpus", rnk.corpus, "corpus.bin (with --tag-filter)");

  EvaluateArgs evl;
  auto* c_eval = app.add_subcommand("evaluate", "Top-N accuracy and AUC report")->fallthrough();
  evl.index_opt = c_eval->add_option("--index", evl.index, "index.lat input");
  evl.corpus_opt = c_eval->add_option("--corpus", evl.corpus, "corpus.bin input");
  evl.store_opt = c_eval->add_option("--store", evl.store, "store.emb (for raw/triplet/mnr)");
  evl.split_seed_opt = c_eval->add_option("--split-seed", evl.split_seed, "split seed");
  evl.seed_opt = c_eval->add_option("--seed", evl.seed, "training seed (compare mode)");
  evl.ratio_opt = c_eval->add_option("--ratio", evl.ratio, "train fraction");
  evl.compare_opt = c_eval->add_option(
      "--compare", evl.compare, "comma list of settings: raw,triplet,mnr,index");
  evl.neg_ratio_opt = c_eval->add_option("--neg-ratio", evl.neg_ratio, "AUC negatives per positive");
  evl.batch_opt = c_eval->add_option("--batch-size", evl.batch_size, "compare-mode batch size")
                      ->check(CLI::PositiveNumber);
  evl.epochs_opt = c_eval->add_option("--epochs", evl.epochs, "compare-mode epochs");
  evl.lr_opt = c_eval->add_option("--lr", evl.lr, "compare-mode learning rate");
  evl.margin_opt = c_eval->add_option("--margin", evl.margin, "compare-mode margin");
  evl.scale_opt = c_eval->add_option("--scale", evl.scale, "compare-mode scale");
  evl.out_dim_opt = c_eval->add_option("--out-dim", evl.out_dim, "compare-mode latent dim");
  evl.out_opt = c_eval->add_option("--out", evl.out, "report.json output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error class=argument message=" << e.what() << "\n";
    return 2;
  }

  try {
    ConfigLayer cfg;
    cfg.load(config_path);
    cfg.fill(threads_opt, "threads", threads);
    g_threads = threads;
    if (c_ingest->parsed()) return run_ingest(ing, cfg);
    if (c_census->parsed()) return run_census(cen, cfg);
    if (c_embed->parsed()) return run_embed(emb, cfg);
    if (c_train->parsed()) return run_train(trn, cfg);
    if (c_project->parsed()) return run_project(prj, cfg);
    if (c_rank->parsed()) return run_rank(rnk, cfg);
    if (c_eval->parsed()) return run_evaluate(evl, cfg);
    std::cerr << "error class=argument message=no subcommand\n";
    return 2;
  } catch (const dd::Error& e) {
    std::cerr << "error class=" << dd::to_string(e.klass()) << " message=" << e.what() << "\n";
    return exit_code_for(e.klass());
  } catch (const std::exception& e) {
    std::cerr << "error class=internal message=" << e.what() << "\n";
    return 1;
  }
}
