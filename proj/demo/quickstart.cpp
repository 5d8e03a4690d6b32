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

// End-to-end library walkthrough on an in-memory corpus: embed with the
// offline provider, train the shared projection head, rank duplicates for
// a post and for free text, then score the whole index. Everything is
// deterministic; run it twice and the output is identical.

#include <cstdio>
#include <vector>

#include "dupdetect/dupdetect.hpp"

namespace dd = dupdetect;

namespace {

dd::Post post(std::uint64_t id, const char* title, const char* body,
              std::vector<std::string> tags) {
  dd::Post p;
  p.id = id;
  p.title = title;
  p.body = body;
  p.tags = std::move(tags);
  return p;
}

dd::Corpus toy_corpus() {
  dd::Corpus c;
  c.posts = {
      post(1, "How do I sort a list of numbers in python",
           "I have a python list of integers and want them in ascending order.", {"python"}),
      post(2, "Sorting a python list [duplicate]",
           "What is the simplest way to sort a list of numbers in python?", {"python"}),
      post(3, "Order python list values ascending",
           "Need my python list sorted ascending, numbers only.", {"python"}),
      post(4, "What does await do in javascript",
           "Trying to understand async functions and await in javascript promises.",
           {"javascript"}),
      post(5, "javascript async await explained [duplicate]",
           "How does await work inside an async javascript function with promises?",
           {"javascript"}),
      post(6, "Why use promises in javascript",
           "Callbacks versus promises for asynchronous javascript code.", {"javascript"}),
      post(7, "Filter pandas dataframe rows by column value",
           "Select the rows of a pandas dataframe where a column equals a value.", {"pandas"}),
      post(8, "pandas dataframe row selection by value [duplicate]",
           "How do I keep only dataframe rows whose column matches a value in pandas?",
           {"pandas"}),
      post(9, "Install packages behind a proxy",
           "Package installation fails behind the corporate proxy.", {"tooling"}),
      post(10, "Read a file line by line in C",
           "What is the idiomatic way to read lines from a file in C?", {"c"}),
  };
  c.pairs = {{2, 1}, {3, 1}, {5, 4}, {8, 7}};  // duplicate -> original
  return c;
}

}  // namespace

int main() {
  const dd::Corpus corpus = toy_corpus();

  dd::ProviderConfig provider;
  provider.kind = dd::ProviderKind::offline_hash;
  provider.dim = 128;
  provider.seed = 0;
  const dd::EmbeddingStore store = dd::embed_corpus_offline(corpus, provider);
  std::printf("embedded %zu posts at dim %u\n", store.size(), store.dim());

  const dd::SplitSpec split = dd::split(corpus, 0.75, 0);

  dd::TrainingConfig cfg;  // mnr loss, scale 20, lr 5e-2 by default
  cfg.batch_size = 3;
  cfg.epochs = 40;
  cfg.out_dim = 32;
  const auto [head, log] = dd::train(corpus, split, store, cfg);
  std::printf("trained on %zu pairs: epoch loss %.4f -> %.4f\n", log.train_pairs_used,
              log.epoch_mean_loss.front(), log.epoch_mean_loss.back());

  const dd::LatentIndex index = dd::project(store, head);

  // Nearest neighbours of post 2 ("Sorting a python list").
  const dd::RankedList by_id = dd::top_k(index, 2, 3);
  std::printf("\ntop-3 candidates for post 2:\n");
  for (std::size_t i = 0; i < by_id.hits.size(); ++i) {
    std::printf("  %zu. post %llu  score %.4f\n", i + 1,
                static_cast<unsigned long long>(by_id.hits[i].id), by_id.hits[i].score);
  }

  // Same query restricted to one topic.
  const std::vector<std::string> only_python = {"python"};
  const dd::RankedList filtered = dd::top_k(index, 2, 3, only_python, &corpus);
  std::printf("top-3 within tag 'python': ");
  for (const auto& hit : filtered.hits) {
    std::printf("%llu ", static_cast<unsigned long long>(hit.id));
  }
  std::printf("\n");

  // Free text never seen by the corpus, embedded on the fly.
  const dd::RankedList by_text =
      dd::top_k_text(index, head, provider, "how can I sort numbers in a python list", 3);
  std::printf("top-3 for free text query: ");
  for (const auto& hit : by_text.hits) {
    std::printf("%llu ", static_cast<unsigned long long>(hit.id));
  }
  std::printf("\n");

  // Top-N accuracy and AUC over the held-out pairs.
  const dd::MetricsReport report = dd::evaluate_index(
      index, corpus, split.test_pairs, dd::default_top_ns(), 3, 0, "demo");
  std::printf("\nheld-out queries %zu, auc %.3f, top-1 %.2f top-5 %.2f\n", report.query_count,
              report.auc, report.top_n.at(1), report.top_n.at(5));
  return 0;
}
