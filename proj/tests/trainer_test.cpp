// Copyright 2026 The conceptvec Authors. All Rights Reserved.
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

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "conceptvec/trainer.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace conceptvec;

using oracles::FdCase;
using oracles::fd_relative_error;
using oracles::random_case;
using oracles::reference_objective;
using oracles::row_of;
using oracles::vocab_with_counts;

TEST_CASE("init_model: bounds, zero output, determinism") {
  auto vocab = vocab_with_counts({5, 4, 3, 2, 1});
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.seed = 77;
  auto m1 = init_model<float>(vocab, cfg);
  auto m2 = init_model<float>(vocab, cfg);
  CHECK(m1.input.rows() == 5);
  CHECK(m1.input.cols() == 4);
  CHECK(m1.input.maxCoeff() <= 0.125f);
  CHECK(m1.input.minCoeff() >= -0.125f);
  CHECK(m1.output.isZero(0));
  CHECK(m1.input == m2.input);
  cfg.seed = 78;
  CHECK(init_model<float>(vocab, cfg).input != m1.input);
  CHECK_THROWS_AS(init_model<float>(Vocabulary{}, cfg), Error);
}

TEST_CASE("noise table: exact probabilities") {
  auto even = build_noise_table(vocab_with_counts({1, 1}), 0.75);
  CHECK(even.probability(0) == doctest::Approx(0.5));
  CHECK(even.probability(1) == doctest::Approx(0.5));

  auto skew = build_noise_table(vocab_with_counts({16, 1}), 0.75);
  CHECK(skew.probability(0) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(skew.probability(1) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(skew.cumulative().back() == 1.0);

  auto flat = build_noise_table(vocab_with_counts({100, 1}), 0.0);
  CHECK(flat.probability(0) == doctest::Approx(0.5));
}

TEST_CASE("noise table: 10^6 draws from {16, 1} land within 0.002 of 8/9") {
  auto table = build_noise_table(vocab_with_counts({16, 1}), 0.75);
  Rng rng(2024);
  std::size_t hits = 0;
  const std::size_t draws = 1'000'000;
  for (std::size_t i = 0; i < draws; ++i) hits += table.sample(rng) == 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(hits) / draws - 8.0 / 9.0) <= 0.002);
}

TEST_CASE("noise table: CDF is non-decreasing and ends at 1 (property)") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> counts;
    for (int i = 0; i < 1 + static_cast<int>(rng.below(100)); ++i) counts.push_back(static_cast<double>(rng.below(1000)));
    counts.push_back(1);
    auto t = build_noise_table(counts, rng.uniform(0.0, 1.0));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.cumulative()[i] >= t.cumulative()[i - 1]);
    CHECK(std::abs(t.cumulative().back() - 1.0) <= 1e-9);
  }
}

TEST_CASE("negative draws avoid the context") {
  auto table = build_noise_table(vocab_with_counts({1000, 1, 1}), 0.75);
  Rng rng(1);
  std::vector<Ordinal> negs;
  int skipped = 0;
  for (int i = 0; i < 1000; ++i) {
    skipped += draw_negatives(table, 0, 5, rng, negs);
    for (Ordinal g : negs) CHECK(g != 0);
  }
  // Context 0 has most of the mass, so some slots run out of retries.
  CHECK(skipped >= 0);

  auto only = build_noise_table(vocab_with_counts({1}), 0.75);
  CHECK(draw_negatives(only, 0, 5, rng, negs) == 5);
  CHECK(negs.empty());
}

TEST_CASE("sgd_step: zero vectors give (k+1) log(1/2)") {
  auto vocab = vocab_with_counts({1, 1, 1});
  EmbeddingModel<double> m{vocab, RowMatrix<double>::Zero(3, 4), RowMatrix<double>::Zero(3, 4)};
  const std::vector<Ordinal> negs{2};
  const double loss = sgd_step<double>(m, 0, 1, negs, 0.1);
  CHECK(loss == doctest::Approx(2 * std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("sgd_step: analytic gradient matches central finite differences") {
  Rng rng(31337);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    auto c = random_case(rng, 10, 5, 12);
    const auto grad = sgns_gradient(c.model, c.target, c.context, c.negatives);

    std::vector<std::vector<double>> vneg;
    for (Ordinal g : c.negatives) vneg.push_back(row_of(c.model.output, g));
    CHECK(grad.objective == doctest::Approx(reference_objective(row_of(c.model.input, c.target),
                                                                row_of(c.model.output, c.context), vneg)));
    worst = std::max(worst, fd_relative_error(c, grad, 1e-5));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("sgd_step: the update is exactly lr times the gradient") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    auto c = random_case(rng, 7, 3, 6);
    const auto grad = sgns_gradient(c.model, c.target, c.context, c.negatives);
    auto stepped = c.model;
    const double lr = 0.05;
    const double obj = sgd_step<double>(stepped, c.target, c.context, c.negatives, lr);
    CHECK(obj == doctest::Approx(grad.objective).epsilon(1e-14));

    RowMatrix<double> d_in = RowMatrix<double>::Zero(c.model.rows(), c.model.dim());
    RowMatrix<double> d_out = d_in;
    d_in.row(c.target) += lr * grad.input;
    d_out.row(c.context) += lr * grad.context;
    for (std::size_t g = 0; g < c.negatives.size(); ++g) d_out.row(c.negatives[g]) += lr * grad.negatives[g];
    CHECK(((stepped.input - c.model.input) - d_in).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((stepped.output - c.model.output) - d_out).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("sgd_step: repeated steps on a fixed example never lower the objective") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_case(rng, 10, 5, 12);
    double prev = -std::numeric_limits<double>::infinity();
    for (int step = 0; step < 200; ++step) {
      const double obj = sgd_step<double>(c.model, c.target, c.context, c.negatives, 0.01);
      CHECK(obj >= prev - 1e-12);
      prev = obj;
    }
  }
}

TEST_CASE("sgd_step: non-finite values abort without touching the model") {
  auto vocab = vocab_with_counts({1, 1, 1});
  EmbeddingModel<double> m{vocab, RowMatrix<double>::Ones(3, 2), RowMatrix<double>::Ones(3, 2)};
  m.output(1, 0) = std::numeric_limits<double>::infinity();
  const auto before = m;
  const std::vector<Ordinal> negs{2};
  CHECK_THROWS_AS(sgd_step<double>(m, 0, 1, negs, 0.1), TrainingDiverged);
  CHECK(m.input == before.input);
}

TEST_CASE("train: replays an independent scalar simulation of the update rule") {
  // Tiny joint problem run through train(), then re-run with plain vectors
  // following the same draw transcript.
  auto corpus = synthetic::parse("a b [[X]] c\nb c a [[Y]]\n[[X]] a c\n");
  auto vocab = build_vocabulary(corpus, 1);
  ConceptGraph graph;
  graph.add_edge("X", "Y", 3);

  TrainConfig cfg;
  cfg.dim = 6;
  cfg.window = 2;
  cfg.negatives = 2;
  cfg.epochs = 3;
  cfg.subsample_threshold = 0;
  cfg.min_count = 1;
  cfg.seed = 5;
  cfg.initial_lr = 0.2;

  TextContextGenerator text_gen(corpus, vocab, no_subsampling(vocab), {cfg.window, true});
  GraphContextGenerator graph_gen(graph, vocab);
  auto noise = build_noise_table(vocab, cfg.noise_power);
  PairSource text = [&](int e) {
    return text_gen.generate(Rng::derive(cfg.seed, {detail::kTextStream, (std::uint64_t)e}).next());
  };
  PairSource gpairs = [&](int e) {
    return graph_gen.generate(Rng::derive(cfg.seed, {detail::kGraphStream, (std::uint64_t)e}).next());
  };
  TrainStats stats;
  auto model = train<double>(vocab, text, gpairs, noise, cfg, &stats);

  // --- reference ---
  const std::size_t V = vocab.size();
  const std::size_t D = cfg.dim;
  std::vector<std::vector<double>> u(V, std::vector<double>(D)), v(V, std::vector<double>(D, 0.0));
  Rng init = Rng::derive(cfg.seed, {detail::kInitStream});
  for (auto& row : u)
    for (auto& x : row) x = init.uniform(-0.5 / D, 0.5 / D);
  std::size_t total = 0;
  std::size_t scheduled = 0;
  for (int e = 0; e < cfg.epochs; ++e) {
    auto pairs = text(e);
    auto g = gpairs(e);
    pairs.insert(pairs.end(), g.begin(), g.end());
    if (e == 0) scheduled = pairs.size() * cfg.epochs;
    Rng mix = Rng::derive(cfg.seed, {detail::kMixStream, (std::uint64_t)e});
    shuffle(pairs.begin(), pairs.end(), mix);
    Rng nrng = Rng::derive(cfg.seed, {detail::kNegativeStream, (std::uint64_t)e, 0});
    for (const auto& p : pairs) {
      std::vector<Ordinal> negs;
      draw_negatives(noise, p.context, cfg.negatives, nrng, negs);
      const double lr = cfg.initial_lr - (cfg.initial_lr - cfg.min_lr) * std::min(1.0, double(total) / scheduled);
      ++total;
      std::vector<std::pair<Ordinal, double>> outs{{p.context, 1.0}};
      for (Ordinal n : negs) outs.push_back({n, 0.0});
      std::vector<double> coeff;
      std::vector<double> gu(D, 0.0);
      for (auto [row, label] : outs) {
        double dot = 0;
        for (std::size_t j = 0; j < D; ++j) dot += v[row][j] * u[p.target][j];
        const double c = label - 1.0 / (1.0 + std::exp(-dot));
        coeff.push_back(c);
        for (std::size_t j = 0; j < D; ++j) gu[j] += c * v[row][j];
      }
      for (std::size_t o = 0; o < outs.size(); ++o)
        for (std::size_t j = 0; j < D; ++j) v[outs[o].first][j] += lr * coeff[o] * u[p.target][j];
      for (std::size_t j = 0; j < D; ++j) u[p.target][j] += lr * gu[j];
    }
  }
  double diff = 0;
  for (std::size_t r = 0; r < V; ++r)
    for (std::size_t j = 0; j < D; ++j) {
      diff = std::max(diff, std::abs(u[r][j] - model.input(r, j)));
      diff = std::max(diff, std::abs(v[r][j] - model.output(r, j)));
    }
  CHECK(diff < 1e-12);
  CHECK(stats.steps.size() == 3);
}

TEST_CASE("train: steps per epoch equal text pairs plus graph pairs") {
  auto data = synthetic::two_clusters({.documents = 200, .seed = 3});
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.window = 3;
  cfg.epochs = 3;
  cfg.min_count = 1;
  cfg.seed = 9;

  auto text_only = fit<float>(data.corpus, nullptr, cfg);
  auto joint = fit<float>(data.corpus, &data.graph, cfg);
  for (int e = 0; e < cfg.epochs; ++e) {
    CHECK(text_only.stats.graph_pairs[e] == 0);
    CHECK(text_only.stats.steps[e] == text_only.stats.text_pairs[e]);
    CHECK(joint.stats.steps[e] == joint.stats.text_pairs[e] + joint.stats.graph_pairs[e]);
    CHECK(joint.stats.graph_pairs[e] == 2 * data.graph.total_weight());
  }
  // Same seed, same text stream.
  CHECK(joint.stats.text_pairs == text_only.stats.text_pairs);
}

TEST_CASE("train: single-worker runs are bit-identical; all entries finite") {
  auto data = synthetic::two_clusters({.documents = 150, .seed = 4});
  TrainConfig cfg;
  cfg.dim = 12;
  cfg.window = 4;
  cfg.epochs = 2;
  cfg.min_count = 1;
  cfg.seed = 21;
  auto a = fit<float>(data.corpus, &data.graph, cfg);
  auto b = fit<float>(data.corpus, &data.graph, cfg);
  CHECK(a.model.input == b.model.input);
  CHECK(a.model.output == b.model.output);
  CHECK(a.model.all_finite());
  cfg.seed = 22;
  CHECK(fit<float>(data.corpus, &data.graph, cfg).model.input != a.model.input);
}

TEST_CASE("train: multi-worker run stays finite and consumes every pair") {
  auto data = synthetic::two_clusters({.documents = 200, .seed = 6});
  TrainConfig cfg;
  cfg.dim = 16;
  cfg.window = 4;
  cfg.epochs = 2;
  cfg.min_count = 1;
  cfg.workers = 3;
  auto r = fit<float>(data.corpus, &data.graph, cfg);
  CHECK(r.model.all_finite());
  for (std::size_t e = 0; e < r.stats.steps.size(); ++e) {
    CHECK(r.stats.steps[e] == r.stats.text_pairs[e] + r.stats.graph_pairs[e]);
  }
}

TEST_CASE("train: errors") {
  auto vocab = vocab_with_counts({3, 2});
  auto noise = build_noise_table(vocab, 0.75);
  TrainConfig cfg;
  cfg.dim = 4;
  PairSource empty = [](int) { return std::vector<TokenPair>{}; };
  CHECK_THROWS_WITH_AS(train<float>(vocab, empty, empty, noise, cfg), "nothing to train on", Error);
  CHECK_THROWS_WITH_AS(train<float>(vocab, empty, PairSource{}, noise, cfg), "nothing to train on", Error);

  cfg.min_lr = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.dim = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  auto corpus = synthetic::parse("a b a b\n");
  TrainConfig fit_cfg;
  fit_cfg.min_count = 10;
  CHECK_THROWS_AS(fit<float>(corpus, nullptr, fit_cfg), Error);
}

TEST_CASE("train: absurd learning rate is reported as divergence") {
  auto data = synthetic::two_clusters({.documents = 50, .seed = 1});
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 5;
  cfg.min_count = 1;
  cfg.initial_lr = 1e30;
  cfg.min_lr = 1e29;
  CHECK_THROWS_AS(fit<float>(data.corpus, &data.graph, cfg), TrainingDiverged);
}

namespace {

struct EdgeRun {
  double uu, uv_ab, uv_ba;
  TrainStats stats;
};

// Graph-only training on the single edge (A,B,50) with `fillers` extra
// words in the vocabulary that only ever serve as negatives.
EdgeRun train_single_edge(int fillers, std::uint64_t seed) {
  std::string text = "[[A]] [[B]]\n";
  for (int i = 0; i < fillers; ++i) text += "f" + std::to_string(i) + " ";
  auto corpus = synthetic::parse(text + "\n");
  auto vocab = build_vocabulary(corpus, 1);
  ConceptGraph graph;
  graph.add_edge("A", "B", 50);

  TrainConfig cfg;
  cfg.dim = 10;
  cfg.epochs = 10;
  cfg.min_count = 1;
  cfg.seed = seed;
  GraphContextGenerator gen(graph, vocab);
  auto noise = build_noise_table(vocab, cfg.noise_power);
  PairSource gpairs = [&](int e) { return gen.generate(seed * 100 + static_cast<std::uint64_t>(e)); };
  EdgeRun run;
  auto model = train<double>(vocab, PairSource{}, gpairs, noise, cfg, &run.stats);
  const Ordinal a = *vocab.find(Token::concept_id("A"));
  const Ordinal b = *vocab.find(Token::concept_id("B"));
  run.uu = cosine(model.input.row(a), model.input.row(b));
  run.uv_ab = cosine(model.input.row(a), model.output.row(b));
  run.uv_ba = cosine(model.input.row(b), model.output.row(a));
  return run;
}

}  // namespace

TEST_CASE("train: graph-only training on a single heavy edge") {
  // With filler negatives, both endpoints are pushed away from the same
  // noise vectors and toward each other's context vector, so their input
  // vectors end up close. Over ten seeds the cosine settles near 0.84.
  double mean = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto run = train_single_edge(20, seed);
    CHECK(run.uu > 0.6);
    CHECK(run.uv_ab > 0.7);
    CHECK(run.uv_ba > 0.7);
    CHECK(run.stats.mean_objective.back() > run.stats.mean_objective.front());
    mean += run.uu / 10;
  }
  CHECK(mean > 0.75);
}

TEST_CASE("train: a two-token vocabulary pushes the endpoints apart") {
  // Every negative drawn for context B is A and vice versa, so the input
  // vectors are driven to opposite sides.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto run = train_single_edge(0, seed);
    CHECK(run.uu < -0.5);
    CHECK(run.uv_ab > 0.5);
  }
}
