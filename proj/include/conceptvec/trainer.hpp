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

// Joint skip-gram training with negative sampling over a merged stream of
// text-window pairs and concept-graph pairs. Both kinds of pair are plain
// SGD steps on the same objective, so the two likelihoods are summed with
// equal weight.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <thread>
#include <vector>

#include "conceptvec/concept_graph.hpp"
#include "conceptvec/corpus.hpp"
#include "conceptvec/errors.hpp"
#include "conceptvec/model.hpp"
#include "conceptvec/noise_table.hpp"
#include "conceptvec/random.hpp"

namespace conceptvec {

struct TrainConfig {
  int dim = 500;
  int window = 9;
  int negatives = 5;
  /// Subsampling threshold; <= 0 disables subsampling.
  double subsample_threshold = 1e-3;
  int epochs = 10;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  double noise_power = 0.75;
  std::uint64_t min_count = 5;
  std::uint64_t seed = 1;
  int workers = 1;

  bool dynamic_window = true;
  /// When false, concept tokens are never subsampled.
  bool subsample_concepts = true;
  /// Adds each edge's count to both endpoints' noise mass.
  bool noise_includes_graph = false;
  /// Per-edge count cap; 0 = uncapped.
  std::uint64_t max_edge_count = 0;

  /// Throws Error naming the first violated constraint.
  void validate() const;
};

inline void TrainConfig::validate() const {
  if (dim < 1) throw Error("dim must be >= 1");
  if (window < 1) throw Error("window must be >= 1");
  if (negatives < 1) throw Error("negatives must be >= 1");
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (!(initial_lr > 0.0)) throw Error("lr must be positive");
  if (!(min_lr > 0.0) || min_lr > initial_lr) throw Error("min-lr must be in (0, lr]");
  if (noise_power < 0.0) throw Error("noise power must be >= 0");
  if (workers < 1) throw Error("workers must be >= 1");
}

namespace detail {
// Rng stream tags.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kTextStream = 2;
inline constexpr std::uint64_t kGraphStream = 3;
inline constexpr std::uint64_t kMixStream = 4;
inline constexpr std::uint64_t kNegativeStream = 5;
}  // namespace detail

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

/// log(sigmoid(x)) without overflow for large |x|.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return x >= Scalar(0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

/// Input rows uniform in [-0.5/dim, 0.5/dim), output rows zero.
template <typename Scalar = float>
EmbeddingModel<Scalar> init_model(const Vocabulary& vocab, const TrainConfig& config) {
  if (vocab.empty()) throw Error("cannot initialize a model over an empty vocabulary");
  if (config.dim < 1) throw Error("dim must be >= 1");
  const auto rows = static_cast<Eigen::Index>(vocab.size());
  const Eigen::Index dim = config.dim;
  EmbeddingModel<Scalar> model{vocab, RowMatrix<Scalar>(rows, dim),
                               RowMatrix<Scalar>::Zero(rows, dim)};
  Rng rng = Rng::derive(config.seed, {detail::kInitStream});
  const double half = 0.5 / static_cast<double>(dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      model.input(r, c) = static_cast<Scalar>(rng.uniform(-half, half));
    }
  }
  return model;
}

/// Gradient of the negative-sampling objective
///   log s(v_c . u_t) + sum_g log s(-v_g . u_t)
/// with respect to u_t, v_c and each v_g (one entry per listed negative,
/// duplicates included), evaluated at the current parameters.
template <typename Scalar>
struct SgnsGradient {
  Scalar objective = 0;
  RowVector<Scalar> input;
  RowVector<Scalar> context;
  std::vector<RowVector<Scalar>> negatives;
};

template <typename Scalar>
SgnsGradient<Scalar> sgns_gradient(const EmbeddingModel<Scalar>& model, Ordinal target,
                                   Ordinal context, std::span<const Ordinal> negatives) {
  const auto u = model.input.row(target);
  const auto vc = model.output.row(context);
  SgnsGradient<Scalar> grad;
  const Scalar pos = vc.dot(u);
  const Scalar pos_coeff = Scalar(1) - sigmoid(pos);
  grad.objective = log_sigmoid(pos);
  grad.input = pos_coeff * vc;
  grad.context = pos_coeff * u;
  for (Ordinal g : negatives) {
    const auto vg = model.output.row(g);
    const Scalar neg = vg.dot(u);
    const Scalar neg_coeff = -sigmoid(neg);
    grad.objective += log_sigmoid(-neg);
    grad.input += neg_coeff * vg;
    grad.negatives.push_back(neg_coeff * u);
  }
  return grad;
}

/// Scratch space reused across SGD steps.
template <typename Scalar>
struct StepWorkspace {
  RowVector<Scalar> input_grad;
  std::vector<Scalar> coeff;
};

namespace detail {

[[noreturn]] inline void diverged(Ordinal target, Ordinal context, double lr) {
  std::ostringstream msg;
  msg << "non-finite value in SGD step (target=" << target << ", context=" << context
      << ", lr=" << lr << "); learning rate too high?";
  throw TrainingDiverged(msg.str());
}

}  // namespace detail

/// One gradient-ascent step on (target, context, negatives). All gradients
/// are taken at the pre-step parameters, so the update is exactly
/// lr * sgns_gradient(...). Returns the objective before the update.
/// `negatives` must not contain `context`. Throws TrainingDiverged, leaving
/// the model untouched, when a non-finite value shows up.
template <typename Scalar>
Scalar sgd_step(EmbeddingModel<Scalar>& model, Ordinal target, Ordinal context,
                std::span<const Ordinal> negatives, Scalar lr, StepWorkspace<Scalar>& ws) {
  auto u = model.input.row(target);
  ws.coeff.resize(negatives.size() + 1);

  const Scalar pos = model.output.row(context).dot(u);
  if (!std::isfinite(pos)) detail::diverged(target, context, lr);
  Scalar objective = log_sigmoid(pos);
  ws.coeff[0] = Scalar(1) - sigmoid(pos);
  ws.input_grad.noalias() = ws.coeff[0] * model.output.row(context);

  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const auto vg = model.output.row(negatives[i]);
    const Scalar neg = vg.dot(u);
    if (!std::isfinite(neg)) detail::diverged(target, context, lr);
    objective += log_sigmoid(-neg);
    ws.coeff[i + 1] = -sigmoid(neg);
    ws.input_grad.noalias() += ws.coeff[i + 1] * vg;
  }
  if (!ws.input_grad.allFinite()) detail::diverged(target, context, lr);

  model.output.row(context).noalias() += (lr * ws.coeff[0]) * u;
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    model.output.row(negatives[i]).noalias() += (lr * ws.coeff[i + 1]) * u;
  }
  u.noalias() += lr * ws.input_grad;
  return objective;
}

template <typename Scalar>
Scalar sgd_step(EmbeddingModel<Scalar>& model, Ordinal target, Ordinal context,
                std::span<const Ordinal> negatives, Scalar lr) {
  StepWorkspace<Scalar> ws;
  return sgd_step(model, target, context, negatives, lr, ws);
}

/// Draws up to `k` negatives for `context`. A draw equal to the context is
/// retried up to 8 times, then that slot is skipped. Returns skipped slots.
inline int draw_negatives(const NoiseTable& noise, Ordinal context, int k, Rng& rng,
                          std::vector<Ordinal>& out) {
  out.clear();
  int skipped = 0;
  for (int g = 0; g < k; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt <= 8; ++attempt) {
      const Ordinal w = noise.sample(rng);
      if (w != context) {
        out.push_back(w);
        placed = true;
        break;
      }
    }
    if (!placed) ++skipped;
  }
  return skipped;
}

/// Produces the pairs of one epoch. Called once per epoch, in epoch order.
using PairSource = std::function<std::vector<TokenPair>(int epoch)>;

struct TrainStats {
  std::vector<std::uint64_t> text_pairs;
  std::vector<std::uint64_t> graph_pairs;
  std::vector<std::uint64_t> steps;
  /// Mean objective per step, per epoch.
  std::vector<double> mean_objective;
  std::uint64_t skipped_negatives = 0;
  double final_lr = 0;
};

/// Runs `config.epochs` passes. Each epoch the text and graph pairs are
/// concatenated and shuffled together, then consumed one SGD step per pair.
/// The learning rate decays linearly from initial_lr to min_lr over the
/// scheduled step count (epochs x first-epoch pair count).
///
/// With workers > 1 the shuffled epoch is split into contiguous slices that
/// update the shared matrices without locking; only workers == 1 is
/// bit-reproducible.
template <typename Scalar = float>
EmbeddingModel<Scalar> train(const Vocabulary& vocab, const PairSource& text,
                             const PairSource& graph, const NoiseTable& noise,
                             const TrainConfig& config, TrainStats* stats = nullptr) {
  config.validate();
  if (noise.size() != vocab.size()) throw Error("noise table does not match vocabulary");
  EmbeddingModel<Scalar> model = init_model<Scalar>(vocab, config);

  TrainStats local;
  TrainStats& st = stats ? *stats : local;
  st = TrainStats{};

  auto next_epoch = [&](int epoch) {
    std::vector<TokenPair> merged = text ? text(epoch) : std::vector<TokenPair>{};
    const std::uint64_t n_text = merged.size();
    if (graph) {
      auto g = graph(epoch);
      merged.insert(merged.end(), g.begin(), g.end());
    }
    st.text_pairs.push_back(n_text);
    st.graph_pairs.push_back(merged.size() - n_text);
    Rng mix = Rng::derive(config.seed, {detail::kMixStream, static_cast<std::uint64_t>(epoch)});
    shuffle(merged.begin(), merged.end(), mix);
    return merged;
  };

  std::vector<TokenPair> pairs = next_epoch(0);
  if (pairs.empty()) throw Error("nothing to train on");
  const double scheduled = static_cast<double>(pairs.size()) * config.epochs;
  std::atomic<std::uint64_t> processed{0};

  auto learning_rate = [&](std::uint64_t done) {
    const double progress = std::min(1.0, static_cast<double>(done) / scheduled);
    return config.initial_lr - (config.initial_lr - config.min_lr) * progress;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch > 0) pairs = next_epoch(epoch);
    const std::size_t n = pairs.size();
    const int workers = static_cast<int>(std::min<std::size_t>(config.workers, std::max<std::size_t>(n, 1)));

    std::vector<double> objective(workers, 0.0);
    std::vector<std::uint64_t> skipped(workers, 0);
    std::vector<std::exception_ptr> failures(workers);

    auto run_slice = [&](int w) {
      try {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        Rng rng = Rng::derive(config.seed, {detail::kNegativeStream,
                                            static_cast<std::uint64_t>(epoch),
                                            static_cast<std::uint64_t>(w)});
        StepWorkspace<Scalar> ws;
        std::vector<Ordinal> negs;
        for (std::size_t i = begin; i < end; ++i) {
          const auto& p = pairs[i];
          skipped[w] += draw_negatives(noise, p.context, config.negatives, rng, negs);
          const auto lr = static_cast<Scalar>(learning_rate(processed.fetch_add(1, std::memory_order_relaxed)));
          objective[w] += static_cast<double>(sgd_step<Scalar>(model, p.target, p.context, negs, lr, ws));
        }
      } catch (...) {
        failures[w] = std::current_exception();
      }
    };

    if (workers == 1) {
      run_slice(0);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(workers);
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_slice, w);
    }
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }

    double total = 0;
    for (double o : objective) total += o;
    for (auto s : skipped) st.skipped_negatives += s;
    st.steps.push_back(n);
    st.mean_objective.push_back(n > 0 ? total / static_cast<double>(n) : 0.0);
  }
  st.final_lr = learning_rate(processed.load());
  if (!model.all_finite()) throw TrainingDiverged("model contains non-finite values after training");
  return model;
}

template <typename Scalar>
struct FitResult {
  EmbeddingModel<Scalar> model;
  std::optional<AlignmentReport> alignment;
  TrainStats stats;
};

/// Corpus (+ optional graph) to trained model: vocabulary, subsampling,
/// graph alignment, noise table, then train().
template <typename Scalar = float>
FitResult<Scalar> fit(const TokenStream& corpus, const ConceptGraph* graph,
                      const TrainConfig& config) {
  config.validate();
  Vocabulary vocab = build_vocabulary(corpus, config.min_count);
  if (vocab.empty()) throw Error("nothing to train on: vocabulary is empty");

  SubsampleTable table = config.subsample_threshold > 0.0
                             ? build_subsample_table(vocab, config.subsample_threshold,
                                                     !config.subsample_concepts)
                             : no_subsampling(vocab);
  TextContextGenerator text_gen(corpus, vocab, std::move(table),
                                {config.window, config.dynamic_window});

  std::optional<AlignedGraph> aligned;
  std::optional<GraphContextGenerator> graph_gen;
  if (graph) {
    aligned = align(*graph, vocab);
    graph_gen.emplace(aligned->graph, vocab, config.max_edge_count);
  }

  std::vector<double> noise_counts;
  noise_counts.reserve(vocab.size());
  for (const auto& e : vocab.entries()) noise_counts.push_back(static_cast<double>(e.count));
  if (graph_gen && config.noise_includes_graph) {
    for (const auto& e : graph_gen->edges()) {
      noise_counts[e.a] += static_cast<double>(e.count);
      noise_counts[e.b] += static_cast<double>(e.count);
    }
  }
  const NoiseTable noise = build_noise_table(noise_counts, config.noise_power);

  PairSource text = [&](int epoch) {
    return text_gen.generate(
        Rng::derive(config.seed, {detail::kTextStream, static_cast<std::uint64_t>(epoch)}).next());
  };
  PairSource graph_pairs;
  if (graph_gen) {
    graph_pairs = [&](int epoch) {
      return graph_gen->generate(
          Rng::derive(config.seed, {detail::kGraphStream, static_cast<std::uint64_t>(epoch)}).next());
    };
  }

  FitResult<Scalar> result{EmbeddingModel<Scalar>{}, std::nullopt, {}};
  result.model = train<Scalar>(vocab, text, graph_pairs, noise, config, &result.stats);
  if (aligned) result.alignment = aligned->report;
  return result;
}

}  // namespace conceptvec
