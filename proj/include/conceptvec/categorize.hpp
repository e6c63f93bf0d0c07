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

// Concept categorization: nearest-prototype (Rocchio) assignment, and the
// bootstrapped variant that folds the most confident instances back into
// their category vectors round by round.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conceptvec/errors.hpp"
#include "conceptvec/model_store.hpp"

namespace conceptvec {

template <typename Scalar>
struct LabeledDataset {
  struct Item {
    std::string key;
    RowVector<Scalar> vector;
  };

  std::vector<Item> labels;
  std::vector<Item> instances;
  /// instance key -> label key; used only for scoring.
  std::map<std::string, std::string> gold;
};

struct Assignment {
  /// (instance key, label key) in the order assignments were made.
  std::vector<std::pair<std::string, std::string>> pairs;
  int rounds = 0;

  /// instance key -> label key.
  std::map<std::string, std::string> as_map() const {
    return {pairs.begin(), pairs.end()};
  }
};

namespace detail {

template <typename Scalar>
void check_dataset(const LabeledDataset<Scalar>& data) {
  if (data.labels.empty()) throw Error("categorization needs at least one label");
  if (data.instances.empty()) throw Error("categorization needs at least one instance");
  std::set<std::string> seen;
  for (const auto& l : data.labels) {
    if (!seen.insert(l.key).second) throw Error("duplicate label '" + l.key + "'");
    if (!(l.vector.norm() > Scalar(0))) throw Error("label '" + l.key + "' has a zero vector");
  }
  seen.clear();
  for (const auto& d : data.instances) {
    if (!seen.insert(d.key).second) throw Error("duplicate instance '" + d.key + "'");
    if (!(d.vector.norm() > Scalar(0))) throw Error("instance '" + d.key + "' has a zero vector");
  }
}

// Index of the most similar prototype; the first maximum wins.
template <typename Scalar>
std::pair<std::size_t, Scalar> best_label(const std::vector<RowVector<Scalar>>& prototypes,
                                          const RowVector<Scalar>& v) {
  std::size_t best = 0;
  Scalar best_sim = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t l = 0; l < prototypes.size(); ++l) {
    const Scalar sim = cosine(v, prototypes[l]);
    if (sim > best_sim) {
      best_sim = sim;
      best = l;
    }
  }
  return {best, best_sim};
}

}  // namespace detail

/// Single pass: every instance goes to its cosine-nearest label.
template <typename Scalar>
Assignment rocchio_classify(const LabeledDataset<Scalar>& data) {
  detail::check_dataset(data);
  std::vector<RowVector<Scalar>> prototypes;
  for (const auto& l : data.labels) prototypes.push_back(l.vector);
  Assignment out;
  out.rounds = 1;
  for (const auto& d : data.instances) {
    out.pairs.emplace_back(d.key, data.labels[detail::best_label(prototypes, d.vector).first].key);
  }
  return out;
}

/// Bootstrapped classification.
///
/// Label vectors start unit-normalized. Each round, every unassigned
/// instance is scored against the round-start label vectors and becomes a
/// candidate of its best label. Then, label by label in list order, up to
/// `n_per_round` candidates with the highest scores (ties: earlier instance)
/// are assigned, and each one updates the label as u <- normalize(u + v).
/// Candidates over the cap stay unassigned for the next round.
///
/// `final_labels`, when given, receives the label vectors at the end.
template <typename Scalar>
Assignment bootstrap_classify(const LabeledDataset<Scalar>& data, std::size_t n_per_round,
                              std::vector<RowVector<Scalar>>* final_labels = nullptr) {
  detail::check_dataset(data);
  if (n_per_round < 1) throw Error("bootstrap size must be >= 1");

  std::vector<RowVector<Scalar>> prototypes;
  for (const auto& l : data.labels) prototypes.push_back(l.vector.normalized());

  std::vector<std::size_t> remaining(data.instances.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  Assignment out;
  struct Candidate {
    std::size_t instance;
    Scalar score;
  };
  while (!remaining.empty()) {
    ++out.rounds;
    std::vector<std::vector<Candidate>> candidates(prototypes.size());
    for (std::size_t d : remaining) {
      const auto [label, sim] = detail::best_label(prototypes, data.instances[d].vector);
      candidates[label].push_back({d, sim});
    }

    std::vector<bool> absorbed(data.instances.size(), false);
    for (std::size_t l = 0; l < prototypes.size(); ++l) {
      auto& list = candidates[l];
      // Stable: equal scores keep instance order.
      std::stable_sort(list.begin(), list.end(),
                       [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
      const std::size_t take = std::min(n_per_round, list.size());
      for (std::size_t i = 0; i < take; ++i) {
        const auto& inst = data.instances[list[i].instance];
        out.pairs.emplace_back(inst.key, data.labels[l].key);
        prototypes[l] = (prototypes[l] + inst.vector).normalized();
        absorbed[list[i].instance] = true;
      }
    }
    std::erase_if(remaining, [&](std::size_t d) { return absorbed[d]; });
  }
  if (final_labels) *final_labels = std::move(prototypes);
  return out;
}

/// Fraction of assigned instances whose label equals the gold label. Throws
/// Error when an assigned instance has no gold entry.
inline double score_categorization(const Assignment& assign,
                                   const std::map<std::string, std::string>& gold) {
  if (assign.pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& [instance, label] : assign.pairs) {
    auto it = gold.find(instance);
    if (it == gold.end()) throw Error("no gold label for instance '" + instance + "'");
    if (it->second == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(assign.pairs.size());
}

/// Dataset built from files, plus the dataset rows whose instance mention
/// did not resolve in the model.
template <typename Scalar>
struct CategorizationInput {
  LabeledDataset<Scalar> data;
  std::vector<std::string> unresolved;
};

/// Labels file: one category mention per line. Dataset file:
/// `<instance-mention>\t<gold-category-mention>` per line. Label keys are the
/// mentions as written; gold categories match labels under mention folding.
/// Unresolvable labels or unknown gold categories are errors; unresolvable
/// instances are reported in `unresolved`.
template <typename Scalar>
CategorizationInput<Scalar> load_categorization(const EmbeddingModel<Scalar>& model,
                                                std::istream& dataset, std::istream& labels,
                                                const std::string& dataset_source = {},
                                                const std::string& labels_source = {}) {
  CategorizationInput<Scalar> out;
  std::map<std::string, std::string> label_by_fold;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(labels, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto row = lookup(model, line);
    if (!row) throw ParseError(labels_source, line_number, "label '" + line + "' not in model");
    if (!label_by_fold.emplace(fold_mention(line), line).second) {
      throw ParseError(labels_source, line_number, "duplicate label '" + line + "'");
    }
    out.data.labels.push_back({line, RowVector<Scalar>(model.input.row(*row))});
  }

  line_number = 0;
  std::set<std::string> seen;
  while (std::getline(dataset, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(dataset_source, line_number, "expected '<instance>\\t<category>'");
    }
    const std::string instance = line.substr(0, tab);
    const std::string category = line.substr(tab + 1);
    auto label = label_by_fold.find(fold_mention(category));
    if (label == label_by_fold.end()) {
      throw ParseError(dataset_source, line_number, "category '" + category + "' is not a listed label");
    }
    if (!seen.insert(instance).second) {
      throw ParseError(dataset_source, line_number, "duplicate instance '" + instance + "'");
    }
    const auto row = lookup(model, instance);
    if (!row) {
      out.unresolved.push_back(instance);
      continue;
    }
    out.data.instances.push_back({instance, RowVector<Scalar>(model.input.row(*row))});
    out.data.gold[instance] = label->second;
  }
  return out;
}

template <typename Scalar>
CategorizationInput<Scalar> load_categorization(const EmbeddingModel<Scalar>& model,
                                                const std::filesystem::path& dataset,
                                                const std::filesystem::path& labels) {
  std::ifstream d(dataset);
  if (!d) throw Error("cannot open dataset '" + dataset.string() + "'");
  std::ifstream l(labels);
  if (!l) throw Error("cannot open labels '" + labels.string() + "'");
  return load_categorization(model, d, l, dataset.string(), labels.string());
}

}  // namespace conceptvec
