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

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conceptvec/corpus.hpp"
#include "conceptvec/vocabulary.hpp"

namespace conceptvec {

/// Undirected edge in canonical form: a < b.
struct ConceptEdge {
  std::string a;
  std::string b;
  std::uint64_t count = 0;

  friend bool operator==(const ConceptEdge&, const ConceptEdge&) = default;
};

/// Weighted undirected concept graph with per-concept totals.
///
/// Edges are kept sorted by (a, b) with no duplicates. Totals come from the
/// source KB and are not tied to edge sums.
class ConceptGraph {
 public:
  /// Adds or merges (sums) an edge. Throws Error on a self-loop or zero count.
  void add_edge(const std::string& x, const std::string& y, std::uint64_t count);

  void set_total(const std::string& concept_key, std::uint64_t total) { totals_[concept_key] = total; }

  const std::set<std::string>& concepts() const noexcept { return concepts_; }
  std::vector<ConceptEdge> edges() const;
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::map<std::string, std::uint64_t>& concept_totals() const noexcept { return totals_; }

  /// Sum of edge counts.
  std::uint64_t total_weight() const noexcept;

  friend bool operator==(const ConceptGraph&, const ConceptGraph&) = default;

 private:
  std::set<std::string> concepts_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> edges_;
  std::map<std::string, std::uint64_t> totals_;
};

/// Reads `<a>\t<b>\t<count>` lines. Reverse-direction duplicates merge.
ConceptGraph parse_graph(std::istream& in, const std::string& source = {});
ConceptGraph parse_graph(const std::filesystem::path& path);

/// Reads `<concept>\t<total>` lines into `graph`.
void load_concept_totals(ConceptGraph& graph, std::istream& in, const std::string& source = {});
void load_concept_totals(ConceptGraph& graph, const std::filesystem::path& path);

struct AlignmentReport {
  std::uint64_t matched = 0;
  std::uint64_t dropped_edges = 0;
  std::uint64_t dropped_concepts = 0;
};

struct AlignedGraph {
  ConceptGraph graph;
  AlignmentReport report;
};

/// Induced subgraph on concepts whose key exactly matches a Concept token in
/// `vocab`.
AlignedGraph align(const ConceptGraph& graph, const Vocabulary& vocab);

/// Expands edges into (a,b) and (b,a) pairs, `count` times each, and
/// shuffles them per call.
class GraphContextGenerator {
 public:
  /// `max_edge_count` caps the per-edge count; 0 means uncapped. Throws
  /// Error if an endpoint is missing from `vocab` (graph not aligned).
  GraphContextGenerator(const ConceptGraph& graph, const Vocabulary& vocab,
                        std::uint64_t max_edge_count = 0);

  /// Pairs per call: 2 * sum of (capped) edge counts.
  std::uint64_t pairs_per_epoch() const noexcept { return pairs_per_epoch_; }

  std::vector<TokenPair> generate(std::uint64_t seed) const;

  /// (a, b, capped count) in ordinal space, canonical edge order.
  struct ResolvedEdge {
    Ordinal a;
    Ordinal b;
    std::uint64_t count;
  };
  const std::vector<ResolvedEdge>& edges() const noexcept { return edges_; }

 private:
  std::vector<ResolvedEdge> edges_;
  std::uint64_t pairs_per_epoch_ = 0;
};

std::vector<TokenPair> generate_graph_contexts(const ConceptGraph& graph, const Vocabulary& vocab,
                                               std::uint64_t seed,
                                               std::uint64_t max_edge_count = 0);

}  // namespace conceptvec
