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

#include "conceptvec/concept_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>

#include "conceptvec/errors.hpp"
#include "conceptvec/random.hpp"

namespace conceptvec {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = line.find('\t', pos);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Signed parse first so "-3" reports as non-positive rather than garbage.
std::int64_t parse_count(std::string_view field, const std::string& source, std::size_t line) {
  std::int64_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(source, line, "invalid count '" + std::string(field) + "'");
  }
  return value;
}

void check_concept_key(std::string_view key, const std::string& source, std::size_t line) {
  if (!is_valid_concept_id(key)) {
    throw ParseError(source, line, "invalid concept key '" + std::string(key) + "'");
  }
}

}  // namespace

void ConceptGraph::add_edge(const std::string& x, const std::string& y, std::uint64_t count) {
  if (x == y) throw Error("self-loop on '" + x + "'");
  if (count == 0) throw Error("edge count must be positive");
  auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
  concepts_.insert(x);
  concepts_.insert(y);
  edges_[std::move(key)] += count;
}

std::vector<ConceptEdge> ConceptGraph::edges() const {
  std::vector<ConceptEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, count] : edges_) out.push_back({key.first, key.second, count});
  return out;
}

std::uint64_t ConceptGraph::total_weight() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : edges_) sum += count;
  return sum;
}

ConceptGraph parse_graph(std::istream& in, const std::string& source) {
  ConceptGraph graph;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (is_blank(view)) continue;

    const auto fields = split_tabs(view);
    if (fields.size() != 3) {
      throw ParseError(source, line_number, "expected 3 tab-separated fields, found " +
                                                std::to_string(fields.size()));
    }
    check_concept_key(fields[0], source, line_number);
    check_concept_key(fields[1], source, line_number);
    const std::int64_t count = parse_count(fields[2], source, line_number);
    if (count <= 0) {
      throw ParseError(source, line_number, "non-positive count " + std::to_string(count));
    }
    if (fields[0] == fields[1]) {
      throw ParseError(source, line_number, "self-loop at line " + std::to_string(line_number));
    }
    graph.add_edge(std::string(fields[0]), std::string(fields[1]),
                   static_cast<std::uint64_t>(count));
  }
  return graph;
}

ConceptGraph parse_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph '" + path.string() + "'");
  return parse_graph(in, path.string());
}

void load_concept_totals(ConceptGraph& graph, std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (is_blank(view)) continue;

    const auto fields = split_tabs(view);
    if (fields.size() != 2) {
      throw ParseError(source, line_number, "expected 2 tab-separated fields, found " +
                                                std::to_string(fields.size()));
    }
    check_concept_key(fields[0], source, line_number);
    const std::int64_t total = parse_count(fields[1], source, line_number);
    if (total < 0) throw ParseError(source, line_number, "negative total");
    graph.set_total(std::string(fields[0]), static_cast<std::uint64_t>(total));
  }
}

void load_concept_totals(ConceptGraph& graph, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open totals '" + path.string() + "'");
  load_concept_totals(graph, in, path.string());
}

AlignedGraph align(const ConceptGraph& graph, const Vocabulary& vocab) {
  AlignedGraph out;
  std::set<std::string> kept;
  for (const auto& c : graph.concepts()) {
    if (vocab.find(Token::concept_id(c))) {
      kept.insert(c);
      ++out.report.matched;
    } else {
      ++out.report.dropped_concepts;
    }
  }
  for (const auto& e : graph.edges()) {
    if (kept.contains(e.a) && kept.contains(e.b)) {
      out.graph.add_edge(e.a, e.b, e.count);
    } else {
      ++out.report.dropped_edges;
    }
  }
  for (const auto& [c, total] : graph.concept_totals()) {
    if (kept.contains(c)) out.graph.set_total(c, total);
  }
  return out;
}

GraphContextGenerator::GraphContextGenerator(const ConceptGraph& graph, const Vocabulary& vocab,
                                             std::uint64_t max_edge_count) {
  for (const auto& e : graph.edges()) {
    const auto a = vocab.find(Token::concept_id(e.a));
    const auto b = vocab.find(Token::concept_id(e.b));
    if (!a || !b) {
      throw Error("graph concept '" + (a ? e.b : e.a) +
                  "' is not in the vocabulary; align the graph first");
    }
    const std::uint64_t n = max_edge_count > 0 ? std::min(e.count, max_edge_count) : e.count;
    edges_.push_back({*a, *b, n});
    pairs_per_epoch_ += 2 * n;
  }
}

std::vector<TokenPair> GraphContextGenerator::generate(std::uint64_t seed) const {
  std::vector<TokenPair> pairs;
  pairs.reserve(pairs_per_epoch_);
  for (const auto& e : edges_) {
    for (std::uint64_t i = 0; i < e.count; ++i) {
      pairs.push_back({e.a, e.b});
      pairs.push_back({e.b, e.a});
    }
  }
  Rng rng(seed);
  shuffle(pairs.begin(), pairs.end(), rng);
  return pairs;
}

std::vector<TokenPair> generate_graph_contexts(const ConceptGraph& graph, const Vocabulary& vocab,
                                               std::uint64_t seed, std::uint64_t max_edge_count) {
  return GraphContextGenerator(graph, vocab, max_edge_count).generate(seed);
}

}  // namespace conceptvec
