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

// Unsupervised argument typing: concept mentions whose vector is close
// enough to a predefined type vector are replaced by a typed placeholder
// (stem + per-type index), e.g. "from [[Dallas]]" -> "from ci0".

#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conceptvec/corpus.hpp"
#include "conceptvec/errors.hpp"
#include "conceptvec/model_store.hpp"

namespace conceptvec {

template <typename Scalar>
struct TypeInventory {
  struct Type {
    std::string name;
    std::string stem;
    RowVector<Scalar> vector;  // unit norm
  };

  std::vector<Type> types;
  double threshold = 0.5;
  /// Require similarity > threshold instead of >=.
  bool strict = false;

  void add(std::string name, std::string stem, const RowVector<Scalar>& v) {
    if (!(v.norm() > Scalar(0))) throw Error("type '" + name + "' has a zero vector");
    for (const auto& t : types) {
      if (t.name == name) throw Error("duplicate type name '" + name + "'");
      if (t.stem == stem) throw Error("duplicate placeholder stem '" + stem + "'");
    }
    types.push_back({std::move(name), std::move(stem), v.normalized()});
  }

  bool accepts(double similarity) const {
    return strict ? similarity > threshold : similarity >= threshold;
  }
};

/// Types file: `<type-name>\t<placeholder-stem>\t<concept-mention>` per line.
template <typename Scalar>
TypeInventory<Scalar> load_type_inventory(const EmbeddingModel<Scalar>& model, std::istream& in,
                                          double threshold, const std::string& source = {}) {
  TypeInventory<Scalar> inv;
  inv.threshold = threshold;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (std::size_t tab; (tab = line.find('\t', pos)) != std::string::npos; pos = tab + 1) {
      fields.push_back(line.substr(pos, tab - pos));
    }
    fields.push_back(line.substr(pos));
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, line_number, "expected '<type>\\t<stem>\\t<mention>'");
    }
    const auto row = lookup(model, fields[2]);
    if (!row) throw ParseError(source, line_number, "type mention '" + fields[2] + "' not in model");
    try {
      inv.add(fields[0], fields[1], RowVector<Scalar>(model.input.row(*row)));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_number, e.what());
    }
  }
  return inv;
}

template <typename Scalar>
TypeInventory<Scalar> load_type_inventory(const EmbeddingModel<Scalar>& model,
                                          const std::filesystem::path& path, double threshold) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open types '" + path.string() + "'");
  return load_type_inventory(model, in, threshold, path.string());
}

struct Binding {
  std::string placeholder;
  std::string mention;
  std::string type_name;
  double similarity = 0;
};

struct TypedUtterance {
  std::vector<Token> original;
  /// Rendered tokens: words, untouched `[[ID]]` mentions, or placeholders.
  std::vector<std::string> rewritten;
  /// One per distinct typed mention, in order of first appearance.
  std::vector<Binding> bindings;

  /// Per concept occurrence.
  std::size_t mentions = 0;
  std::size_t typed = 0;
  std::size_t skipped_oov = 0;
  std::size_t skipped_below_threshold = 0;

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < rewritten.size(); ++i) {
      if (i) out += ' ';
      out += rewritten[i];
    }
    return out;
  }
};

template <typename Scalar>
TypedUtterance type_mentions(const EmbeddingModel<Scalar>& model, const TypeInventory<Scalar>& inventory,
                             const std::vector<Token>& utterance) {
  TypedUtterance out;
  out.original = utterance;
  std::vector<std::size_t> next_index(inventory.types.size(), 0);
  std::map<std::string, std::string> assigned;  // concept key -> placeholder

  for (const auto& tok : utterance) {
    if (!tok.is_concept()) {
      out.rewritten.push_back(tok.key);
      continue;
    }
    ++out.mentions;
    if (auto it = assigned.find(tok.key); it != assigned.end()) {
      ++out.typed;
      out.rewritten.push_back(it->second);
      continue;
    }
    const auto row = lookup(model, tok.surface());
    if (!row) {
      ++out.skipped_oov;
      out.rewritten.push_back(tok.surface());
      continue;
    }
    const RowVector<Scalar> v = model.input.row(*row);
    std::size_t best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < inventory.types.size(); ++t) {
      const double sim = static_cast<double>(cosine(v, inventory.types[t].vector));
      if (sim > best_sim) {
        best_sim = sim;
        best = t;
      }
    }
    if (inventory.types.empty() || !inventory.accepts(best_sim)) {
      ++out.skipped_below_threshold;
      out.rewritten.push_back(tok.surface());
      continue;
    }
    const auto& type = inventory.types[best];
    std::string placeholder = type.stem + std::to_string(next_index[best]++);
    assigned.emplace(tok.key, placeholder);
    out.bindings.push_back({placeholder, tok.key, type.name, best_sim});
    ++out.typed;
    out.rewritten.push_back(std::move(placeholder));
  }
  return out;
}

struct ArgtypeSummary {
  std::size_t utterances = 0;
  std::size_t mentions = 0;
  std::size_t typed = 0;
  std::size_t skipped_oov = 0;
  std::size_t skipped_below_threshold = 0;
};

/// Rewrites every line of an annotated corpus, one output line per input line.
template <typename Scalar>
ArgtypeSummary type_corpus(const EmbeddingModel<Scalar>& model, const TypeInventory<Scalar>& inventory,
                           std::istream& in, std::ostream& out, const std::string& source = {}) {
  ArgtypeSummary summary;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto typed = type_mentions(model, inventory, parse_corpus_line(line, line_number, source));
    out << typed.text() << '\n';
    ++summary.utterances;
    summary.mentions += typed.mentions;
    summary.typed += typed.typed;
    summary.skipped_oov += typed.skipped_oov;
    summary.skipped_below_threshold += typed.skipped_below_threshold;
  }
  return summary;
}

template <typename Scalar>
ArgtypeSummary type_corpus(const EmbeddingModel<Scalar>& model, const TypeInventory<Scalar>& inventory,
                           const std::filesystem::path& in_path, const std::filesystem::path& out_path) {
  std::ifstream in(in_path);
  if (!in) throw Error("cannot open input '" + in_path.string() + "'");
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write output '" + out_path.string() + "'");
  auto summary = type_corpus(model, inventory, in, out, in_path.string());
  out.flush();
  if (!out) throw Error("write failed for '" + out_path.string() + "'");
  return summary;
}

}  // namespace conceptvec
