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

#include "conceptvec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "conceptvec/errors.hpp"
#include "conceptvec/random.hpp"

namespace conceptvec {

std::size_t TokenStream::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

std::vector<Token> parse_corpus_line(std::string_view line, std::size_t line_number,
                                     const std::string& source) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t end = line.find_first_of(" \t", pos);
    const std::string_view piece = line.substr(pos, end == std::string_view::npos ? end : end - pos);
    pos = end == std::string_view::npos ? line.size() : end + 1;
    if (piece.empty()) continue;

    if (piece.starts_with("[[")) {
      if (piece.size() < 5 || !piece.ends_with("]]")) {
        throw ParseError(source, line_number, "malformed concept marker '" + std::string(piece) + "'");
      }
      const std::string_view id = piece.substr(2, piece.size() - 4);
      if (!is_valid_concept_id(id)) {
        throw ParseError(source, line_number, "invalid concept id '" + std::string(id) + "'");
      }
      tokens.push_back(Token::concept_id(std::string(id)));
      continue;
    }
    if (piece.find("[[") != std::string_view::npos || piece.find("]]") != std::string_view::npos) {
      throw ParseError(source, line_number, "malformed concept marker '" + std::string(piece) + "'");
    }
    if (piece.starts_with(kConceptPrefix)) {
      throw ParseError(source, line_number, "word uses the reserved concept prefix");
    }
    tokens.push_back(Token::word(ascii_lower(piece)));
  }
  return tokens;
}

TokenStream parse_corpus(std::istream& in, const std::string& source) {
  TokenStream stream;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    stream.documents.push_back(parse_corpus_line(line, line_number, source));
  }
  return stream;
}

TokenStream parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus '" + path.string() + "'");
  return parse_corpus(in, path.string());
}

Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& doc : stream.documents) {
    for (const auto& tok : doc) ++counts[tok.encoded()];
  }

  std::vector<Vocabulary::Entry> entries;
  entries.reserve(counts.size());
  for (auto& [key, count] : counts) {
    if (count >= min_count) entries.push_back({Token::decode(key), count});
  }
  // counts is key-ordered already, so a stable sort on count yields the
  // (count desc, key asc) order.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  return Vocabulary(std::move(entries));
}

bool SubsampleTable::keeps_everything() const noexcept {
  return std::all_of(keep_probability.begin(), keep_probability.end(),
                     [](double p) { return p >= 1.0; });
}

SubsampleTable build_subsample_table(const Vocabulary& vocab, double threshold,
                                     bool exempt_concepts) {
  if (!(threshold > 0.0)) throw Error("subsample threshold must be positive");
  SubsampleTable table;
  table.keep_probability.resize(vocab.size(), 1.0);
  const double total = static_cast<double>(vocab.total_tokens());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& e = vocab.entries()[i];
    if (exempt_concepts && e.token.is_concept()) continue;
    const double f = static_cast<double>(e.count) / total;
    if (f > threshold) table.keep_probability[i] = std::sqrt(threshold / f);
  }
  return table;
}

SubsampleTable no_subsampling(const Vocabulary& vocab) {
  return SubsampleTable{std::vector<double>(vocab.size(), 1.0)};
}

TextContextGenerator::TextContextGenerator(const TokenStream& stream, const Vocabulary& vocab,
                                           SubsampleTable table, WindowOptions options)
    : table_(std::move(table)), options_(options) {
  if (options_.window < 1) throw Error("window must be >= 1");
  if (table_.keep_probability.size() != vocab.size()) {
    throw Error("subsample table does not match vocabulary");
  }
  docs_.reserve(stream.documents.size());
  for (const auto& doc : stream.documents) {
    std::vector<Ordinal> encoded;
    encoded.reserve(doc.size());
    for (const auto& tok : doc) {
      if (auto ord = vocab.find(tok)) encoded.push_back(*ord);
    }
    docs_.push_back(std::move(encoded));
  }
}

std::vector<TokenPair> TextContextGenerator::generate(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<TokenPair> pairs;
  std::vector<Ordinal> kept;
  const auto window = static_cast<std::uint64_t>(options_.window);
  for (const auto& doc : docs_) {
    kept.clear();
    for (Ordinal t : doc) {
      const double keep = table_.keep_probability[t];
      if (keep >= 1.0 || rng.uniform() < keep) kept.push_back(t);
    }
    const auto n = static_cast<std::int64_t>(kept.size());
    for (std::int64_t i = 0; i < n; ++i) {
      const auto b = static_cast<std::int64_t>(options_.dynamic ? 1 + rng.below(window) : window);
      const std::int64_t lo = std::max<std::int64_t>(0, i - b);
      const std::int64_t hi = std::min<std::int64_t>(n - 1, i + b);
      for (std::int64_t j = lo; j <= hi; ++j) {
        if (j != i) pairs.push_back({kept[i], kept[j]});
      }
    }
  }
  return pairs;
}

std::vector<TokenPair> generate_text_contexts(const TokenStream& stream, const Vocabulary& vocab,
                                              const SubsampleTable& table, WindowOptions options,
                                              std::uint64_t seed) {
  return TextContextGenerator(stream, vocab, table, options).generate(seed);
}

}  // namespace conceptvec
