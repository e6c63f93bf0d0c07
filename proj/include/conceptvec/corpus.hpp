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

// Annotated corpus ingestion and skip-gram context generation.
//
// Corpus format: UTF-8, one document per line, space separated tokens.
// `[[ID]]` is a concept mention, anything else is a word (lowercased).

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/token.hpp"
#include "conceptvec/vocabulary.hpp"

namespace conceptvec {

struct TokenStream {
  std::vector<std::vector<Token>> documents;

  std::size_t token_count() const noexcept;
};

/// (target, context) training example.
struct TokenPair {
  Ordinal target = 0;
  Ordinal context = 0;

  friend bool operator==(const TokenPair&, const TokenPair&) = default;
  friend auto operator<=>(const TokenPair&, const TokenPair&) = default;
};

/// Tokenizes one corpus line. Throws ParseError (carrying `line_number`) on a
/// malformed concept marker or a word using the reserved concept prefix.
std::vector<Token> parse_corpus_line(std::string_view line, std::size_t line_number = 0,
                                     const std::string& source = {});

TokenStream parse_corpus(std::istream& in, const std::string& source = {});
TokenStream parse_corpus(const std::filesystem::path& path);

/// Exact counts; drops tokens below `min_count`; orders by descending count,
/// then encoded key.
Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_count);

/// Per-ordinal keep probability, min(1, sqrt(threshold / f)) with
/// f = count / total_tokens.
struct SubsampleTable {
  std::vector<double> keep_probability;

  bool keeps_everything() const noexcept;
};

/// `exempt_concepts` pins concept keep probabilities to 1.
SubsampleTable build_subsample_table(const Vocabulary& vocab, double threshold,
                                     bool exempt_concepts = false);

/// Table that never drops anything.
SubsampleTable no_subsampling(const Vocabulary& vocab);

struct WindowOptions {
  int window = 9;
  /// Draw a per-position effective window uniformly from [1, window].
  bool dynamic = true;
};

/// Replays windowed text contexts over a fixed, vocabulary-encoded corpus.
///
/// Random draw order for one call of `generate` (this is the transcript an
/// independent replay must follow):
///   for each document, in order:
///     for each in-vocabulary token whose keep probability is < 1:
///       one `uniform()`; the token survives iff the draw < keep probability
///     for each surviving position i, in order:
///       if dynamic: b = 1 + below(window), else b = window
///       emit (s[i], s[j]) for j = i-b .. i+b, j != i, inside the document
class TextContextGenerator {
 public:
  TextContextGenerator(const TokenStream& stream, const Vocabulary& vocab, SubsampleTable table,
                       WindowOptions options);

  std::vector<TokenPair> generate(std::uint64_t seed) const;

  const std::vector<std::vector<Ordinal>>& encoded_documents() const noexcept { return docs_; }

 private:
  std::vector<std::vector<Ordinal>> docs_;
  SubsampleTable table_;
  WindowOptions options_;
};

std::vector<TokenPair> generate_text_contexts(const TokenStream& stream, const Vocabulary& vocab,
                                              const SubsampleTable& table, WindowOptions options,
                                              std::uint64_t seed);

}  // namespace conceptvec
