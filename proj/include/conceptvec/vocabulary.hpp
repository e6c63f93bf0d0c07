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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "conceptvec/token.hpp"

namespace conceptvec {

/// Immutable token -> ordinal table with occurrence counts.
///
/// Ordinals are positions in `entries()`. A vocabulary built from a corpus is
/// ordered by descending count (ties by encoded key); one loaded from a
/// model file keeps file order.
class Vocabulary {
 public:
  struct Entry {
    Token token;
    std::uint64_t count = 0;
  };

  Vocabulary() = default;

  /// Takes entries in their final order. Throws Error on duplicate tokens.
  explicit Vocabulary(std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry& operator[](Ordinal i) const { return entries_[i]; }
  const Token& token(Ordinal i) const { return entries_[i].token; }
  std::uint64_t count(Ordinal i) const { return entries_[i].count; }

  /// Sum of all counts.
  std::uint64_t total_tokens() const noexcept { return total_; }

  std::optional<Ordinal> find(const Token& token) const { return find_encoded(token.encoded()); }
  std::optional<Ordinal> find_encoded(const std::string& encoded) const;

  /// Concept whose fold_mention(key) equals `folded`; the lowest ordinal wins
  /// when several keys fold together.
  std::optional<Ordinal> find_concept_folded(const std::string& folded) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, Ordinal> index_;
  std::unordered_map<std::string, Ordinal> folded_concepts_;
  std::uint64_t total_ = 0;
};

}  // namespace conceptvec
