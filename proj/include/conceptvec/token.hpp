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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace conceptvec {

/// Row index into a vocabulary / embedding matrix.
using Ordinal = std::uint32_t;

/// Reserved prefix separating concept keys from word keys in encoded form.
/// It only ever appears in model files.
inline constexpr std::string_view kConceptPrefix = "\xC2\xA7" "c" "\xC2\xA7";  // "§c§"

enum class TokenKind : std::uint8_t { Word, Concept };

/// A corpus unit: either a lowercased word or a canonical concept ID.
struct Token {
  TokenKind kind = TokenKind::Word;
  std::string key;

  static Token word(std::string key) { return {TokenKind::Word, std::move(key)}; }
  static Token concept_id(std::string key) { return {TokenKind::Concept, std::move(key)}; }

  bool is_concept() const noexcept { return kind == TokenKind::Concept; }

  /// Namespaced form used as the vocabulary key and in model files.
  std::string encoded() const;

  /// Inverse of encoded().
  static Token decode(std::string_view encoded);

  /// Corpus-format rendering: `[[ID]]` for concepts, the word otherwise.
  std::string surface() const;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

/// True when `id` is a legal concept ID: non-empty, [A-Za-z0-9_():,.\-']+.
bool is_valid_concept_id(std::string_view id) noexcept;

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string ascii_lower(std::string_view s);

/// Mention normal form used for concept resolution and answer matching:
/// spaces become underscores, then ASCII lowercase.
std::string fold_mention(std::string_view mention);

}  // namespace conceptvec
