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

#include "conceptvec/token.hpp"

namespace conceptvec {

std::string Token::encoded() const {
  if (kind == TokenKind::Word) return key;
  std::string out;
  out.reserve(kConceptPrefix.size() + key.size());
  out.append(kConceptPrefix);
  out.append(key);
  return out;
}

Token Token::decode(std::string_view encoded) {
  if (encoded.starts_with(kConceptPrefix)) {
    return concept_id(std::string(encoded.substr(kConceptPrefix.size())));
  }
  return word(std::string(encoded));
}

std::string Token::surface() const {
  if (kind == TokenKind::Word) return key;
  return "[[" + key + "]]";
}

bool is_valid_concept_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  for (unsigned char c : id) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (alnum) continue;
    switch (c) {
      case '_': case '(': case ')': case ':': case ',': case '.': case '-': case '\'':
        continue;
      default:
        return false;
    }
  }
  return true;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string fold_mention(std::string_view mention) {
  std::string out = ascii_lower(mention);
  for (char& c : out) {
    if (c == ' ') c = '_';
  }
  return out;
}

}  // namespace conceptvec
