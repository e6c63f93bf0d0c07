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

#include "conceptvec/vocabulary.hpp"

#include "conceptvec/errors.hpp"

namespace conceptvec {

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto ordinal = static_cast<Ordinal>(i);
    const Token& tok = entries_[i].token;
    if (!index_.emplace(tok.encoded(), ordinal).second) {
      throw Error("duplicate vocabulary entry '" + tok.encoded() + "'");
    }
    if (tok.is_concept()) folded_concepts_.emplace(fold_mention(tok.key), ordinal);
    total_ += entries_[i].count;
  }
}

std::optional<Ordinal> Vocabulary::find_encoded(const std::string& encoded) const {
  auto it = index_.find(encoded);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Ordinal> Vocabulary::find_concept_folded(const std::string& folded) const {
  auto it = folded_concepts_.find(folded);
  if (it == folded_concepts_.end()) return std::nullopt;
  return it->second;
}

}  // namespace conceptvec
