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

// Small hand-built models with known geometry.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "conceptvec/argtype.hpp"
#include "conceptvec/model.hpp"

namespace fixtures {

using conceptvec::Model;
using conceptvec::RowMatrix;
using conceptvec::Token;
using conceptvec::Vocabulary;

/// Axis 0 is "city", axis 1 is "airline", axis 2 is neither. Cities sit
/// close to axis 0; Boston and Denver sit at cosine 0.4 and 0.6 from it.
inline Model travel_model() {
  struct Row {
    Token token;
    float x, y, z;
  };
  const float s4 = std::sqrt(1.0f - 0.16f);
  const float s6 = std::sqrt(1.0f - 0.36f);
  const std::vector<Row> rows = {
      {Token::concept_id("City"), 1, 0, 0},
      {Token::concept_id("Airline"), 0, 1, 0},
      {Token::concept_id("Philadelphia"), 0.9f, 0.1f, 0.2f},
      {Token::concept_id("San_Francisco"), 0.8f, 0.2f, 0.1f},
      {Token::concept_id("Dallas"), 0.95f, 0.05f, 0.1f},
      {Token::concept_id("Delta_Air_Lines"), 0.1f, 0.9f, 0.1f},
      {Token::concept_id("Boston"), 0.4f, 0, s4},
      {Token::concept_id("Denver"), 0.6f, 0, s6},
      {Token::word("flights"), 0.3f, 0.3f, 0.3f},
  };
  std::vector<Vocabulary::Entry> entries;
  RowMatrix<float> in(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    entries.push_back({rows[i].token, 1});
    in.row(static_cast<Eigen::Index>(i)) << rows[i].x, rows[i].y, rows[i].z;
  }
  return {Vocabulary(entries), in, RowMatrix<float>::Zero(in.rows(), 3)};
}

inline conceptvec::TypeInventory<float> travel_types(const Model& m, double threshold = 0.5) {
  conceptvec::TypeInventory<float> inv;
  inv.threshold = threshold;
  inv.add("city", "ci", m.input.row(*conceptvec::lookup(m, "City")));
  inv.add("airline", "al", m.input.row(*conceptvec::lookup(m, "Airline")));
  return inv;
}

inline const char* kFlightQuery = "list flights from [[Philadelphia]] to [[San_Francisco]] via [[Dallas]]";
inline const char* kFlightTyped = "list flights from ci0 to ci1 via ci2";

}  // namespace fixtures
