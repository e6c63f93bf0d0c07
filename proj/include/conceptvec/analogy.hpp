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

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conceptvec/errors.hpp"
#include "conceptvec/model_store.hpp"

namespace conceptvec {

/// "a is to b as c is to answer".
struct AnalogyQuestion {
  std::string a;
  std::string b;
  std::string c;
  std::string answer;
  std::string section;
};

/// Standard question-file format: `: <section>` header lines, otherwise four
/// space-separated terms. Blank lines are ignored; questions before the
/// first header land in section "default".
inline std::vector<AnalogyQuestion> parse_questions(std::istream& in, const std::string& source = {}) {
  std::vector<AnalogyQuestion> out;
  std::string section = "default";
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == ':') {
      const auto start = line.find_first_not_of(" \t", 1);
      if (start == std::string::npos) throw ParseError(source, line_number, "empty section name");
      section = line.substr(start);
      while (!section.empty() && (section.back() == ' ' || section.back() == '\t')) section.pop_back();
      continue;
    }
    std::istringstream fields(line);
    std::array<std::string, 4> terms;
    std::size_t n = 0;
    std::string term;
    while (fields >> term) {
      if (n < 4) terms[n] = term;
      ++n;
    }
    if (n != 4) {
      throw ParseError(source, line_number, "expected 4 terms, found " + std::to_string(n));
    }
    out.push_back({terms[0], terms[1], terms[2], terms[3], section});
  }
  return out;
}

inline std::vector<AnalogyQuestion> parse_questions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open questions '" + path.string() + "'");
  return parse_questions(in, path.string());
}

/// Resolved rows of a, b, c plus the query vec(b) - vec(a) + vec(c).
template <typename Scalar>
struct AnalogyQuery {
  std::array<Ordinal, 3> rows{};
  RowVector<Scalar> vector;
};

/// Absent when any of a, b, c fails to resolve.
template <typename Scalar>
std::optional<AnalogyQuery<Scalar>> analogy_query(const EmbeddingModel<Scalar>& model,
                                                  const AnalogyQuestion& q) {
  const auto a = lookup(model, q.a);
  const auto b = lookup(model, q.b);
  const auto c = lookup(model, q.c);
  if (!a || !b || !c) return std::nullopt;
  AnalogyQuery<Scalar> out;
  out.rows = {*a, *b, *c};
  out.vector = model.input.row(*b) - model.input.row(*a) + model.input.row(*c);
  return out;
}

/// Best row for the question, excluding a, b and c. Absent means abstain:
/// an unresolved term, a zero query, or nothing left to rank.
template <typename Scalar>
std::optional<Ordinal> solve(const EmbeddingModel<Scalar>& model, const AnalogyQuestion& q) {
  auto query = analogy_query(model, q);
  if (!query || !(query->vector.norm() > Scalar(0))) return std::nullopt;
  const auto best = nearest(model, query->vector, query->rows, 1);
  if (best.empty()) return std::nullopt;
  return best.front().ordinal;
}

struct SectionScore {
  std::string name;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t abstained = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct AnalogyReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t abstained = 0;
  /// In order of first appearance.
  std::vector<SectionScore> sections;

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

/// True when `token` names the same thing as `answer` under mention folding.
inline bool matches_answer(const Token& token, const std::string& answer) {
  return fold_mention(token.key) == fold_mention(answer);
}

/// Accuracy over every question; abstentions count as wrong. Throws Error on
/// an empty question list.
template <typename Scalar>
AnalogyReport score(const EmbeddingModel<Scalar>& model, const std::vector<AnalogyQuestion>& questions) {
  if (questions.empty()) throw Error("no analogy questions to score");
  AnalogyReport report;
  for (const auto& q : questions) {
    auto it = std::find_if(report.sections.begin(), report.sections.end(),
                           [&](const SectionScore& s) { return s.name == q.section; });
    if (it == report.sections.end()) {
      report.sections.push_back({q.section});
      it = std::prev(report.sections.end());
    }
    ++it->total;
    ++report.total;
    const auto predicted = solve(model, q);
    if (!predicted) {
      ++it->abstained;
      ++report.abstained;
    } else if (matches_answer(model.vocab.token(*predicted), q.answer)) {
      ++it->correct;
      ++report.correct;
    }
  }
  return report;
}

}  // namespace conceptvec
