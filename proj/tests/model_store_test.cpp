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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "conceptvec/errors.hpp"
#include "conceptvec/model_store.hpp"
#include "conceptvec/random.hpp"

using namespace conceptvec;

namespace {

Model make_model(const std::vector<Token>& tokens, int dim, std::uint64_t seed) {
  std::vector<Vocabulary::Entry> entries;
  for (const auto& t : tokens) entries.push_back({t, 1});
  Model m{Vocabulary(entries), RowMatrix<float>(tokens.size(), dim), RowMatrix<float>::Zero(tokens.size(), dim)};
  Rng rng(seed);
  for (Eigen::Index r = 0; r < m.input.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m.input(r, c) = static_cast<float>(rng.uniform() * 2 - 1);
  }
  return m;
}

std::vector<Token> words(int n) {
  std::vector<Token> out;
  for (int i = 0; i < n; ++i) out.push_back(Token::word("w" + std::to_string(i)));
  return out;
}

std::string saved(const Model& m, VectorFormat fmt) {
  std::ostringstream out;
  save_model(m, out, fmt);
  return out.str();
}

}  // namespace

TEST_CASE("save: text layout has a header and one row per token") {
  auto m = make_model({Token::word("x"), Token::concept_id("Paris")}, 3, 1);
  const auto text = saved(m, VectorFormat::Text);
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "2 3");
  CHECK(lines[1].starts_with("x "));
  CHECK(lines[2].starts_with(std::string(kConceptPrefix) + "Paris "));
}

TEST_CASE("save/load: text round trip within 1e-6") {
  std::vector<Token> tokens = words(30);
  tokens.push_back(Token::concept_id("New_York_City"));
  auto m = make_model(tokens, 7, 2);
  auto back = load_model_from_string(saved(m, VectorFormat::Text));
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.dim() == m.dim());
  CHECK((back.input - m.input).cwiseAbs().maxCoeff() <= 1e-6f);
  for (Ordinal i = 0; i < m.vocab.size(); ++i) CHECK(back.vocab.token(i) == m.vocab.token(i));
  CHECK(back.output.isZero());
}

TEST_CASE("save/load: binary round trip is bit-identical") {
  auto m = make_model(words(40), 9, 3);
  m.input(0, 0) = std::numeric_limits<float>::denorm_min();
  m.input(1, 1) = -0.0f;
  auto back = load_model_from_string(saved(m, VectorFormat::Binary));
  REQUIRE(back.rows() == m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    CHECK(back.vocab.token(static_cast<Ordinal>(r)) == m.vocab.token(static_cast<Ordinal>(r)));
    for (Eigen::Index c = 0; c < m.dim(); ++c) {
      CHECK(std::bit_cast<std::uint32_t>(back.input(r, c)) == std::bit_cast<std::uint32_t>(m.input(r, c)));
    }
  }
}

TEST_CASE("save/load: files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "conceptvec_model_store_test";
  std::filesystem::create_directories(dir);
  auto m = make_model(words(5), 4, 4);
  save_model(m, dir / "m.bin", VectorFormat::Binary);
  save_model(m, dir / "m.txt", VectorFormat::Text);
  CHECK(load_model(dir / "m.bin").input == m.input);
  CHECK((load_model(dir / "m.txt").input - m.input).cwiseAbs().maxCoeff() <= 1e-6f);
  CHECK_THROWS_AS(load_model(dir / "missing.txt"), Error);
  CHECK_THROWS_AS(save_model(m, dir / "no" / "such" / "dir.txt", VectorFormat::Text), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("load: truncated file names expected and found rows") {
  auto m = make_model(words(4), 3, 5);
  auto text = saved(m, VectorFormat::Text);
  text.resize(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  try {
    load_model_from_string(text);
    FAIL("truncated model accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("expected 4 rows, found 3") != std::string::npos);
  }

  auto bin = saved(m, VectorFormat::Binary);
  bin.resize(bin.size() - 7);
  CHECK_THROWS_AS(load_model_from_string(bin), ParseError);
}

TEST_CASE("load: malformed input") {
  CHECK_THROWS_AS(load_model_from_string(""), ParseError);
  CHECK_THROWS_AS(load_model_from_string("2\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("1 0\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("1 2\na 1\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("1 2\na 1 2 3\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("1 2\na 1 2\nb 1 2\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("1 2\na 1 x\n"), ParseError);
  CHECK_THROWS_AS(load_model_from_string("2 1\na 1\na 2\n"), Error);
  CHECK(load_model_from_string("1 2\r\na 0.5 -1\r\n").input(0, 1) == -1.0f);
}

TEST_CASE("save: non-finite models are refused") {
  auto m = make_model(words(2), 2, 6);
  m.input(1, 0) = std::numeric_limits<float>::quiet_NaN();
  std::ostringstream out;
  CHECK_THROWS_AS(save_model(m, out, VectorFormat::Text), Error);
}

TEST_CASE("nearest: self match and exclusion") {
  auto m = make_model(words(20), 5, 7);
  for (Ordinal x = 0; x < m.vocab.size(); ++x) {
    auto top = nearest(m, m.input.row(x), {}, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].ordinal == x);
    CHECK(top[0].similarity == doctest::Approx(1.0).epsilon(1e-6));
    const std::array<Ordinal, 1> ex{x};
    auto without = nearest(m, m.input.row(x), ex, m.vocab.size());
    CHECK(without.size() == m.vocab.size() - 1);
    CHECK(std::none_of(without.begin(), without.end(), [&](const auto& n) { return n.ordinal == x; }));
  }
  CHECK_THROWS_AS(nearest(m, RowVector<float>::Zero(5), {}, 1), Error);
}

TEST_CASE("nearest: random dim-5 model with 50 rows equals a brute-force sort") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto m = make_model(words(50), 5, 100 + seed);
    // Duplicate a few rows so ties exercise the ordinal rule.
    m.input.row(7) = m.input.row(3);
    m.input.row(41) = m.input.row(3) * 2.0f;
    Rng rng(seed);
    RowVector<float> q(5);
    for (int c = 0; c < 5; ++c) q(c) = static_cast<float>(rng.uniform() - 0.5);
    if (seed % 2) q = m.input.row(3);

    std::vector<std::pair<float, Ordinal>> brute;
    for (Ordinal r = 0; r < 50; ++r) {
      const float sim = m.input.row(r).dot(q) / (m.input.row(r).norm() * q.norm());
      brute.push_back({sim, r});
    }
    std::stable_sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    auto got = nearest(m, q, {}, 50);
    REQUIRE(got.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(got[i].ordinal == brute[i].second);
      CHECK(got[i].similarity == doctest::Approx(brute[i].first).epsilon(1e-5));
    }
    // Strict total order on (similarity desc, ordinal asc).
    for (std::size_t i = 1; i < got.size(); ++i) {
      const bool ordered = got[i - 1].similarity > got[i].similarity ||
                           (got[i - 1].similarity == got[i].similarity && got[i - 1].ordinal < got[i].ordinal);
      CHECK(ordered);
    }
  }
}

TEST_CASE("nearest: top_k beyond the candidates returns all of them") {
  auto m = make_model(words(4), 3, 8);
  const std::array<Ordinal, 2> ex{0, 1};
  CHECK(nearest(m, m.input.row(0), ex, 100).size() == 2);
}

TEST_CASE("lookup: concepts beat words") {
  auto m = make_model({Token::word("paris"), Token::concept_id("Paris"), Token::word("berlin"),
                       Token::concept_id("New_York_City")},
                      4, 9);
  CHECK(lookup(m, "paris") == Ordinal{1});
  CHECK(lookup(m, "Paris") == Ordinal{1});
  CHECK(lookup(m, "PARIS") == Ordinal{1});
  CHECK(lookup(m, "berlin") == Ordinal{2});
  CHECK(lookup(m, "Berlin") == Ordinal{2});
  CHECK_FALSE(lookup(m, "tokyo").has_value());
  CHECK(lookup(m, "new york city") == Ordinal{3});
  CHECK(lookup(m, "New York City") == Ordinal{3});
  CHECK_FALSE(lookup(m, "paris berlin").has_value());
  CHECK(lookup(m, "[[Paris]]") == Ordinal{1});
  CHECK_FALSE(lookup(m, "[[berlin]]").has_value());
  auto v = lookup_vector(m, "paris");
  REQUIRE(v.has_value());
  CHECK(*v == m.input.row(1));
  CHECK_FALSE(lookup_vector(m, "tokyo").has_value());
}

TEST_CASE("lookup: precedence holds for every shared key in a random vocabulary") {
  std::vector<Token> tokens;
  for (int i = 0; i < 30; ++i) {
    const std::string k = "k" + std::to_string(i);
    // Interleave so that ordinal order never decides precedence.
    if (i % 2) {
      tokens.push_back(Token::word(k));
      tokens.push_back(Token::concept_id(k));
    } else {
      tokens.push_back(Token::concept_id(k));
      tokens.push_back(Token::word(k));
    }
  }
  auto m = make_model(tokens, 2, 10);
  for (int i = 0; i < 30; ++i) {
    const auto o = lookup(m, "k" + std::to_string(i));
    REQUIRE(o.has_value());
    CHECK(m.vocab.token(*o).kind == TokenKind::Concept);
  }
}
