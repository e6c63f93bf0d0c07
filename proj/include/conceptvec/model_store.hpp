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

// Vectors files and similarity queries.
//
// Both formats start with a `<V> <dim>` header line. Text rows are
// `<key> <f1> ... <fdim>`; binary rows are `<key> ` followed by dim
// little-endian float32 values and a newline. Concept keys carry the
// reserved prefix. Only the input (embedding) matrix is stored.

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conceptvec/errors.hpp"
#include "conceptvec/model.hpp"

namespace conceptvec {

enum class VectorFormat { Text, Binary };

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
  }
  return v;
}

inline void write_float_le(std::ostream& out, float f) {
  const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(f));
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.write(buf, 4);
}

inline float read_float_le(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  return std::bit_cast<float>(to_little_endian(bits));
}

struct Header {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t end = 0;  // offset just past the header newline
};

inline Header parse_header(std::string_view data, const std::string& source) {
  const std::size_t nl = data.find('\n');
  if (nl == std::string_view::npos) throw ParseError(source, 1, "missing header line");
  std::string_view line = data.substr(0, nl);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Header h;
  h.end = nl + 1;
  const auto* p = line.data();
  const auto* end = line.data() + line.size();
  auto r1 = std::from_chars(p, end, h.rows);
  if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ' ') {
    throw ParseError(source, 1, "header must be '<V> <dim>'");
  }
  auto r2 = std::from_chars(r1.ptr + 1, end, h.dim);
  if (r2.ec != std::errc() || r2.ptr != end || h.dim == 0) {
    throw ParseError(source, 1, "header must be '<V> <dim>' with dim >= 1");
  }
  return h;
}

inline bool valid_key(std::string_view key) {
  return !key.empty() && key.find_first_of(" \t\r\n") == std::string_view::npos;
}

template <typename Scalar>
EmbeddingModel<Scalar> assemble(std::vector<Vocabulary::Entry> entries, RowMatrix<Scalar> input,
                                const std::string& source) {
  try {
    Vocabulary vocab(std::move(entries));
    const auto rows = input.rows();
    const auto cols = input.cols();
    return EmbeddingModel<Scalar>{std::move(vocab), std::move(input),
                                  RowMatrix<Scalar>::Zero(rows, cols)};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, 0, e.what());
  }
}

// Strict binary parse; returns the failure reason instead of throwing so the
// caller can fall back to the text reader.
template <typename Scalar>
std::optional<EmbeddingModel<Scalar>> try_parse_binary(std::string_view data, const Header& h,
                                                       std::string& why) {
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(h.rows);
  RowMatrix<Scalar> input(static_cast<Eigen::Index>(h.rows), static_cast<Eigen::Index>(h.dim));
  std::size_t pos = h.end;
  for (std::size_t r = 0; r < h.rows; ++r) {
    const std::size_t space = data.find(' ', pos);
    if (space == std::string_view::npos) {
      why = "expected " + std::to_string(h.rows) + " rows, found " + std::to_string(r);
      return std::nullopt;
    }
    const std::string_view key = data.substr(pos, space - pos);
    if (!valid_key(key)) {
      why = "invalid key in row " + std::to_string(r + 1);
      return std::nullopt;
    }
    const std::size_t body = space + 1;
    if (data.size() < body + 4 * h.dim + 1) {
      why = "expected " + std::to_string(h.rows) + " rows, found " + std::to_string(r);
      return std::nullopt;
    }
    for (std::size_t c = 0; c < h.dim; ++c) {
      input(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          static_cast<Scalar>(read_float_le(data.data() + body + 4 * c));
    }
    if (data[body + 4 * h.dim] != '\n') {
      why = "row " + std::to_string(r + 1) + " is not newline-terminated";
      return std::nullopt;
    }
    pos = body + 4 * h.dim + 1;
    entries.push_back({Token::decode(key), 0});
  }
  if (pos != data.size()) {
    why = "trailing bytes after " + std::to_string(h.rows) + " rows";
    return std::nullopt;
  }
  return assemble<Scalar>(std::move(entries), std::move(input), "");
}

template <typename Scalar>
EmbeddingModel<Scalar> parse_text(std::string_view data, const Header& h,
                                  const std::string& source) {
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(h.rows);
  RowMatrix<Scalar> input(static_cast<Eigen::Index>(h.rows), static_cast<Eigen::Index>(h.dim));
  std::size_t pos = h.end;
  std::size_t line_number = 1;
  std::size_t found = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    std::string_view line = data.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (found == h.rows) {
      throw ParseError(source, line_number,
                       "more rows than the header's " + std::to_string(h.rows));
    }

    const std::size_t key_end = line.find(' ');
    const std::string_view key = line.substr(0, key_end);
    if (key_end == std::string_view::npos || !valid_key(key)) {
      throw ParseError(source, line_number, "malformed row");
    }
    const char* p = line.data() + key_end;
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < h.dim; ++c) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      float value = 0;
      auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc()) {
        throw ParseError(source, line_number,
                         "expected " + std::to_string(h.dim) + " values, found " + std::to_string(c));
      }
      input(static_cast<Eigen::Index>(found), static_cast<Eigen::Index>(c)) = static_cast<Scalar>(value);
      p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) {
      throw ParseError(source, line_number, "more than " + std::to_string(h.dim) + " values");
    }
    entries.push_back({Token::decode(key), 0});
    ++found;
  }
  if (found != h.rows) {
    throw ParseError(source, 0,
                     "expected " + std::to_string(h.rows) + " rows, found " + std::to_string(found));
  }
  return assemble<Scalar>(std::move(entries), std::move(input), source);
}

inline bool looks_binary(std::string_view data) {
  return std::any_of(data.begin(), data.end(), [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return c < 0x20 && c != '\n' && c != '\r' && c != '\t';
  });
}

}  // namespace detail

template <typename Scalar>
void save_model(const EmbeddingModel<Scalar>& model, std::ostream& out, VectorFormat format) {
  if (!model.input.allFinite()) throw Error("refusing to save a model with non-finite values");
  out << model.rows() << ' ' << model.dim() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < model.rows(); ++r) {
    out << model.vocab.token(static_cast<Ordinal>(r)).encoded();
    if (format == VectorFormat::Binary) {
      out << ' ';
      for (Eigen::Index c = 0; c < model.dim(); ++c) {
        detail::write_float_le(out, static_cast<float>(model.input(r, c)));
      }
    } else {
      for (Eigen::Index c = 0; c < model.dim(); ++c) {
        // Shortest representation that round-trips the float exactly.
        auto res = std::to_chars(buf, buf + sizeof buf, static_cast<float>(model.input(r, c)));
        out << ' ';
        out.write(buf, res.ptr - buf);
      }
    }
    out << '\n';
  }
}

template <typename Scalar>
void save_model(const EmbeddingModel<Scalar>& model, const std::filesystem::path& path,
                VectorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  save_model(model, out, format);
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

/// Parses either format; binary is recognised by a strict parse that must
/// consume the whole input. Vocabulary ordinals follow file order and counts
/// are zero. The output matrix is zero-filled.
template <typename Scalar = float>
EmbeddingModel<Scalar> load_model_from_string(std::string_view data, const std::string& source = {}) {
  const detail::Header header = detail::parse_header(data, source);
  std::string binary_error;
  if (auto m = detail::try_parse_binary<Scalar>(data, header, binary_error)) return std::move(*m);
  try {
    return detail::parse_text<Scalar>(data, header, source);
  } catch (const ParseError&) {
    if (detail::looks_binary(data.substr(header.end))) {
      throw ParseError(source, 0, "binary vectors: " + binary_error);
    }
    throw;
  }
}

template <typename Scalar = float>
EmbeddingModel<Scalar> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_model_from_string<Scalar>(data, path.string());
}

template <typename Scalar>
struct Neighbor {
  Ordinal ordinal = 0;
  Scalar similarity = 0;
};

/// Exact cosine ranking over every row, descending similarity with ties by
/// ascending ordinal. Rows in `exclude` never appear. Returns at most
/// `top_k` results (fewer when the vocabulary runs out). Throws Error on a
/// zero query.
template <typename Scalar, typename Derived>
std::vector<Neighbor<Scalar>> nearest(const EmbeddingModel<Scalar>& model,
                                      const Eigen::MatrixBase<Derived>& query,
                                      std::span<const Ordinal> exclude, std::size_t top_k) {
  const Scalar qnorm = query.norm();
  if (!(qnorm > Scalar(0))) throw Error("nearest: query vector is zero");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dots = model.input * query.transpose();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms = model.input.rowwise().norm();

  std::vector<bool> skip(static_cast<std::size_t>(model.rows()), false);
  for (Ordinal e : exclude) {
    if (e < skip.size()) skip[e] = true;
  }
  std::vector<Neighbor<Scalar>> all;
  all.reserve(skip.size());
  for (Eigen::Index r = 0; r < model.rows(); ++r) {
    if (skip[static_cast<std::size_t>(r)]) continue;
    const Scalar sim = norms(r) > Scalar(0) ? dots(r) / (norms(r) * qnorm) : Scalar(0);
    all.push_back({static_cast<Ordinal>(r), sim});
  }
  const auto k = std::min(top_k, all.size());
  auto better = [](const Neighbor<Scalar>& a, const Neighbor<Scalar>& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.ordinal < b.ordinal;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  return all;
}

/// Resolves a free-text mention to a row.
///
/// Concepts win over words. A concept matches when the mention, with spaces
/// turned into underscores, equals its key exactly or case-insensitively. A
/// word matches the lowercased mention, so multiword mentions can only hit
/// concepts. `[[ID]]` restricts the match to concepts.
inline std::optional<Ordinal> lookup(const Vocabulary& vocab, std::string_view mention) {
  if (mention.size() > 4 && mention.starts_with("[[") && mention.ends_with("]]")) {
    mention = mention.substr(2, mention.size() - 4);
    std::string key(mention);
    if (auto o = vocab.find(Token::concept_id(key))) return o;
    return vocab.find_concept_folded(fold_mention(key));
  }
  std::string underscored(mention);
  std::replace(underscored.begin(), underscored.end(), ' ', '_');
  if (auto o = vocab.find(Token::concept_id(underscored))) return o;
  if (auto o = vocab.find_concept_folded(fold_mention(mention))) return o;
  if (mention.empty() || mention.find_first_of(" \t") != std::string_view::npos) return std::nullopt;
  return vocab.find(Token::word(ascii_lower(mention)));
}

template <typename Scalar>
std::optional<Ordinal> lookup(const EmbeddingModel<Scalar>& model, std::string_view mention) {
  return lookup(model.vocab, mention);
}

template <typename Scalar>
std::optional<RowVector<Scalar>> lookup_vector(const EmbeddingModel<Scalar>& model,
                                               std::string_view mention) {
  if (auto o = lookup(model, mention)) return RowVector<Scalar>(model.input.row(*o));
  return std::nullopt;
}

}  // namespace conceptvec
