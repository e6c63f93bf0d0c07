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

#include <Eigen/Core>
#include <cmath>

#include "conceptvec/vocabulary.hpp"

namespace conceptvec {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Skip-gram parameters: `input` rows are the embeddings (u), `output` rows
/// the context vectors (v). Row i belongs to vocab ordinal i.
template <typename Scalar>
struct EmbeddingModel {
  using scalar_type = Scalar;

  Vocabulary vocab;
  RowMatrix<Scalar> input;
  RowMatrix<Scalar> output;

  Eigen::Index dim() const noexcept { return input.cols(); }
  Eigen::Index rows() const noexcept { return input.rows(); }

  auto embedding(Ordinal i) const { return input.row(i); }

  bool all_finite() const { return input.allFinite() && output.allFinite(); }
};

using Model = EmbeddingModel<float>;

/// Cosine similarity; 0 when either side is the zero vector.
template <typename A, typename B>
auto cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  return a.dot(b) / (na * nb);
}

}  // namespace conceptvec
