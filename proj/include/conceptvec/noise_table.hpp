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

#include <span>
#include <vector>

#include "conceptvec/random.hpp"
#include "conceptvec/vocabulary.hpp"

namespace conceptvec {

/// Negative-sampling distribution P(w) proportional to count(w)^power,
/// stored as a CDF and sampled by binary search.
class NoiseTable {
 public:
  explicit NoiseTable(std::vector<double> cumulative) : cumulative_(std::move(cumulative)) {}

  Ordinal sample(Rng& rng) const;

  double probability(Ordinal i) const;
  std::size_t size() const noexcept { return cumulative_.size(); }
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> cumulative_;
};

NoiseTable build_noise_table(std::span<const double> counts, double power);
NoiseTable build_noise_table(const Vocabulary& vocab, double power);

}  // namespace conceptvec
