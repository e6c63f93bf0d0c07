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

#include "conceptvec/noise_table.hpp"

#include <algorithm>
#include <cmath>

#include "conceptvec/errors.hpp"

namespace conceptvec {

Ordinal NoiseTable::sample(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  // u < 1 == back() normally; rounding can leave back() a hair under u.
  if (it == cumulative_.end()) --it;
  return static_cast<Ordinal>(it - cumulative_.begin());
}

double NoiseTable::probability(Ordinal i) const {
  return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
}

NoiseTable build_noise_table(std::span<const double> counts, double power) {
  if (counts.empty()) throw Error("noise table needs a non-empty vocabulary");
  if (power < 0.0) throw Error("noise power must be >= 0");
  std::vector<double> cumulative(counts.size());
  double z = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    z += std::pow(counts[i], power);
    cumulative[i] = z;
  }
  if (!(z > 0.0)) throw Error("noise table has zero total mass");
  for (double& c : cumulative) c /= z;
  cumulative.back() = 1.0;
  return NoiseTable(std::move(cumulative));
}

NoiseTable build_noise_table(const Vocabulary& vocab, double power) {
  std::vector<double> counts;
  counts.reserve(vocab.size());
  for (const auto& e : vocab.entries()) counts.push_back(static_cast<double>(e.count));
  return build_noise_table(counts, power);
}

}  // namespace conceptvec
