// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "flashgate/tensor_io.hpp"

namespace flashgate {

inline constexpr double kAttentionRowTolerance = 1e-3;

/// Softmax attention weights indexed (layer, head, query, key).
class AttentionDump {
 public:
  /// Throws InvalidInput when a row is negative or does not sum to 1 within
  /// kAttentionRowTolerance.
  AttentionDump(std::size_t layers, std::size_t heads, std::size_t queries, std::size_t keys,
                std::vector<double> values);

  /// Requires a 4-D tensor.
  static AttentionDump from_tensor(const Tensor& tensor);

  std::size_t layers() const noexcept { return layers_; }
  std::size_t heads() const noexcept { return heads_; }
  std::size_t queries() const noexcept { return queries_; }
  std::size_t keys() const noexcept { return keys_; }

  double at(std::size_t layer, std::size_t head, std::size_t query, std::size_t key) const {
    return values_[((layer * heads_ + head) * queries_ + query) * keys_ + key];
  }

 private:
  std::size_t layers_, heads_, queries_, keys_;
  std::vector<double> values_;
};

/// Head-averaged attention received by each key from the final query.
std::vector<double> last_query_scores(const AttentionDump& dump, std::size_t layer);

inline constexpr std::array<std::size_t, 3> kTopKLevels = {8, 16, 32};

struct LayerSparsity {
  std::size_t layer = 0;
  double entropy = 0.0;             // nats
  std::array<double, 3> top_k_mass{};  // for kTopKLevels
  double gini = 0.0;
};

/// Entropy of the normalized scores, in nats.
double entropy(std::span<const double> scores);
/// Mass of the k largest normalized scores; 1 when k >= N.
double top_k_mass(std::span<const double> scores, std::size_t k);
/// Gini coefficient of the scores: 0 for uniform, (N-1)/N for one-hot.
double gini(std::span<const double> scores);

std::vector<LayerSparsity> sparsity_profile(const AttentionDump& dump);

/// CSV with header `layer,entropy,top8,top16,top32,gini`.
void write_sparsity_csv(std::span<const LayerSparsity> profile, std::ostream& out);

}  // namespace flashgate
