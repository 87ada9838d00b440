// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flashgate/linalg.hpp"

namespace flashgate {

/// Per-token information contribution scores of an N x d token matrix.
struct IcsScores {
  std::vector<double> scores;  // length N, all >= 0
  std::size_t source_rank = 0;
};

/// Sorted, duplicate-free set of selected token indices.
class TokenSet {
 public:
  TokenSet() = default;

  /// Validates and canonicalizes `indices` (sorted ascending). Throws
  /// InvalidInput on duplicates, an empty set, or an index >= universe.
  TokenSet(std::vector<std::size_t> indices, std::size_t universe);

  /// Universe inferred as max index + 1.
  static TokenSet from_indices(std::vector<std::size_t> indices);

  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t budget() const noexcept { return indices_.size(); }
  std::size_t universe() const noexcept { return universe_; }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t index) const;

  /// |this ∩ other|, linear merge over the sorted indices.
  std::size_t intersection_size(const TokenSet& other) const;

  friend bool operator==(const TokenSet& a, const TokenSet& b) { return a.indices_ == b.indices_; }

 private:
  std::vector<std::size_t> indices_;
  std::size_t universe_ = 0;
};

/// C(x) = sum_i |u_xi * sigma_i| over the effective rank.
IcsScores contribution_scores(const DenseMatrix& tokens,
                              double rank_tolerance = kDefaultRankTolerance);
IcsScores contribution_scores(const SvdFactors& factors);

/// The k highest-scoring tokens; ties go to the lower index.
TokenSet select_top_k(const IcsScores& scores, std::size_t k);

/// Energy of `subset` in the top-r singular directions:
/// sum over x in subset of sum_{i<r} (u_xi sigma_i)^2.
double information_retention(const DenseMatrix& tokens, const TokenSet& subset, std::size_t r);
double information_retention(const SvdFactors& factors, const TokenSet& subset, std::size_t r);

/// Expected retention of a uniformly random k-subset: (k/N) times the full-set energy.
double expected_random_retention(const DenseMatrix& tokens, std::size_t k, std::size_t r);
double expected_random_retention(const SvdFactors& factors, std::size_t k, std::size_t r);

struct CauchySchwarzMargin {
  double lhs = 0.0;  // C(x)^2
  double rhs = 0.0;  // r * sum_i (u_xi sigma_i)^2
};

CauchySchwarzMargin cauchy_schwarz_margin(const DenseMatrix& tokens, std::size_t x);
CauchySchwarzMargin cauchy_schwarz_margin(const SvdFactors& factors, std::size_t x);

}  // namespace flashgate
