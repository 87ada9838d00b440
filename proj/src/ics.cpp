// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/ics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flashgate/error.hpp"

namespace flashgate {

namespace {

// (u_xi * sigma_i)^2 summed over i < r.
double row_energy(const SvdFactors& f, std::size_t x, std::size_t r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double w = f.u(x, i) * f.sigma[i];
    acc += w * w;
  }
  return acc;
}

void check_rank(const SvdFactors& f, std::size_t r) {
  if (r > f.rank()) {
    throw InvalidInput("rank " + std::to_string(r) + " exceeds effective rank " +
                       std::to_string(f.rank()));
  }
}

void check_budget(const SvdFactors& f, std::size_t k) {
  if (k < 1 || k > f.rows) {
    throw InvalidInput("k=" + std::to_string(k) + " outside [1, " + std::to_string(f.rows) + "]");
  }
}

}  // namespace

TokenSet::TokenSet(std::vector<std::size_t> indices, std::size_t universe)
    : indices_(std::move(indices)), universe_(universe) {
  if (indices_.empty()) throw InvalidInput("token set must be non-empty");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InvalidInput("token set contains duplicate indices");
  }
  if (indices_.back() >= universe_) {
    throw InvalidInput("token index " + std::to_string(indices_.back()) + " >= universe " +
                       std::to_string(universe_));
  }
}

TokenSet TokenSet::from_indices(std::vector<std::size_t> indices) {
  const std::size_t universe =
      indices.empty() ? 0 : *std::max_element(indices.begin(), indices.end()) + 1;
  return TokenSet(std::move(indices), universe);
}

bool TokenSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::size_t TokenSet::intersection_size(const TokenSet& other) const {
  std::size_t count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

IcsScores contribution_scores(const DenseMatrix& tokens, double rank_tolerance) {
  return contribution_scores(svd_decompose(tokens, rank_tolerance));
}

IcsScores contribution_scores(const SvdFactors& factors) {
  IcsScores out;
  out.source_rank = factors.rank();
  out.scores.assign(factors.rows, 0.0);
  for (std::size_t x = 0; x < factors.rows; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < factors.rank(); ++i) acc += std::abs(factors.u(x, i) * factors.sigma[i]);
    out.scores[x] = acc;
  }
  return out;
}

TokenSet select_top_k(const IcsScores& scores, std::size_t k) {
  const std::size_t n = scores.scores.size();
  if (k < 1 || k > n) {
    throw InvalidInput("select_top_k: k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(n) + "]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& s = scores.scores;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return s[a] > s[b] || (s[a] == s[b] && a < b);
                    });
  order.resize(k);
  return TokenSet(std::move(order), n);
}

double information_retention(const DenseMatrix& tokens, const TokenSet& subset, std::size_t r) {
  return information_retention(svd_decompose(tokens), subset, r);
}

double information_retention(const SvdFactors& factors, const TokenSet& subset, std::size_t r) {
  check_rank(factors, r);
  double acc = 0.0;
  for (std::size_t x : subset.indices()) {
    if (x >= factors.rows) {
      throw InvalidInput("token index " + std::to_string(x) + " >= N=" +
                         std::to_string(factors.rows));
    }
    acc += row_energy(factors, x, r);
  }
  return acc;
}

double expected_random_retention(const DenseMatrix& tokens, std::size_t k, std::size_t r) {
  return expected_random_retention(svd_decompose(tokens), k, r);
}

double expected_random_retention(const SvdFactors& factors, std::size_t k, std::size_t r) {
  check_budget(factors, k);
  check_rank(factors, r);
  double total = 0.0;
  for (std::size_t x = 0; x < factors.rows; ++x) total += row_energy(factors, x, r);
  return static_cast<double>(k) / static_cast<double>(factors.rows) * total;
}

CauchySchwarzMargin cauchy_schwarz_margin(const DenseMatrix& tokens, std::size_t x) {
  return cauchy_schwarz_margin(svd_decompose(tokens), x);
}

CauchySchwarzMargin cauchy_schwarz_margin(const SvdFactors& factors, std::size_t x) {
  if (x >= factors.rows) {
    throw InvalidInput("token index " + std::to_string(x) + " >= N=" + std::to_string(factors.rows));
  }
  const std::size_t r = factors.rank();
  double score = 0.0;
  for (std::size_t i = 0; i < r; ++i) score += std::abs(factors.u(x, i) * factors.sigma[i]);
  return {score * score, static_cast<double>(r) * row_energy(factors, x, r)};
}

}  // namespace flashgate
