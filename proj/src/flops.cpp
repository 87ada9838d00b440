// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/flops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "flashgate/error.hpp"

namespace flashgate {

namespace {

__extension__ using u128 = unsigned __int128;

}  // namespace

void FlopsParams::validate() const {
  if (n < 1 || d < 1 || m < 1 || layers < 1) {
    throw InvalidInput("flops: n, d, m and layer count must be >= 1");
  }
  if (prune_layer > layers) {
    throw InvalidInput("flops: prune layer " + std::to_string(prune_layer) + " > layer count " +
                       std::to_string(layers));
  }
  if (n_pruned < 1 || n_pruned > n) {
    throw InvalidInput("flops: pruned token count must lie in [1, n]");
  }
  if (!(reuse_rate >= 0.0 && reuse_rate <= 1.0)) {
    throw InvalidInput("flops: reuse rate must lie in [0, 1]");
  }
}

double layer_cost(std::uint64_t tokens, std::uint64_t d, std::uint64_t m) {
  if (tokens < 1 || d < 1 || m < 1) throw InvalidInput("layer_cost: arguments must be >= 1");
  // Exact in 128-bit for any realistic shape; the final conversion is the only rounding.
  const u128 t = tokens;
  const u128 cost = 4 * t * d * d + 2 * t * t * d + 2 * t * d * m;
  return static_cast<double>(cost);
}

double estimate_flops(const FlopsParams& p) {
  p.validate();
  const double full = static_cast<double>(p.prune_layer) * layer_cost(p.n, p.d, p.m);
  const double pruned =
      static_cast<double>(p.layers - p.prune_layer) * layer_cost(p.n_pruned, p.d, p.m);
  return (1.0 - p.reuse_rate) * (full + pruned);
}

SavingsBreakdown savings_breakdown(const FlopsParams& params) {
  params.validate();
  SavingsBreakdown out;
  FlopsParams base = params;
  base.n_pruned = base.n;
  base.reuse_rate = 0.0;
  FlopsParams pruned = params;
  pruned.reuse_rate = 0.0;

  out.baseline = estimate_flops(base);
  out.after_pruning = estimate_flops(pruned);
  out.after_pruning_and_reuse = estimate_flops(params);
  const double saved = out.baseline - out.after_pruning_and_reuse;
  if (saved > 0.0) {
    out.pruning_share = (out.baseline - out.after_pruning) / saved;
    out.reuse_share = (out.after_pruning - out.after_pruning_and_reuse) / saved;
  }
  return out;
}

double implied_reuse_rate(double observed, const FlopsParams& params_at_r0) {
  FlopsParams p = params_at_r0;
  p.reuse_rate = 0.0;
  return implied_reuse_rate(observed, estimate_flops(p));
}

double implied_reuse_rate(double observed, double full) {
  if (!(full > 0.0)) throw InvalidInput("implied_reuse_rate: R=0 cost must be > 0");
  if (!(observed >= 0.0)) throw InvalidInput("implied_reuse_rate: observed FLOPs must be >= 0");
  if (observed > full) {
    throw InvalidInput("implied_reuse_rate: observed FLOPs exceed the R=0 cost");
  }
  return 1.0 - observed / full;
}

}  // namespace flashgate
