// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace flashgate {

/// Visual-token cost model of a decoder stack. Defaults are the LLaMA-7B
/// backbone with pruning starting after layer 2.
struct FlopsParams {
  std::uint64_t n = 256;     // visual tokens before pruning
  std::uint64_t d = 4096;    // hidden size
  std::uint64_t m = 11008;   // FFN intermediate size
  std::uint64_t layers = 32;
  std::uint64_t prune_layer = 2;  // layers [0, prune_layer) run at full width
  std::uint64_t n_pruned = 256;
  double reuse_rate = 0.0;

  void validate() const;
};

/// 4td^2 + 2t^2d + 2tdm for one layer over t tokens.
double layer_cost(std::uint64_t tokens, std::uint64_t d, std::uint64_t m);

double estimate_flops(const FlopsParams& params);

struct SavingsBreakdown {
  double baseline = 0.0;
  double after_pruning = 0.0;
  double after_pruning_and_reuse = 0.0;
  double pruning_share = 0.0;
  double reuse_share = 0.0;
};

/// Stages: no pruning/no reuse, pruning only, pruning + reuse. Shares split
/// (baseline - final) between the two mechanisms; both are 0 when nothing is saved.
SavingsBreakdown savings_breakdown(const FlopsParams& params);

/// R = 1 - observed / estimate_flops(params with R = 0).
double implied_reuse_rate(double observed, const FlopsParams& params_at_r0);
/// Same inversion against an already-known R = 0 cost (e.g. a tabulated value).
double implied_reuse_rate(double observed, double cost_at_r0);

}  // namespace flashgate
