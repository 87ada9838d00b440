// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "flashgate/flops.hpp"
#include "flashgate/linalg.hpp"
#include "flashgate/reuse_gate.hpp"

namespace flashgate::cli {

using Json = nlohmann::ordered_json;

struct SelectOptions {
  std::filesystem::path tensor;
  std::size_t k = 0;
  std::size_t index = 0;
  double rank_tolerance = kDefaultRankTolerance;
};

/// {"indices", "scores", "retention", "expected_random"}.
Json run_select(const SelectOptions& options);

struct GateOptions {
  std::filesystem::path trace;
  GateConfig config;
  std::size_t k = 0;  // budget for tensor-backed steps
  double rank_tolerance = kDefaultRankTolerance;
};

std::vector<Observation> load_observations(const std::filesystem::path& trace, std::size_t k,
                                           double rank_tolerance);

/// {"reuse_rate", "decisions": [...], "steps"}.
Json gate_report(const ReplayResult& replay);
void write_gate_csv(const ReplayResult& replay, std::ostream& out);
ReplayResult run_gate(const GateOptions& options);

/// FLOPs in units of 1e12, two decimals ("1.31").
std::string format_teraflops(double flops);
std::string flops_report(const FlopsParams& params, bool breakdown);

struct SweepSpec {
  std::vector<double> epsilon1_values;
  std::vector<double> delta_values;
  GateMode mode = GateMode::kMotivationConsistent;
  FlopsParams architecture;  // n_pruned and reuse_rate are filled per row
  std::optional<std::uint64_t> n_pruned;  // default: budget of the first token set
  unsigned threads = 0;                   // 0 = hardware concurrency

  void validate() const;
};

struct SweepRow {
  double epsilon1 = 0.0;
  double delta = 0.0;
  double reuse_rate = 0.0;
  double flops = 0.0;  // absolute FLOPs
};

/// One isolated gate replay per (epsilon1, delta) point, epsilon1-major order.
std::vector<SweepRow> run_sweep(std::span<const Observation> trace, const SweepSpec& spec);
/// Header `epsilon1,delta,reuse_rate,flops_estimate`; FLOPs column in units of 1e12.
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);

/// --seed when given, else FLASHGATE_SEED, else 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

}  // namespace flashgate::cli
