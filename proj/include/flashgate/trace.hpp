// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "flashgate/linalg.hpp"
#include "flashgate/reuse_gate.hpp"

namespace flashgate {

/// Points at matrix `index` of a FVTS file; the token set is derived by ICS selection.
struct TensorRef {
  std::string path;
  std::size_t index = 0;

  friend bool operator==(const TensorRef&, const TensorRef&) = default;
};

struct TraceStep {
  std::size_t step = 1;
  ActionVector action;
  std::variant<TokenSet, TensorRef> tokens;
  bool done = false;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// Checks 1-based contiguous steps and a constant action dimension.
void validate_trace(std::span<const TraceStep> steps);

/// One JSON object per line:
///   {"step":1,"action":[...],"tokens":{"set":[...]},"done":false}
/// or "tokens":{"tensor":"path","index":i}. Doubles use shortest round-trip formatting.
void write_trace(std::span<const TraceStep> steps, std::ostream& out);
void write_trace(std::span<const TraceStep> steps, const std::filesystem::path& path);

/// Throws ParseError carrying the 1-based line number. Blank lines are skipped.
std::vector<TraceStep> read_trace(std::istream& in);
std::vector<TraceStep> read_trace(const std::filesystem::path& path);

struct ResolveOptions {
  std::filesystem::path base_dir;  // relative tensor paths resolve against this
  std::size_t k = 0;               // ICS budget for tensor-backed steps; 0 = not allowed
  double rank_tolerance = kDefaultRankTolerance;
  bool stop_at_done = true;        // drop steps after the first done=true
};

/// Turns trace steps into gate observations, running ICS top-k selection
/// for tensor-backed token sets.
std::vector<Observation> resolve_observations(std::span<const TraceStep> steps,
                                              const ResolveOptions& options);

struct SynthSpec {
  std::size_t length = 500;
  std::size_t action_dim = 7;
  double plateau_fraction = 0.7;
  double plateau_run_length = 20.0;
  double angle_noise_deg = 0.0;
  std::size_t token_universe = 256;
  std::size_t token_budget = 192;
  double token_churn = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticTrace {
  std::vector<TraceStep> steps;
  std::vector<bool> in_plateau;  // per step
};

/// Plateau runs (geometric lengths) interleaved with independent steps.
/// Within a run consecutive actions differ by at most angle_noise_deg and
/// token sets by at most floor(token_churn) indices; every run start and
/// every independent step draws a fresh unit direction and K-subset. Runs
/// never abut, so plateau_fraction = 1 gives a single run.
SyntheticTrace synthesize_trace_annotated(const SynthSpec& spec);
std::vector<TraceStep> synthesize_trace(const SynthSpec& spec);

}  // namespace flashgate
