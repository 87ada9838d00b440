// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flashgate/ics.hpp"

namespace flashgate {

/// One policy output, e.g. 7-D delta end-effector pose + gripper.
struct ActionVector {
  std::vector<double> components;

  std::size_t dim() const noexcept { return components.size(); }
  /// Throws InvalidInput on an empty vector or a non-finite component.
  void validate() const;

  friend bool operator==(const ActionVector&, const ActionVector&) = default;
};

enum class GateMode {
  kMotivationConsistent,  // reuse iff alpha <= epsilon1 and phi >= epsilon2
  kLiteralPaper,          // reuse iff alpha >  epsilon1 and phi >  epsilon2
};

struct GateConfig {
  double epsilon1 = 2.0;  // degrees
  double delta = 3.0;     // allowed token-set changes
  GateMode mode = GateMode::kMotivationConsistent;
  std::optional<double> epsilon2_override;

  void validate() const;
};

/// Action and token memories hold the last two pruned-inference outputs,
/// oldest first.
struct GateState {
  std::size_t step = 1;
  std::vector<ActionVector> action_memory;
  std::vector<TokenSet> token_memory;
  bool last_reuse = false;

  void validate() const;
};

enum class Verdict { kReuseAction, kPrunedInference };

enum class DecisionReason {
  kWarmup,
  kConsecutiveBlock,
  kPredicatePass,
  kPredicateFail,
  kDegenerateAction,
};

struct GateDecision {
  Verdict verdict = Verdict::kPrunedInference;
  std::optional<double> alpha_deg;
  std::optional<double> phi;
  std::optional<double> epsilon2_effective;  // absent until a token set is in memory
  DecisionReason reason = DecisionReason::kWarmup;
};

std::string_view to_string(Verdict v);
std::string_view to_string(DecisionReason r);
std::string_view to_string(GateMode m);
/// Accepts "default", "motivation-consistent", "literal", "literal-paper".
GateMode parse_gate_mode(std::string_view text);

/// What the policy would produce at this step if it ran.
struct Observation {
  ActionVector action;
  TokenSet tokens;
};

/// phi = |previous ∩ current| / |current|.
double token_overlap(const TokenSet& previous, const TokenSet& current);

/// epsilon2 = 1 - delta / current_set_size. Throws when delta exceeds the size.
double epsilon2_from_delta(double delta, std::size_t current_set_size);

GateDecision trigger_decide(const GateState& state, const GateConfig& config);

struct GateStepResult {
  GateDecision decision;
  ActionVector emitted_action;
  GateState new_state;
};

GateStepResult gate_step(const GateState& state, const GateConfig& config,
                         const Observation& observation);

struct ReplayResult {
  double reuse_rate = 0.0;
  std::vector<GateDecision> decisions;
  std::vector<ActionVector> emitted;

  std::size_t reuse_count() const;
};

ReplayResult replay_metrics(std::span<const Observation> trace, const GateConfig& config);

/// Stateful wrapper over gate_step for streaming use.
class FlashTrigger {
 public:
  explicit FlashTrigger(GateConfig config);

  GateDecision step(const Observation& observation, ActionVector* emitted = nullptr);

  const GateState& state() const noexcept { return state_; }
  const GateConfig& config() const noexcept { return config_; }
  void reset() { state_ = GateState{}; }

 private:
  GateConfig config_;
  GateState state_;
};

}  // namespace flashgate
