// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/reuse_gate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flashgate/error.hpp"
#include "flashgate/linalg.hpp"

namespace flashgate {

namespace {

template <typename T>
void push_memory(std::vector<T>& memory, const T& value) {
  if (memory.size() == 2) memory.erase(memory.begin());
  memory.push_back(value);
}

}  // namespace

void ActionVector::validate() const {
  if (components.empty()) throw InvalidInput("action vector must have dimension >= 1");
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (!std::isfinite(components[i])) {
      throw InvalidInput("action component " + std::to_string(i) + " is not finite");
    }
  }
}

void GateConfig::validate() const {
  if (!(epsilon1 >= 0.0)) throw InvalidInput("epsilon1 must be >= 0");
  if (!(delta >= 0.0)) throw InvalidInput("delta must be >= 0");
  if (epsilon2_override && !(*epsilon2_override >= 0.0 && *epsilon2_override <= 1.0)) {
    throw InvalidInput("epsilon2 override must lie in [0, 1]");
  }
}

void GateState::validate() const {
  if (step < 1) throw InvalidInput("gate step is 1-based");
  if (action_memory.size() > 2 || token_memory.size() > 2) {
    throw InvalidInput("gate memories hold at most two entries");
  }
  if (step <= 2 && last_reuse) throw InvalidInput("last_reuse cannot be set during warm-up");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kReuseAction:
      return "reuse";
    case Verdict::kPrunedInference:
      return "pruned";
  }
  return "?";
}

std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::kWarmup:
      return "warmup";
    case DecisionReason::kConsecutiveBlock:
      return "consecutive-block";
    case DecisionReason::kPredicatePass:
      return "predicate-pass";
    case DecisionReason::kPredicateFail:
      return "predicate-fail";
    case DecisionReason::kDegenerateAction:
      return "degenerate-action";
  }
  return "?";
}

std::string_view to_string(GateMode m) {
  return m == GateMode::kLiteralPaper ? "literal-paper" : "motivation-consistent";
}

GateMode parse_gate_mode(std::string_view text) {
  if (text == "default" || text == "motivation-consistent") return GateMode::kMotivationConsistent;
  if (text == "literal" || text == "literal-paper") return GateMode::kLiteralPaper;
  throw InvalidInput("unknown gate mode '" + std::string(text) + "'");
}

double token_overlap(const TokenSet& previous, const TokenSet& current) {
  if (current.empty()) throw InvalidInput("token_overlap: current set is empty");
  return static_cast<double>(previous.intersection_size(current)) /
         static_cast<double>(current.budget());
}

double epsilon2_from_delta(double delta, std::size_t current_set_size) {
  if (current_set_size < 1) throw InvalidInput("epsilon2_from_delta: empty token set");
  if (!(delta >= 0.0) || delta > static_cast<double>(current_set_size)) {
    throw InvalidInput("epsilon2_from_delta: delta " + std::to_string(delta) +
                       " outside [0, " + std::to_string(current_set_size) + "]");
  }
  return 1.0 - delta / static_cast<double>(current_set_size);
}

GateDecision trigger_decide(const GateState& state, const GateConfig& config) {
  GateDecision d;
  if (!state.token_memory.empty()) {
    // Uses the raw ratio so a delta above the set size degrades to "any overlap passes".
    d.epsilon2_effective =
        config.epsilon2_override
            ? *config.epsilon2_override
            : 1.0 - config.delta / static_cast<double>(state.token_memory.back().budget());
  } else if (config.epsilon2_override) {
    d.epsilon2_effective = *config.epsilon2_override;
  }

  if (state.step <= 2 || state.action_memory.size() < 2 || state.token_memory.size() < 2) {
    d.reason = DecisionReason::kWarmup;
    return d;
  }
  if (state.last_reuse) {
    d.reason = DecisionReason::kConsecutiveBlock;
    return d;
  }

  try {
    d.alpha_deg = vector_angle_deg(state.action_memory[0].components,
                                   state.action_memory[1].components);
  } catch (const DegenerateVector&) {
    d.reason = DecisionReason::kDegenerateAction;
    return d;
  }
  d.phi = token_overlap(state.token_memory[0], state.token_memory[1]);

  const double alpha = *d.alpha_deg;
  const double phi = *d.phi;
  const double eps2 = *d.epsilon2_effective;
  const bool reuse = config.mode == GateMode::kLiteralPaper
                         ? (alpha > config.epsilon1 && phi > eps2)
                         : (alpha <= config.epsilon1 && phi >= eps2);
  if (reuse) {
    d.verdict = Verdict::kReuseAction;
    d.reason = DecisionReason::kPredicatePass;
  } else {
    d.reason = DecisionReason::kPredicateFail;
  }
  return d;
}

GateStepResult gate_step(const GateState& state, const GateConfig& config,
                         const Observation& observation) {
  observation.action.validate();
  if (observation.tokens.empty()) throw InvalidInput("gate_step: candidate token set is empty");
  if (!state.action_memory.empty() &&
      state.action_memory.back().dim() != observation.action.dim()) {
    throw InvalidInput("gate_step: action dimension " + std::to_string(observation.action.dim()) +
                       " != memory dimension " +
                       std::to_string(state.action_memory.back().dim()));
  }

  GateStepResult out{trigger_decide(state, config), {}, state};
  if (out.decision.verdict == Verdict::kReuseAction) {
    out.emitted_action = state.action_memory.back();
    out.new_state.last_reuse = true;
  } else {
    out.emitted_action = observation.action;
    push_memory(out.new_state.action_memory, observation.action);
    push_memory(out.new_state.token_memory, observation.tokens);
    out.new_state.last_reuse = false;
  }
  ++out.new_state.step;
  return out;
}

std::size_t ReplayResult::reuse_count() const {
  return static_cast<std::size_t>(std::count_if(decisions.begin(), decisions.end(), [](const auto& d) {
    return d.verdict == Verdict::kReuseAction;
  }));
}

ReplayResult replay_metrics(std::span<const Observation> trace, const GateConfig& config) {
  if (trace.empty()) throw InvalidInput("replay_metrics: empty trace");
  config.validate();
  ReplayResult out;
  out.decisions.reserve(trace.size());
  out.emitted.reserve(trace.size());
  GateState state;
  for (const auto& obs : trace) {
    auto step = gate_step(state, config, obs);
    out.decisions.push_back(step.decision);
    out.emitted.push_back(std::move(step.emitted_action));
    state = std::move(step.new_state);
  }
  out.reuse_rate = static_cast<double>(out.reuse_count()) / static_cast<double>(trace.size());
  return out;
}

FlashTrigger::FlashTrigger(GateConfig config) : config_(config) { config_.validate(); }

GateDecision FlashTrigger::step(const Observation& observation, ActionVector* emitted) {
  auto result = gate_step(state_, config_, observation);
  state_ = std::move(result.new_state);
  if (emitted != nullptr) *emitted = std::move(result.emitted_action);
  return result.decision;
}

}  // namespace flashgate
