// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "flashgate/error.hpp"
#include "flashgate/trace.hpp"

namespace flashgate {

namespace {

class Generator {
 public:
  explicit Generator(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {}

  std::vector<double> random_direction() {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(spec_.action_dim);
    double norm = 0.0;
    do {
      for (auto& x : v) x = normal(rng_);
      norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    } while (norm < 1e-6);
    for (auto& x : v) x /= norm;
    return v;
  }

  // Rotates unit vector `a` by a uniform angle in [0, angle_noise_deg] towards a
  // random orthogonal direction.
  std::vector<double> perturb(const std::vector<double>& a) {
    if (spec_.angle_noise_deg == 0.0 || a.size() < 2) return a;
    std::uniform_real_distribution<double> uniform(0.0, spec_.angle_noise_deg);
    const double theta = uniform(rng_) * std::numbers::pi / 180.0;
    std::vector<double> b;
    double norm = 0.0;
    do {
      b = random_direction();
      const double proj = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] -= proj * a[i];
      norm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    } while (norm < 1e-6);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      out[i] = std::cos(theta) * a[i] + std::sin(theta) * b[i] / norm;
    }
    return out;
  }

  // Seeded Fisher-Yates prefix of length K over [0, N).
  std::vector<std::size_t> random_subset() {
    std::vector<std::size_t> pool(spec_.token_universe);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < spec_.token_budget; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng_)]);
    }
    pool.resize(spec_.token_budget);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  // Replaces between 0 and floor(token_churn) members with non-members.
  std::vector<std::size_t> churn(const std::vector<std::size_t>& current) {
    const auto max_changes = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(spec_.token_churn)),
        std::min(current.size(), spec_.token_universe - current.size()));
    if (max_changes == 0) return current;
    const std::size_t changes = std::uniform_int_distribution<std::size_t>(0, max_changes)(rng_);

    std::vector<std::size_t> kept = current;
    for (std::size_t i = 0; i < changes; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, kept.size() - 1);
      std::swap(kept[i], kept[pick(rng_)]);
    }
    std::vector<std::size_t> outside;
    outside.reserve(spec_.token_universe - current.size());
    for (std::size_t x = 0; x < spec_.token_universe; ++x) {
      if (!std::binary_search(current.begin(), current.end(), x)) outside.push_back(x);
    }
    for (std::size_t i = 0; i < changes; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, outside.size() - 1);
      std::swap(outside[i], outside[pick(rng_)]);
      kept[i] = outside[i];
    }
    std::sort(kept.begin(), kept.end());
    return kept;
  }

  std::size_t run_length() {
    std::geometric_distribution<std::size_t> geometric(1.0 / spec_.plateau_run_length);
    return geometric(rng_) + 1;
  }

  bool bernoulli(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  const SynthSpec& spec_;
  std::mt19937_64 rng_;
};

}  // namespace

void SynthSpec::validate() const {
  if (length < 1) throw InvalidInput("synth: length must be >= 1");
  if (action_dim < 1) throw InvalidInput("synth: action_dim must be >= 1");
  if (!(plateau_fraction >= 0.0 && plateau_fraction <= 1.0)) {
    throw InvalidInput("synth: plateau_fraction must lie in [0, 1]");
  }
  if (!(plateau_run_length >= 1.0)) throw InvalidInput("synth: plateau_run_length must be >= 1");
  if (!(angle_noise_deg >= 0.0 && angle_noise_deg <= 180.0)) {
    throw InvalidInput("synth: angle_noise_deg must lie in [0, 180]");
  }
  if (token_budget < 1 || token_budget > token_universe) {
    throw InvalidInput("synth: token_budget must lie in [1, token_universe]");
  }
  if (!(token_churn >= 0.0 && token_churn <= static_cast<double>(token_budget))) {
    throw InvalidInput("synth: token_churn must lie in [0, token_budget]");
  }
}

SyntheticTrace synthesize_trace_annotated(const SynthSpec& spec) {
  spec.validate();
  Generator gen(spec);

  const auto plateau_target =
      static_cast<std::size_t>(std::llround(spec.plateau_fraction * static_cast<double>(spec.length)));
  const std::size_t free_target = spec.length - plateau_target;

  SyntheticTrace out;
  out.steps.reserve(spec.length);
  out.in_plateau.reserve(spec.length);
  std::size_t plateau_done = 0;
  std::size_t free_done = 0;

  auto emit = [&](std::vector<double> action, std::vector<std::size_t> tokens, bool plateau) {
    TraceStep s;
    s.step = out.steps.size() + 1;
    s.action.components = std::move(action);
    s.tokens = TokenSet(std::move(tokens), spec.token_universe);
    s.done = s.step == spec.length;
    out.steps.push_back(std::move(s));
    out.in_plateau.push_back(plateau);
  };

  bool last_was_plateau = false;
  while (out.steps.size() < spec.length) {
    const std::size_t plateau_left = plateau_target - plateau_done;
    const std::size_t free_left = free_target - free_done;

    // Pick the next segment in proportion to the remaining segment counts so
    // runs spread evenly; a run is never followed directly by another run.
    bool plateau = false;
    if (plateau_left > 0 && (free_left == 0 || !last_was_plateau)) {
      const double runs_left = static_cast<double>(plateau_left) / spec.plateau_run_length;
      plateau = free_left == 0 || gen.bernoulli(runs_left / (runs_left + static_cast<double>(free_left)));
    }

    if (!plateau) {
      emit(gen.random_direction(), gen.random_subset(), false);
      ++free_done;
      last_was_plateau = false;
      continue;
    }

    // With no independent steps left the run absorbs the whole plateau budget,
    // so runs never abut.
    const std::size_t run = free_left == 0 ? plateau_left : std::min(gen.run_length(), plateau_left);
    std::vector<double> action = gen.random_direction();
    std::vector<std::size_t> tokens = gen.random_subset();
    for (std::size_t i = 0; i < run; ++i) {
      if (i > 0) {
        action = gen.perturb(action);
        tokens = gen.churn(tokens);
      }
      emit(action, tokens, true);
    }
    plateau_done += run;
    last_was_plateau = true;
  }
  return out;
}

std::vector<TraceStep> synthesize_trace(const SynthSpec& spec) {
  return synthesize_trace_annotated(spec).steps;
}

}  // namespace flashgate
