// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "flashgate/csv.hpp"
#include "flashgate/error.hpp"
#include "flashgate/ics.hpp"
#include "flashgate/tensor_io.hpp"
#include "flashgate/trace.hpp"

namespace flashgate::cli {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json run_select(const SelectOptions& options) {
  const Tensor tensor = read_tensor(options.tensor);
  const DenseMatrix tokens = tensor.matrix(options.index);
  const SvdFactors factors = svd_decompose(tokens, options.rank_tolerance);
  const IcsScores scores = contribution_scores(factors);
  const TokenSet selected = select_top_k(scores, options.k);

  Json out;
  out["indices"] = std::vector<std::size_t>(selected.indices().begin(), selected.indices().end());
  out["scores"] = scores.scores;
  out["rank"] = factors.rank();
  out["retention"] = information_retention(factors, selected, factors.rank());
  out["expected_random"] = expected_random_retention(factors, options.k, factors.rank());
  return out;
}

std::vector<Observation> load_observations(const std::filesystem::path& trace, std::size_t k,
                                           double rank_tolerance) {
  const auto steps = read_trace(trace);
  if (steps.empty()) throw InvalidInput(trace.string() + ": trace is empty");
  ResolveOptions resolve;
  resolve.base_dir = trace.parent_path();
  resolve.k = k;
  resolve.rank_tolerance = rank_tolerance;
  return resolve_observations(steps, resolve);
}

Json gate_report(const ReplayResult& replay) {
  Json decisions = Json::array();
  for (std::size_t i = 0; i < replay.decisions.size(); ++i) {
    const auto& d = replay.decisions[i];
    Json row;
    row["step"] = i + 1;
    row["verdict"] = to_string(d.verdict);
    row["reason"] = to_string(d.reason);
    row["alpha_deg"] = optional_number(d.alpha_deg);
    row["phi"] = optional_number(d.phi);
    row["epsilon2"] = optional_number(d.epsilon2_effective);
    decisions.push_back(std::move(row));
  }
  Json out;
  out["reuse_rate"] = replay.reuse_rate;
  out["decisions"] = std::move(decisions);
  out["steps"] = replay.decisions.size();
  return out;
}

void write_gate_csv(const ReplayResult& replay, std::ostream& out) {
  auto cell = [](const std::optional<double>& v) { return v ? csv::number(*v) : std::string(); };
  out << "step,verdict,reason,alpha_deg,phi,epsilon2\n";
  for (std::size_t i = 0; i < replay.decisions.size(); ++i) {
    const auto& d = replay.decisions[i];
    out << (i + 1) << ',' << to_string(d.verdict) << ',' << to_string(d.reason) << ','
        << cell(d.alpha_deg) << ',' << cell(d.phi) << ',' << cell(d.epsilon2_effective) << '\n';
  }
}

ReplayResult run_gate(const GateOptions& options) {
  const auto observations = load_observations(options.trace, options.k, options.rank_tolerance);
  return replay_metrics(observations, options.config);
}

std::string format_teraflops(double flops) { return csv::fixed(flops / 1e12, 2); }

std::string flops_report(const FlopsParams& params, bool breakdown) {
  std::ostringstream out;
  out << format_teraflops(estimate_flops(params)) << '\n';
  if (breakdown) {
    const auto b = savings_breakdown(params);
    out << "baseline: " << format_teraflops(b.baseline) << '\n'
        << "after_pruning: " << format_teraflops(b.after_pruning) << '\n'
        << "after_pruning_and_reuse: " << format_teraflops(b.after_pruning_and_reuse) << '\n'
        << "pruning_share: " << csv::fixed(b.pruning_share, 3) << '\n'
        << "reuse_share: " << csv::fixed(b.reuse_share, 3) << '\n';
  }
  return out.str();
}

void SweepSpec::validate() const {
  if (epsilon1_values.empty() || delta_values.empty()) {
    throw InvalidInput("sweep: epsilon1 and delta grids must be non-empty");
  }
}

std::vector<SweepRow> run_sweep(std::span<const Observation> trace, const SweepSpec& spec) {
  spec.validate();
  if (trace.empty()) throw InvalidInput("sweep: empty trace");

  FlopsParams arch = spec.architecture;
  arch.n_pruned = spec.n_pruned.value_or(trace.front().tokens.budget());
  arch.reuse_rate = 0.0;
  arch.validate();

  std::vector<SweepRow> rows;
  for (double e1 : spec.epsilon1_values)
    for (double delta : spec.delta_values) rows.push_back({e1, delta, 0.0, 0.0});

  unsigned workers = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows.size())));

  // Each worker owns a strided slice of the grid; rows keep grid order.
  std::vector<std::exception_ptr> failures(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < rows.size(); i += workers) {
        GateConfig config;
        config.epsilon1 = rows[i].epsilon1;
        config.delta = rows[i].delta;
        config.mode = spec.mode;
        rows[i].reuse_rate = replay_metrics(trace, config).reuse_rate;
        FlopsParams p = arch;
        p.reuse_rate = rows[i].reuse_rate;
        rows[i].flops = estimate_flops(p);
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  pool.clear();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "epsilon1,delta,reuse_rate,flops_estimate\n";
  for (const auto& r : rows) {
    out << csv::number(r.epsilon1) << ',' << csv::number(r.delta) << ','
        << csv::number(r.reuse_rate) << ',' << csv::number(r.flops / 1e12) << '\n';
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FLASHGATE_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (env[0] != '-' && used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("FLASHGATE_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

}  // namespace flashgate::cli
