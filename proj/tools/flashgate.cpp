// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

// flashgate: token selection, reuse-gate replay, FLOPs estimation, trace
// synthesis, attention analysis and hyperparameter sweeps.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flashgate/analyzer.hpp"
#include "flashgate/commands.hpp"
#include "flashgate/error.hpp"
#include "flashgate/tensor_io.hpp"
#include "flashgate/trace.hpp"

namespace {

using namespace flashgate;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

// Writes to `path` or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
  } else {
    auto out = open_output(path);
    write(out);
    if (!out) throw IoError("failed writing " + path);
  }
}

void add_architecture_flags(CLI::App* cmd, FlopsParams& p) {
  cmd->add_option("--d", p.d, "hidden size")->capture_default_str();
  cmd->add_option("--m", p.m, "FFN intermediate size")->capture_default_str();
  cmd->add_option("--L", p.layers, "layer count")->capture_default_str();
  cmd->add_option("--Lp", p.prune_layer, "first pruned layer")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flashgate: visual-token selection and action-reuse gating toolkit"};
  app.require_subcommand(1);

  // select
  cli::SelectOptions select;
  std::string select_out;
  auto* select_cmd = app.add_subcommand("select", "rank tokens of a FVTS matrix by contribution score");
  select_cmd->add_option("--tensor", select.tensor, "2-D or 3-D FVTS tensor")->required();
  select_cmd->add_option("--k", select.k, "token budget")->required();
  select_cmd->add_option("--index", select.index, "matrix index within a 3-D stack");
  select_cmd->add_option("--rank-tol", select.rank_tolerance, "relative rank tolerance")
      ->capture_default_str();
  select_cmd->add_option("--out", select_out, "write JSON here instead of stdout");

  // gate
  cli::GateOptions gate;
  std::string gate_mode = "default";
  std::optional<double> gate_eps2;
  std::string gate_out;
  auto* gate_cmd = app.add_subcommand("gate", "replay a trace through the reuse gate");
  gate_cmd->add_option("--trace", gate.trace, "JSONL trace")->required();
  gate_cmd->add_option("--epsilon1", gate.config.epsilon1, "angle threshold (degrees)")
      ->capture_default_str();
  gate_cmd->add_option("--delta", gate.config.delta, "allowed token-set changes")
      ->capture_default_str();
  gate_cmd->add_option("--epsilon2", gate_eps2, "overlap threshold override in [0,1]");
  gate_cmd->add_option("--mode", gate_mode, "default | literal")->capture_default_str();
  gate_cmd->add_option("--k", gate.k, "token budget for tensor-backed steps");
  gate_cmd->add_option("--out", gate_out, "per-step CSV path");

  // flops
  FlopsParams flops;
  bool breakdown = false;
  std::optional<std::uint64_t> flops_np;
  auto* flops_cmd = app.add_subcommand("flops", "estimate visual-token FLOPs");
  flops_cmd->add_option("--n", flops.n, "visual tokens")->capture_default_str();
  flops_cmd->add_option("--np", flops_np, "tokens after pruning (default: --n)");
  flops_cmd->add_option("--R", flops.reuse_rate, "action reuse rate")->capture_default_str();
  add_architecture_flags(flops_cmd, flops);
  flops_cmd->add_flag("--breakdown", breakdown, "attribute savings to pruning and reuse");

  // sweep
  cli::SweepSpec sweep;
  std::string sweep_trace, sweep_out, sweep_mode = "default";
  std::size_t sweep_k = 0;
  std::optional<std::uint64_t> sweep_np;
  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon1 x delta grid over one trace");
  sweep_cmd->add_option("--trace", sweep_trace, "JSONL trace")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--epsilon1", sweep.epsilon1_values, "comma-separated grid")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--delta", sweep.delta_values, "comma-separated grid")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--mode", sweep_mode, "default | literal")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "CSV path (stdout when omitted)");
  sweep_cmd->add_option("--k", sweep_k, "token budget for tensor-backed steps");
  sweep_cmd->add_option("--n", sweep.architecture.n, "visual tokens")->capture_default_str();
  sweep_cmd->add_option("--np", sweep_np, "pruned tokens (default: trace token budget)");
  add_architecture_flags(sweep_cmd, sweep.architecture);
  sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = all cores)");

  // synth
  SynthSpec synth;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a seeded plateau trace");
  synth_cmd->add_option("--length", synth.length)->capture_default_str();
  synth_cmd->add_option("--action-dim", synth.action_dim)->capture_default_str();
  synth_cmd->add_option("--plateau-fraction", synth.plateau_fraction)->capture_default_str();
  synth_cmd->add_option("--plateau-run-length", synth.plateau_run_length)->capture_default_str();
  synth_cmd->add_option("--angle-noise-deg", synth.angle_noise_deg)->capture_default_str();
  synth_cmd->add_option("--token-universe", synth.token_universe)->capture_default_str();
  synth_cmd->add_option("--token-budget", synth.token_budget)->capture_default_str();
  synth_cmd->add_option("--token-churn", synth.token_churn)->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "RNG seed (falls back to FLASHGATE_SEED, then 0)");
  synth_cmd->add_option("--out", synth_out, "JSONL path (stdout when omitted)");

  // analyze
  std::string dump_path, analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "layer-wise sparsity of a 4-D attention dump");
  analyze_cmd->add_option("--dump", dump_path, "FVTS (layer, head, query, key) tensor")->required();
  analyze_cmd->add_option("--out", analyze_out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*select_cmd) {
      const auto report = cli::run_select(select);
      emit(select_out, [&](std::ostream& out) { out << report.dump() << '\n'; });
    } else if (*gate_cmd) {
      gate.config.mode = parse_gate_mode(gate_mode);
      gate.config.epsilon2_override = gate_eps2;
      const auto replay = cli::run_gate(gate);
      if (!gate_out.empty()) emit(gate_out, [&](std::ostream& out) { cli::write_gate_csv(replay, out); });
      std::cout << cli::gate_report(replay).dump() << '\n';
    } else if (*flops_cmd) {
      flops.n_pruned = flops_np.value_or(flops.n);
      std::cout << cli::flops_report(flops, breakdown);
    } else if (*sweep_cmd) {
      sweep.mode = parse_gate_mode(sweep_mode);
      sweep.n_pruned = sweep_np;
      const auto observations = cli::load_observations(sweep_trace, sweep_k, kDefaultRankTolerance);
      const auto rows = cli::run_sweep(observations, sweep);
      emit(sweep_out, [&](std::ostream& out) { cli::write_sweep_csv(rows, out); });
    } else if (*synth_cmd) {
      synth.seed = cli::resolve_seed(synth_seed);
      const auto steps = synthesize_trace(synth);
      emit(synth_out, [&](std::ostream& out) { write_trace(steps, out); });
    } else if (*analyze_cmd) {
      const auto dump = AttentionDump::from_tensor(read_tensor(std::filesystem::path(dump_path)));
      const auto profile = sparsity_profile(dump);
      emit(analyze_out, [&](std::ostream& out) { write_sparsity_csv(profile, out); });
    }
  } catch (const std::exception& e) {
    std::cerr << "flashgate: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
