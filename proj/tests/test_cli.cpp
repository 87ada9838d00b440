// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "flashgate/commands.hpp"
#include "flashgate/error.hpp"
#include "flashgate/tensor_io.hpp"
#include "flashgate/trace.hpp"
#include "support/fixtures.hpp"

namespace flashgate {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() / "flashgate_cli_tests" / (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<TraceStep> constant_trace(std::size_t n) {
  std::vector<std::size_t> set(192);
  std::iota(set.begin(), set.end(), 0);
  std::vector<TraceStep> out;
  for (std::size_t s = 1; s <= n; ++s) out.push_back({s, ActionVector{{0.2, 0.1, 1.0}}, TokenSet(set, 256), s == n});
  return out;
}

std::vector<TraceStep> orthogonal_trace(std::size_t n) {
  std::vector<TraceStep> out;
  for (std::size_t s = 1; s <= n; ++s) {
    std::vector<double> a(n, 0.0);
    a[s - 1] = 1.0;
    out.push_back({s, ActionVector{a}, TokenSet({0, 1, 2, 3}, 8), s == n});
  }
  return out;
}

fs::path write_trace_file(const fs::path& dir, const std::vector<TraceStep>& steps, const std::string& name) {
  write_trace(steps, dir / name);
  return dir / name;
}

// ---- in-process command layer ----

TEST(SelectCommandTest, DiagonalAndFullBudget) {
  const auto dir = scratch_dir();
  write_tensor(Tensor::from_matrix(DenseMatrix(3, 2, {3, 0, 0, 2, 0, 0})), dir / "d.fvts");
  cli::SelectOptions o;
  o.tensor = dir / "d.fvts";
  o.k = 1;
  auto r = cli::run_select(o);
  EXPECT_EQ(r["indices"], cli::Json::parse("[0]"));
  EXPECT_NEAR(r["retention"].get<double>(), 9.0, 1e-9);
  o.k = 3;
  r = cli::run_select(o);
  EXPECT_EQ(r["indices"], cli::Json::parse("[0,1,2]"));
  o.k = 4;
  EXPECT_THROW(cli::run_select(o), InvalidInput);
}

TEST(SelectCommandTest, SeededRetentionBeatsRandom) {
  const auto dir = scratch_dir();
  write_tensor(Tensor::from_matrix(testing::seeded_matrix(64, 32, 64)), dir / "m.fvts");
  cli::SelectOptions o;
  o.tensor = dir / "m.fvts";
  o.k = 16;
  const auto r = cli::run_select(o);
  EXPECT_EQ(r["indices"].size(), 16u);
  EXPECT_GE(r["retention"].get<double>(), r["expected_random"].get<double>());
  // JSON output survives a read-back.
  EXPECT_EQ(cli::Json::parse(r.dump()), r);
}

TEST(GateCommandTest, ConstantAndOrthogonalTraces) {
  const auto dir = scratch_dir();
  cli::GateOptions o;
  o.trace = write_trace_file(dir, constant_trace(12), "c.jsonl");
  auto replay = cli::run_gate(o);
  EXPECT_DOUBLE_EQ(replay.reuse_rate, 5.0 / 12.0);
  const auto report = cli::gate_report(replay);
  EXPECT_EQ(report["steps"], 12);
  EXPECT_EQ(report["decisions"].size(), 12u);
  EXPECT_EQ(report["decisions"][0]["reason"], "warmup");
  EXPECT_TRUE(report["decisions"][0]["alpha_deg"].is_null());

  o.config.mode = GateMode::kLiteralPaper;
  EXPECT_DOUBLE_EQ(cli::run_gate(o).reuse_rate, 0.0);

  o.config = GateConfig{};
  o.trace = write_trace_file(dir, orthogonal_trace(6), "o.jsonl");
  EXPECT_DOUBLE_EQ(cli::run_gate(o).reuse_rate, 0.0);

  std::ostringstream csv;
  cli::write_gate_csv(replay, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "step,verdict,reason,alpha_deg,phi,epsilon2");
}

TEST(GateCommandTest, ParseErrorsCarryLineNumbers) {
  const auto dir = scratch_dir();
  std::ofstream(dir / "bad.jsonl") << R"({"step":1,"action":[1],"tokens":{"set":[0]},"done":false})" << "\n"
                                   << R"({"step":3,"action":[1],"tokens":{"set":[0]},"done":false})" << "\n";
  cli::GateOptions o;
  o.trace = dir / "bad.jsonl";
  try {
    cli::run_gate(o);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(FlopsCommandTest, FormatsTeraflops) {
  EXPECT_EQ(cli::format_teraflops(1305670057984.0), "1.31");
  EXPECT_EQ(cli::format_teraflops(536854134784.0), "0.54");
  EXPECT_EQ(cli::format_teraflops(0.0), "0.00");
  FlopsParams p;
  EXPECT_EQ(cli::flops_report(p, false), "1.31\n");
  p.n_pruned = 192;
  p.reuse_rate = 0.2;
  const auto text = cli::flops_report(p, true);
  EXPECT_EQ(text.substr(0, text.find('\n')), "0.80");
  EXPECT_NE(text.find("baseline: 1.31"), std::string::npos);
}

SynthSpec reference_spec() {
  SynthSpec s;
  s.length = 1000;
  s.angle_noise_deg = 0.2;
  s.token_churn = 2;
  s.seed = 6;
  return s;
}

std::vector<Observation> observations_of(const std::vector<TraceStep>& steps) {
  return resolve_observations(steps, ResolveOptions{});
}

TEST(SweepCommandTest, SinglePointEqualsGateThenFlops) {
  const auto obs = observations_of(synthesize_trace(reference_spec()));
  cli::SweepSpec spec;
  spec.epsilon1_values = {2.0};
  spec.delta_values = {3.0};
  spec.threads = 1;
  const auto rows = cli::run_sweep(obs, spec);
  ASSERT_EQ(rows.size(), 1u);
  const auto replay = replay_metrics(obs, GateConfig{});
  EXPECT_EQ(rows[0].reuse_rate, replay.reuse_rate);
  FlopsParams p;
  p.n_pruned = 192;
  p.reuse_rate = replay.reuse_rate;
  EXPECT_EQ(rows[0].flops, estimate_flops(p));
}

TEST(SweepCommandTest, OrderStableAcrossThreadCounts) {
  const auto obs = observations_of(synthesize_trace(reference_spec()));
  cli::SweepSpec spec;
  spec.epsilon1_values = {1, 2, 3, 4};
  spec.delta_values = {0, 1, 3, 5};
  spec.threads = 1;
  const auto serial = cli::run_sweep(obs, spec);
  spec.threads = 4;
  const auto parallel = cli::run_sweep(obs, spec);
  ASSERT_EQ(serial.size(), 16u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].epsilon1, spec.epsilon1_values[i / 4]);
    EXPECT_EQ(serial[i].delta, spec.delta_values[i % 4]);
    EXPECT_EQ(serial[i].reuse_rate, parallel[i].reuse_rate);
  }
  std::ostringstream csv;
  cli::write_sweep_csv(serial, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "epsilon1,delta,reuse_rate,flops_estimate");
}

TEST(SweepCommandTest, MonotoneInDeltaAndFlatInEpsilon1) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto s = reference_spec();
    s.seed = seed;
    const auto obs = observations_of(synthesize_trace(s));
    cli::SweepSpec spec;
    spec.epsilon1_values = {1, 2, 3, 4};
    spec.delta_values = {0, 1, 3, 5};
    spec.threads = 2;
    const auto rows = cli::run_sweep(obs, spec);
    for (std::size_t e = 0; e < 4; ++e)
      for (std::size_t d = 1; d < 4; ++d) EXPECT_GE(rows[e * 4 + d].reuse_rate, rows[e * 4 + d - 1].reuse_rate);
    for (std::size_t d = 0; d < 4; ++d) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t e = 0; e < 4; ++e) {
        lo = std::min(lo, rows[e * 4 + d].reuse_rate);
        hi = std::max(hi, rows[e * 4 + d].reuse_rate);
      }
      EXPECT_LT(hi - lo, 0.02) << "seed " << seed << " delta " << spec.delta_values[d];
    }
  }
}

TEST(SweepCommandTest, InvalidSpec) {
  const auto obs = observations_of(constant_trace(5));
  cli::SweepSpec spec;
  spec.delta_values = {1};
  EXPECT_THROW(cli::run_sweep(obs, spec), InvalidInput);
}

TEST(SeedTest, FlagThenEnvironmentThenZero) {
  ::unsetenv("FLASHGATE_SEED");
  EXPECT_EQ(cli::resolve_seed(std::nullopt), 0u);
  ::setenv("FLASHGATE_SEED", "42", 1);
  EXPECT_EQ(cli::resolve_seed(std::nullopt), 42u);
  EXPECT_EQ(cli::resolve_seed(7), 7u);
  ::setenv("FLASHGATE_SEED", "-3", 1);
  EXPECT_THROW(cli::resolve_seed(std::nullopt), InvalidInput);
  ::setenv("FLASHGATE_SEED", "12x", 1);
  EXPECT_THROW(cli::resolve_seed(std::nullopt), InvalidInput);
  ::unsetenv("FLASHGATE_SEED");
}

// ---- the executable ----

#ifdef FLASHGATE_CLI_PATH

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(FLASHGATE_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

TEST(ExecutableTest, Flops) {
  EXPECT_EQ(run("flops --n 256 --np 256 --R 0").out, "1.31\n");
  EXPECT_EQ(run("flops --n 256 --np 96 --R 0").out, "0.54\n");
  EXPECT_EQ(run("flops --R 1").out, "0.00\n");
  EXPECT_EQ(run("flops --np 300").exit_code, 1);
}

TEST(ExecutableTest, SynthThenGate) {
  const auto dir = scratch_dir();
  const auto trace = (dir / "c.jsonl").string();
  ASSERT_EQ(run("synth --length 12 --plateau-fraction 1 --out " + trace).exit_code, 0);
  const auto gate = run("gate --trace " + trace + " --out " + (dir / "g.csv").string());
  ASSERT_EQ(gate.exit_code, 0);
  const auto json = cli::Json::parse(gate.out);
  EXPECT_DOUBLE_EQ(json["reuse_rate"].get<double>(), 5.0 / 12.0);
  EXPECT_TRUE(fs::exists(dir / "g.csv"));
  EXPECT_DOUBLE_EQ(cli::Json::parse(run("gate --mode literal --trace " + trace).out)["reuse_rate"].get<double>(), 0.0);
  EXPECT_EQ(run("gate --trace " + (dir / "missing.jsonl").string()).exit_code, 1);
}

TEST(ExecutableTest, SynthIsDeterministicAndHonoursEnvSeed) {
  const auto a = run("synth --length 50 --seed 5");
  const auto b = run("synth --length 50 --seed 5");
  EXPECT_EQ(a.out, b.out);
  const auto env = run("synth --length 50").out;
  ::setenv("FLASHGATE_SEED", "5", 1);
  EXPECT_EQ(run("synth --length 50").out, a.out);
  ::unsetenv("FLASHGATE_SEED");
  EXPECT_NE(env, a.out);
}

TEST(ExecutableTest, SelectSweepAnalyze) {
  const auto dir = scratch_dir();
  write_tensor(Tensor::from_matrix(DenseMatrix(3, 2, {3, 0, 0, 2, 0, 0})), dir / "d.fvts");
  const auto sel = run("select --tensor " + (dir / "d.fvts").string() + " --k 1");
  ASSERT_EQ(sel.exit_code, 0);
  EXPECT_EQ(cli::Json::parse(sel.out)["indices"], cli::Json::parse("[0]"));
  EXPECT_EQ(run("select --tensor " + (dir / "d.fvts").string() + " --k 9").exit_code, 1);

  write_trace(constant_trace(12), dir / "c.jsonl");
  const auto sweep = run("sweep --trace " + (dir / "c.jsonl").string() + " --epsilon1 1,2 --delta 0,3");
  ASSERT_EQ(sweep.exit_code, 0);
  EXPECT_EQ(std::count(sweep.out.begin(), sweep.out.end(), '\n'), 5);

  Tensor dump;
  dump.dims = {1, 1, 1, 4};
  dump.values = {0.25f, 0.25f, 0.25f, 0.25f};
  write_tensor(dump, dir / "a.fvts");
  const auto an = run("analyze --dump " + (dir / "a.fvts").string());
  ASSERT_EQ(an.exit_code, 0);
  EXPECT_EQ(an.out.substr(0, an.out.find('\n')), "layer,entropy,top8,top16,top32,gini");
}

#endif

}  // namespace
}  // namespace flashgate
