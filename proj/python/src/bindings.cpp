// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <vector>

#include "flashgate/analyzer.hpp"
#include "flashgate/error.hpp"
#include "flashgate/flops.hpp"
#include "flashgate/ics.hpp"
#include "flashgate/linalg.hpp"
#include "flashgate/reuse_gate.hpp"
#include "flashgate/tensor_io.hpp"
#include "flashgate/trace.hpp"

namespace py = pybind11;
using namespace flashgate;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const F64Array& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

py::array_t<double> to_array(const DenseMatrix& m) {
  if (m.empty()) return py::array_t<double>(std::vector<py::ssize_t>{0, 0});
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

TokenSet to_token_set(std::vector<std::size_t> indices) { return TokenSet::from_indices(std::move(indices)); }

std::vector<std::size_t> to_list(const TokenSet& s) { return {s.indices().begin(), s.indices().end()}; }

Observation to_observation(std::vector<double> action, std::vector<std::size_t> tokens) {
  return {ActionVector{std::move(action)}, to_token_set(std::move(tokens))};
}

py::dict decision_dict(const GateDecision& d) {
  py::dict out;
  out["verdict"] = std::string(to_string(d.verdict));
  out["reason"] = std::string(to_string(d.reason));
  out["alpha_deg"] = d.alpha_deg;
  out["phi"] = d.phi;
  out["epsilon2"] = d.epsilon2_effective;
  return out;
}

py::dict step_dict(const TraceStep& s) {
  py::dict out;
  out["step"] = s.step;
  out["action"] = s.action.components;
  if (const auto* set = std::get_if<TokenSet>(&s.tokens)) {
    out["tokens"] = to_list(*set);
  } else {
    const auto& ref = std::get<TensorRef>(s.tokens);
    out["tokens"] = py::make_tuple(ref.path, ref.index);
  }
  out["done"] = s.done;
  return out;
}

AttentionDump to_dump(const F64Array& a) {
  if (a.ndim() != 4) throw InvalidInput("expected a 4-D (layer, head, query, key) array");
  const auto n = static_cast<std::size_t>(a.size());
  return AttentionDump(a.shape(0), a.shape(1), a.shape(2), a.shape(3),
                       std::vector<double>(a.data(), a.data() + n));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Visual-token selection, action-reuse gating and FLOPs accounting";

  auto base = py::register_exception<Error>(m, "FlashGateError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DegenerateVector>(m, "DegenerateVector", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  // numeric core
  m.def(
      "svd_decompose",
      [](const F64Array& a, double tol) {
        const auto f = svd_decompose(to_matrix(a), tol);
        return py::make_tuple(to_array(f.u), to_array(f.sigma), to_array(f.v));
      },
      py::arg("matrix"), py::arg("rank_tolerance") = kDefaultRankTolerance,
      "Thin SVD (u, sigma, v) truncated to the effective rank.");
  m.def("frobenius_norm", [](const F64Array& a) { return frobenius_norm(to_matrix(a)); });
  m.def("vector_angle_deg", [](std::vector<double> a, std::vector<double> b) {
    return vector_angle_deg(a, b);
  });

  // token selection
  m.def(
      "contribution_scores",
      [](const F64Array& a, double tol) { return to_array(contribution_scores(to_matrix(a), tol).scores); },
      py::arg("tokens"), py::arg("rank_tolerance") = kDefaultRankTolerance);
  m.def(
      "select_top_k",
      [](std::vector<double> scores, std::size_t k) {
        return to_list(select_top_k(IcsScores{std::move(scores), 0}, k));
      },
      py::arg("scores"), py::arg("k"));
  m.def(
      "information_retention",
      [](const F64Array& a, std::vector<std::size_t> subset, std::size_t r) {
        const auto matrix = to_matrix(a);
        return information_retention(matrix, TokenSet(std::move(subset), matrix.rows()), r);
      },
      py::arg("tokens"), py::arg("subset"), py::arg("r"));
  m.def(
      "expected_random_retention",
      [](const F64Array& a, std::size_t k, std::size_t r) {
        return expected_random_retention(to_matrix(a), k, r);
      },
      py::arg("tokens"), py::arg("k"), py::arg("r"));
  m.def(
      "cauchy_schwarz_margin",
      [](const F64Array& a, std::size_t x) {
        const auto margin = cauchy_schwarz_margin(to_matrix(a), x);
        return py::make_tuple(margin.lhs, margin.rhs);
      },
      py::arg("tokens"), py::arg("x"));

  // reuse gate
  py::enum_<GateMode>(m, "GateMode")
      .value("MOTIVATION_CONSISTENT", GateMode::kMotivationConsistent)
      .value("LITERAL_PAPER", GateMode::kLiteralPaper);

  py::class_<GateConfig>(m, "GateConfig")
      .def(py::init([](double epsilon1, double delta, GateMode mode, std::optional<double> eps2) {
             GateConfig c{epsilon1, delta, mode, eps2};
             c.validate();
             return c;
           }),
           py::arg("epsilon1") = 2.0, py::arg("delta") = 3.0,
           py::arg("mode") = GateMode::kMotivationConsistent, py::arg("epsilon2_override") = py::none())
      .def_readwrite("epsilon1", &GateConfig::epsilon1)
      .def_readwrite("delta", &GateConfig::delta)
      .def_readwrite("mode", &GateConfig::mode)
      .def_readwrite("epsilon2_override", &GateConfig::epsilon2_override);

  m.def("token_overlap", [](std::vector<std::size_t> previous, std::vector<std::size_t> current) {
    return token_overlap(to_token_set(std::move(previous)), to_token_set(std::move(current)));
  });
  m.def("epsilon2_from_delta", &epsilon2_from_delta, py::arg("delta"), py::arg("current_set_size"));

  py::class_<FlashTrigger>(m, "FlashTrigger")
      .def(py::init<GateConfig>(), py::arg("config") = GateConfig{})
      .def(
          "step",
          [](FlashTrigger& self, std::vector<double> action, std::vector<std::size_t> tokens) {
            ActionVector emitted;
            const auto d = self.step(to_observation(std::move(action), std::move(tokens)), &emitted);
            return py::make_tuple(decision_dict(d), emitted.components);
          },
          py::arg("action"), py::arg("tokens"),
          "Feed the would-be policy output; returns (decision, emitted_action).")
      .def_property_readonly("step_index", [](const FlashTrigger& t) { return t.state().step; })
      .def_property_readonly("last_reuse", [](const FlashTrigger& t) { return t.state().last_reuse; })
      .def("reset", &FlashTrigger::reset);

  m.def(
      "replay",
      [](std::vector<std::vector<double>> actions, std::vector<std::vector<std::size_t>> token_sets,
         const GateConfig& config) {
        if (actions.size() != token_sets.size()) throw InvalidInput("actions and token_sets differ in length");
        std::vector<Observation> trace;
        trace.reserve(actions.size());
        for (std::size_t i = 0; i < actions.size(); ++i) {
          trace.push_back(to_observation(std::move(actions[i]), std::move(token_sets[i])));
        }
        const auto result = replay_metrics(trace, config);
        py::list decisions, emitted;
        for (const auto& d : result.decisions) decisions.append(decision_dict(d));
        for (const auto& a : result.emitted) emitted.append(a.components);
        py::dict out;
        out["reuse_rate"] = result.reuse_rate;
        out["decisions"] = decisions;
        out["emitted"] = emitted;
        return out;
      },
      py::arg("actions"), py::arg("token_sets"), py::arg("config") = GateConfig{});

  // FLOPs model
  py::class_<FlopsParams>(m, "FlopsParams")
      .def(py::init([](std::uint64_t n, std::uint64_t n_pruned, double reuse_rate, std::uint64_t d,
                       std::uint64_t mdim, std::uint64_t layers, std::uint64_t prune_layer) {
             FlopsParams p{n, d, mdim, layers, prune_layer, n_pruned, reuse_rate};
             p.validate();
             return p;
           }),
           py::arg("n") = 256, py::arg("n_pruned") = 256, py::arg("reuse_rate") = 0.0,
           py::arg("d") = 4096, py::arg("m") = 11008, py::arg("layers") = 32,
           py::arg("prune_layer") = 2)
      .def_readwrite("n", &FlopsParams::n)
      .def_readwrite("n_pruned", &FlopsParams::n_pruned)
      .def_readwrite("reuse_rate", &FlopsParams::reuse_rate)
      .def_readwrite("d", &FlopsParams::d)
      .def_readwrite("m", &FlopsParams::m)
      .def_readwrite("layers", &FlopsParams::layers)
      .def_readwrite("prune_layer", &FlopsParams::prune_layer);

  m.def("layer_cost", &layer_cost, py::arg("tokens"), py::arg("d"), py::arg("m"));
  m.def("estimate_flops", &estimate_flops, py::arg("params"));
  m.def("savings_breakdown", [](const FlopsParams& p) {
    const auto b = savings_breakdown(p);
    py::dict out;
    out["baseline"] = b.baseline;
    out["after_pruning"] = b.after_pruning;
    out["after_pruning_and_reuse"] = b.after_pruning_and_reuse;
    out["pruning_share"] = b.pruning_share;
    out["reuse_share"] = b.reuse_share;
    return out;
  });
  m.def("implied_reuse_rate", py::overload_cast<double, const FlopsParams&>(&implied_reuse_rate),
        py::arg("observed"), py::arg("params_at_r0"));

  // traces and tensors
  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("length", &SynthSpec::length)
      .def_readwrite("action_dim", &SynthSpec::action_dim)
      .def_readwrite("plateau_fraction", &SynthSpec::plateau_fraction)
      .def_readwrite("plateau_run_length", &SynthSpec::plateau_run_length)
      .def_readwrite("angle_noise_deg", &SynthSpec::angle_noise_deg)
      .def_readwrite("token_universe", &SynthSpec::token_universe)
      .def_readwrite("token_budget", &SynthSpec::token_budget)
      .def_readwrite("token_churn", &SynthSpec::token_churn)
      .def_readwrite("seed", &SynthSpec::seed);

  m.def("synthesize_trace", [](const SynthSpec& spec) {
    py::list out;
    for (const auto& s : synthesize_trace(spec)) out.append(step_dict(s));
    return out;
  });
  m.def("write_synthetic_trace", [](const SynthSpec& spec, const std::filesystem::path& path) {
    write_trace(synthesize_trace(spec), path);
  });
  m.def("read_trace", [](const std::filesystem::path& path) {
    py::list out;
    for (const auto& s : read_trace(path)) out.append(step_dict(s));
    return out;
  });

  m.def("read_tensor", [](const std::filesystem::path& path) {
    const auto t = read_tensor(path);
    std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
    py::array_t<float> out(shape);
    std::copy(t.values.begin(), t.values.end(), out.mutable_data());
    return out;
  });
  m.def("write_tensor", [](const F32Array& a, const std::filesystem::path& path) {
    Tensor t;
    t.dims.assign(a.shape(), a.shape() + a.ndim());
    t.values.assign(a.data(), a.data() + a.size());
    write_tensor(t, path);
  });

  // attention analysis
  m.def("last_query_scores", [](const F64Array& dump, std::size_t layer) {
    return to_array(last_query_scores(to_dump(dump), layer));
  });
  m.def("sparsity_profile", [](const F64Array& dump) {
    py::list out;
    for (const auto& s : sparsity_profile(to_dump(dump))) {
      py::dict row;
      row["layer"] = s.layer;
      row["entropy"] = s.entropy;
      row["top8"] = s.top_k_mass[0];
      row["top16"] = s.top_k_mass[1];
      row["top32"] = s.top_k_mass[2];
      row["gini"] = s.gini;
      out.append(row);
    }
    return out;
  });
}
