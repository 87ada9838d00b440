// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "flashgate/error.hpp"
#include "flashgate/ics.hpp"
#include "flashgate/tensor_io.hpp"

namespace flashgate {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& require(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, std::string("missing field '") + field + "'");
  return *it;
}

[[noreturn]] void wrong_type(std::size_t line, const std::string& field, const char* expected) {
  throw ParseError(line, "field '" + field + "' must be " + expected);
}

std::size_t as_index(const json& v, std::size_t line, const std::string& field) {
  if (!v.is_number_unsigned()) wrong_type(line, field, "a non-negative integer");
  return v.get<std::size_t>();
}

TraceStep parse_step(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error&) {
    throw ParseError(line, "invalid JSON");
  }
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");

  TraceStep step;
  step.step = as_index(require(obj, "step", line), line, "step");

  const json& action = require(obj, "action", line);
  if (!action.is_array() || action.empty()) wrong_type(line, "action", "a non-empty array of numbers");
  step.action.components.reserve(action.size());
  for (const auto& x : action) {
    if (!x.is_number()) wrong_type(line, "action", "a non-empty array of numbers");
    const double value = x.get<double>();
    if (!std::isfinite(value)) wrong_type(line, "action", "finite");
    step.action.components.push_back(value);
  }

  const json& tokens = require(obj, "tokens", line);
  if (!tokens.is_object()) wrong_type(line, "tokens", "an object");
  if (auto set = tokens.find("set"); set != tokens.end()) {
    if (!set->is_array() || set->empty()) wrong_type(line, "tokens.set", "a non-empty index array");
    std::vector<std::size_t> indices;
    indices.reserve(set->size());
    for (const auto& i : *set) indices.push_back(as_index(i, line, "tokens.set"));
    try {
      step.tokens = TokenSet::from_indices(std::move(indices));
    } catch (const InvalidInput& e) {
      throw ParseError(line, std::string("field 'tokens.set': ") + e.what());
    }
  } else if (auto tensor = tokens.find("tensor"); tensor != tokens.end()) {
    if (!tensor->is_string()) wrong_type(line, "tokens.tensor", "a string path");
    step.tokens = TensorRef{tensor->get<std::string>(),
                            as_index(require(tokens, "index", line), line, "tokens.index")};
  } else {
    throw ParseError(line, "field 'tokens' needs 'set' or 'tensor'");
  }

  const json& done = require(obj, "done", line);
  if (!done.is_boolean()) wrong_type(line, "done", "a boolean");
  step.done = done.get<bool>();
  return step;
}

}  // namespace

void validate_trace(std::span<const TraceStep> steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].step != i + 1) {
      throw InvalidInput("trace step " + std::to_string(i + 1) + " carries index " +
                         std::to_string(steps[i].step));
    }
    steps[i].action.validate();
    if (steps[i].action.dim() != steps.front().action.dim()) {
      throw InvalidInput("trace action dimension changes at step " + std::to_string(i + 1));
    }
  }
}

void write_trace(std::span<const TraceStep> steps, std::ostream& out) {
  validate_trace(steps);
  for (const auto& s : steps) {
    ordered_json line;
    line["step"] = s.step;
    line["action"] = s.action.components;
    ordered_json tokens;
    if (const auto* set = std::get_if<TokenSet>(&s.tokens)) {
      tokens["set"] = std::vector<std::size_t>(set->indices().begin(), set->indices().end());
    } else {
      const auto& ref = std::get<TensorRef>(s.tokens);
      tokens["tensor"] = ref.path;
      tokens["index"] = ref.index;
    }
    line["tokens"] = std::move(tokens);
    line["done"] = s.done;
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed to write trace");
}

void write_trace(std::span<const TraceStep> steps, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace(steps, out);
}

std::vector<TraceStep> read_trace(std::istream& in) {
  std::vector<TraceStep> steps;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;

    TraceStep step = parse_step(text, line);
    if (step.step != steps.size() + 1) throw ParseError(line, "non-contiguous step");
    if (!steps.empty() && step.action.dim() != steps.front().action.dim()) {
      throw ParseError(line, "field 'action': dimension changed from " +
                                 std::to_string(steps.front().action.dim()) + " to " +
                                 std::to_string(step.action.dim()));
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<TraceStep> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_trace(in);
}

std::vector<Observation> resolve_observations(std::span<const TraceStep> steps,
                                              const ResolveOptions& options) {
  std::map<std::filesystem::path, Tensor> cache;
  std::vector<Observation> out;
  out.reserve(steps.size());
  for (const auto& s : steps) {
    Observation obs{s.action, {}};
    if (const auto* set = std::get_if<TokenSet>(&s.tokens)) {
      obs.tokens = *set;
    } else {
      const auto& ref = std::get<TensorRef>(s.tokens);
      if (options.k == 0) {
        throw InvalidInput("step " + std::to_string(s.step) +
                           " references a tensor; a token budget k is required");
      }
      std::filesystem::path path = ref.path;
      if (path.is_relative()) path = options.base_dir / path;
      auto it = cache.find(path);
      if (it == cache.end()) it = cache.emplace(path, read_tensor(path)).first;
      const auto scores = contribution_scores(it->second.matrix(ref.index), options.rank_tolerance);
      obs.tokens = select_top_k(scores, options.k);
    }
    out.push_back(std::move(obs));
    if (options.stop_at_done && s.done) break;
  }
  return out;
}

}  // namespace flashgate
