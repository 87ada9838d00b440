// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>

#include "flashgate/csv.hpp"
#include "flashgate/error.hpp"

namespace flashgate {

namespace {

std::vector<double> normalized(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInput("empty score vector");
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  if (!(total > 0.0)) throw InvalidInput("score vector has no mass");
  std::vector<double> p(scores.begin(), scores.end());
  for (double& x : p) {
    if (x < 0.0) throw InvalidInput("negative score");
    x /= total;
  }
  return p;
}

}  // namespace

AttentionDump::AttentionDump(std::size_t layers, std::size_t heads, std::size_t queries,
                             std::size_t keys, std::vector<double> values)
    : layers_(layers), heads_(heads), queries_(queries), keys_(keys), values_(std::move(values)) {
  if (layers == 0 || heads == 0 || queries == 0 || keys == 0) {
    throw InvalidInput("attention dump dimensions must be >= 1");
  }
  if (values_.size() != layers * heads * queries * keys) {
    throw InvalidInput("attention dump payload does not match its dimensions");
  }
  for (std::size_t row = 0; row < layers * heads * queries; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < keys; ++k) {
      const double w = values_[row * keys + k];
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidInput("attention weight is negative or non-finite in row " + std::to_string(row));
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kAttentionRowTolerance) {
      throw InvalidInput("attention row " + std::to_string(row) + " sums to " + std::to_string(sum));
    }
  }
}

AttentionDump AttentionDump::from_tensor(const Tensor& tensor) {
  if (tensor.dims.size() != 4) {
    throw InvalidInput("attention dump needs a 4-D (layer, head, query, key) tensor");
  }
  return AttentionDump(tensor.dims[0], tensor.dims[1], tensor.dims[2], tensor.dims[3],
                       std::vector<double>(tensor.values.begin(), tensor.values.end()));
}

std::vector<double> last_query_scores(const AttentionDump& dump, std::size_t layer) {
  if (layer >= dump.layers()) {
    throw InvalidInput("layer " + std::to_string(layer) + " >= layer count " +
                       std::to_string(dump.layers()));
  }
  const std::size_t q = dump.queries() - 1;
  std::vector<double> out(dump.keys(), 0.0);
  for (std::size_t h = 0; h < dump.heads(); ++h) {
    for (std::size_t k = 0; k < dump.keys(); ++k) out[k] += dump.at(layer, h, q, k);
  }
  for (double& x : out) x /= static_cast<double>(dump.heads());
  return out;
}

double entropy(std::span<const double> scores) {
  double h = 0.0;
  for (double p : normalized(scores)) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double top_k_mass(std::span<const double> scores, std::size_t k) {
  auto p = normalized(scores);
  if (k >= p.size()) return 1.0;
  std::partial_sort(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k), p.end(), std::greater<>());
  return std::min(1.0, std::accumulate(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k), 0.0));
}

double gini(std::span<const double> scores) {
  auto p = normalized(scores);
  std::sort(p.begin(), p.end());
  const auto n = static_cast<double>(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * p[i];
  }
  return std::clamp(acc / n, 0.0, 1.0);
}

std::vector<LayerSparsity> sparsity_profile(const AttentionDump& dump) {
  std::vector<LayerSparsity> out;
  out.reserve(dump.layers());
  for (std::size_t l = 0; l < dump.layers(); ++l) {
    const auto scores = last_query_scores(dump, l);
    LayerSparsity s;
    s.layer = l;
    s.entropy = entropy(scores);
    for (std::size_t i = 0; i < kTopKLevels.size(); ++i) s.top_k_mass[i] = top_k_mass(scores, kTopKLevels[i]);
    s.gini = gini(scores);
    out.push_back(s);
  }
  return out;
}

void write_sparsity_csv(std::span<const LayerSparsity> profile, std::ostream& out) {
  out << "layer,entropy,top8,top16,top32,gini\n";
  for (const auto& s : profile) {
    out << s.layer << ',' << csv::number(s.entropy) << ',' << csv::number(s.top_k_mass[0]) << ','
        << csv::number(s.top_k_mass[1]) << ',' << csv::number(s.top_k_mass[2]) << ','
        << csv::number(s.gini) << '\n';
  }
}

}  // namespace flashgate
