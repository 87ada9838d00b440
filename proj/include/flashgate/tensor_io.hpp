// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "flashgate/linalg.hpp"

namespace flashgate {

// FVTS layout, little-endian throughout:
//   "FVTS" | u16 version=1 | u8 dtype=1 (f32) | u8 ndim | u64 dims[ndim] | f32 payload
inline constexpr char kTensorMagic[4] = {'F', 'V', 'T', 'S'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint8_t kTensorDtypeF32 = 1;
inline constexpr std::uint64_t kMaxTensorElements = std::uint64_t{1} << 31;

/// A 2-D matrix, 3-D stack of matrices, or 4-D (layer, head, query, key)
/// attention dump, stored as 32-bit floats.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  /// Number of matrices: 1 for 2-D, dims[0] for 3-D. Throws for 4-D.
  std::size_t matrix_count() const;
  /// The index-th matrix widened to 64-bit.
  DenseMatrix matrix(std::size_t index = 0) const;

  static Tensor from_matrix(const DenseMatrix& matrix);
  static Tensor from_stack(std::span<const DenseMatrix> matrices);

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

void write_tensor(const Tensor& tensor, std::ostream& out);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);

/// Throws FormatError on a bad header or truncated payload and SizeError
/// when the element count exceeds kMaxTensorElements.
Tensor read_tensor(std::istream& in);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace flashgate
