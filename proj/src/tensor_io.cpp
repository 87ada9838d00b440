// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "flashgate/error.hpp"

namespace flashgate {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
  }
  return value;
}

template <typename T>
void put(std::ostream& out, T value) {
  value = byteswap_if_big(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* field) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw FormatError(std::string("truncated tensor header at ") + field);
  }
  return byteswap_if_big(value);
}

std::uint64_t checked_count(std::span<const std::uint64_t> dims) {
  std::uint64_t count = 1;
  for (auto d : dims) {
    if (d == 0) throw FormatError("tensor dimension of size 0");
    if (count > kMaxTensorElements / d) {
      throw SizeError("tensor exceeds the " + std::to_string(kMaxTensorElements) +
                      "-element guard");
    }
    count *= d;
  }
  if (count > kMaxTensorElements) {
    throw SizeError("tensor exceeds the " + std::to_string(kMaxTensorElements) +
                    "-element guard");
  }
  return count;
}

void check_shape(const Tensor& t) {
  if (t.dims.size() < 2 || t.dims.size() > 4) {
    throw FormatError("tensor ndim must be 2, 3 or 4, got " + std::to_string(t.dims.size()));
  }
  if (checked_count(t.dims) != t.values.size()) {
    throw FormatError("tensor payload length does not match its dimensions");
  }
}

}  // namespace

std::size_t Tensor::element_count() const { return static_cast<std::size_t>(checked_count(dims)); }

std::size_t Tensor::matrix_count() const {
  if (dims.size() == 2) return 1;
  if (dims.size() == 3) return static_cast<std::size_t>(dims[0]);
  throw InvalidInput("tensor with " + std::to_string(dims.size()) + " dims is not a matrix stack");
}

DenseMatrix Tensor::matrix(std::size_t index) const {
  check_shape(*this);
  const std::size_t count = matrix_count();
  if (index >= count) {
    throw InvalidInput("matrix index " + std::to_string(index) + " >= stack size " +
                       std::to_string(count));
  }
  const auto rows = static_cast<std::size_t>(dims[dims.size() - 2]);
  const auto cols = static_cast<std::size_t>(dims[dims.size() - 1]);
  const auto first = values.begin() + static_cast<std::ptrdiff_t>(index * rows * cols);
  return DenseMatrix(rows, cols,
                     std::vector<double>(first, first + static_cast<std::ptrdiff_t>(rows * cols)));
}

Tensor Tensor::from_matrix(const DenseMatrix& matrix) {
  if (matrix.empty()) throw InvalidInput("cannot serialize an empty matrix");
  Tensor t;
  t.dims = {matrix.rows(), matrix.cols()};
  t.values.assign(matrix.data().begin(), matrix.data().end());
  return t;
}

Tensor Tensor::from_stack(std::span<const DenseMatrix> matrices) {
  if (matrices.empty()) throw InvalidInput("cannot serialize an empty matrix stack");
  const auto rows = matrices.front().rows();
  const auto cols = matrices.front().cols();
  Tensor t;
  t.dims = {matrices.size(), rows, cols};
  t.values.reserve(matrices.size() * rows * cols);
  for (const auto& m : matrices) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InvalidInput("matrix stack requires identical shapes");
    }
    t.values.insert(t.values.end(), m.data().begin(), m.data().end());
  }
  return t;
}

void write_tensor(const Tensor& tensor, std::ostream& out) {
  check_shape(tensor);
  out.write(kTensorMagic, 4);
  put<std::uint16_t>(out, kTensorVersion);
  put<std::uint8_t>(out, kTensorDtypeF32);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put<std::uint64_t>(out, d);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(tensor.values.data()),
              static_cast<std::streamsize>(tensor.values.size() * sizeof(float)));
  } else {
    for (float v : tensor.values) put<float>(out, v);
  }
  if (!out) throw IoError("failed to write tensor");
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_tensor(tensor, out);
}

Tensor read_tensor(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("truncated tensor header at magic");
  if (std::memcmp(magic, kTensorMagic, 4) != 0) throw FormatError("bad tensor magic");
  const auto version = get<std::uint16_t>(in, "version");
  if (version != kTensorVersion) {
    throw FormatError("unsupported tensor version " + std::to_string(version));
  }
  const auto dtype = get<std::uint8_t>(in, "dtype");
  if (dtype != kTensorDtypeF32) throw FormatError("unsupported tensor dtype " + std::to_string(dtype));
  const auto ndim = get<std::uint8_t>(in, "ndim");
  if (ndim < 2 || ndim > 4) throw FormatError("tensor ndim must be 2, 3 or 4, got " + std::to_string(ndim));

  Tensor t;
  t.dims.resize(ndim);
  for (auto& d : t.dims) d = get<std::uint64_t>(in, "dims");
  const auto count = static_cast<std::size_t>(checked_count(t.dims));

  // Grow in chunks so a lying header on a short file fails before a huge allocation.
  constexpr std::size_t kChunk = std::size_t{1} << 20;
  while (t.values.size() < count) {
    const std::size_t offset = t.values.size();
    const std::size_t take = std::min(kChunk, count - offset);
    t.values.resize(offset + take);
    if (!in.read(reinterpret_cast<char*>(t.values.data() + offset),
                 static_cast<std::streamsize>(take * sizeof(float)))) {
      throw FormatError("truncated tensor payload");
    }
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : t.values) v = byteswap_if_big(v);
  }
  return t;
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace flashgate
