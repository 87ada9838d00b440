// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flashgate {

/// Row-major dense matrix of doubles with finite entries.
///
/// A default-constructed matrix is empty (0x0); it is only used as the
/// factor placeholder of a rank-0 decomposition. Every other instance has
/// rows >= 1 and cols >= 1.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero-filled rows x cols matrix. Throws InvalidInput on a zero dimension.
  DenseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of `data` (row-major). Throws InvalidInput when the
  /// length does not match, a dimension is zero, or an entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Thin, rank-truncated singular value decomposition T = U diag(sigma) V^T.
struct SvdFactors {
  DenseMatrix u;              // N x r, left singular vectors as columns
  std::vector<double> sigma;  // non-increasing, length r
  DenseMatrix v;              // d x r, right singular vectors as columns
  std::size_t rows = 0;       // N of the decomposed matrix
  std::size_t cols = 0;       // d of the decomposed matrix

  std::size_t rank() const noexcept { return sigma.size(); }
};

inline constexpr double kDefaultRankTolerance = 1e-10;
inline constexpr double kNormEpsilon = 1e-12;

/// One-sided Jacobi SVD on the thinner dimension.
///
/// The effective rank r counts singular values strictly greater than
/// `rank_tolerance * sigma_1`; factors are truncated to r columns. The zero
/// matrix yields r = 0 with empty factors. Each u column is sign-normalized
/// so its largest-magnitude entry (lowest index on ties) is non-negative.
SvdFactors svd_decompose(const DenseMatrix& matrix,
                         double rank_tolerance = kDefaultRankTolerance);

double frobenius_norm(const DenseMatrix& matrix);

/// Angle between two vectors in degrees, in [0, 180].
/// Throws DegenerateVector when either norm is <= kNormEpsilon and
/// InvalidInput on a length mismatch or an empty operand.
double vector_angle_deg(std::span<const double> a, std::span<const double> b);

}  // namespace flashgate
