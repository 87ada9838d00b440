// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#include "flashgate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "flashgate/error.hpp"

namespace flashgate {

namespace {

constexpr int kMaxSweeps = 80;

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InvalidInput("matrix dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                       std::to_string(cols));
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void rotate(double* p, double* q, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xp = p[i];
    const double xq = q[i];
    p[i] = c * xp - s * xq;
    q[i] = s * xp + c * xq;
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(rows * cols, 0.0);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) {
    throw InvalidInput("matrix data length " + std::to_string(data_.size()) + " != " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidInput("non-finite matrix entry at (" + std::to_string(i / cols) + ", " +
                         std::to_string(i % cols) + ")");
    }
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  if (empty()) return {};
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SvdFactors svd_decompose(const DenseMatrix& matrix, double rank_tolerance) {
  if (matrix.empty()) throw InvalidInput("svd_decompose: empty matrix");
  if (!(rank_tolerance > 0.0 && rank_tolerance < 1.0)) {
    throw InvalidInput("svd_decompose: rank_tolerance must lie in (0, 1)");
  }

  // Orthogonalize the columns of the tall orientation: work is m x n with
  // m >= n, stored column-major so each column is contiguous.
  const bool transpose = matrix.rows() < matrix.cols();
  const std::size_t m = transpose ? matrix.cols() : matrix.rows();
  const std::size_t n = transpose ? matrix.rows() : matrix.cols();

  std::vector<double> work(m * n);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      const double x = matrix(r, c);
      if (transpose) {
        work[r * m + c] = x;
      } else {
        work[c * m + r] = x;
      }
    }
  }
  std::vector<double> rot(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rot[i * n + i] = 1.0;

  const double tol = static_cast<double>(m) * std::numeric_limits<double>::epsilon();
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      double* cp = work.data() + p * m;
      for (std::size_t q = p + 1; q < n; ++q) {
        double* cq = work.data() + q * m;
        const double alpha = dot(cp, cp, m);
        const double beta = dot(cq, cq, m);
        const double gamma = dot(cp, cq, m);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;

        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(cp, cq, m, c, s);
        rotate(rot.data() + p * n, rot.data() + q * n, n, c, s);
      }
    }
  }
  if (!converged) throw NumericalError("svd_decompose: Jacobi sweeps did not converge");

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    norms[j] = std::sqrt(dot(work.data() + j * m, work.data() + j * m, m));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SvdFactors out;
  out.rows = matrix.rows();
  out.cols = matrix.cols();
  const double sigma_max = norms[order[0]];
  if (sigma_max == 0.0) return out;
  std::size_t rank = 0;
  while (rank < n && norms[order[rank]] > rank_tolerance * sigma_max) ++rank;

  // Left vectors of the original matrix have length rows(), right vectors cols().
  out.u = DenseMatrix(matrix.rows(), rank);
  out.v = DenseMatrix(matrix.cols(), rank);
  out.sigma.resize(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t j = order[k];
    const double sigma = norms[j];
    out.sigma[k] = sigma;
    const double* w = work.data() + j * m;
    const double* g = rot.data() + j * n;
    for (std::size_t i = 0; i < m; ++i) {
      if (transpose) {
        out.v(i, k) = w[i] / sigma;
      } else {
        out.u(i, k) = w[i] / sigma;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (transpose) {
        out.u(i, k) = g[i];
      } else {
        out.v(i, k) = g[i];
      }
    }

    std::size_t pivot = 0;
    for (std::size_t i = 1; i < out.u.rows(); ++i) {
      if (std::abs(out.u(i, k)) > std::abs(out.u(pivot, k))) pivot = i;
    }
    if (out.u(pivot, k) < 0.0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, k) = -out.u(i, k);
      for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, k) = -out.v(i, k);
    }
  }
  return out;
}

double frobenius_norm(const DenseMatrix& matrix) {
  double acc = 0.0;
  for (double x : matrix.data()) acc += x * x;
  return std::sqrt(acc);
}

double vector_angle_deg(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size()) {
    throw InvalidInput("vector_angle_deg: operands must have equal non-zero length (" +
                       std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const double na = std::sqrt(dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(dot(b.data(), b.data(), b.size()));
  if (!(na > kNormEpsilon) || !(nb > kNormEpsilon)) {
    throw DegenerateVector("vector_angle_deg: zero-norm operand");
  }
  const double cosine = std::clamp(dot(a.data(), b.data(), a.size()) / (na * nb), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

}  // namespace flashgate
