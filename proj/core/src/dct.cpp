#include "dopclust/dct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dopclust {

namespace {

// Orthonormal DCT-II basis, row p is the p-th cosine.
Matrix dct_basis(Eigen::Index n) {
  Matrix c(n, n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double s = std::sqrt(2.0 / static_cast<double>(n));
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index i = 0; i < n; ++i) {
      c(p, i) = (p == 0 ? s0 : s) * std::cos(std::numbers::pi * static_cast<double>((2 * i + 1) * p) /
                                             (2.0 * static_cast<double>(n)));
    }
  }
  return c;
}

}  // namespace

Matrix dct2(const Matrix& block) {
  if (block.rows() == 0 || block.cols() == 0) throw InvalidArgument("dct2: empty block");
  return dct_basis(block.rows()) * block * dct_basis(block.cols()).transpose();
}

Matrix idct2(const Matrix& coeffs) {
  if (coeffs.rows() == 0 || coeffs.cols() == 0) throw InvalidArgument("idct2: empty block");
  return dct_basis(coeffs.rows()).transpose() * coeffs * dct_basis(coeffs.cols());
}

std::vector<std::pair<int, int>> zigzag_order(int rows, int cols) {
  std::vector<std::pair<int, int>> order;
  if (rows <= 0 || cols <= 0) return order;
  order.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int s = 0; s <= rows + cols - 2; ++s) {
    const int r_lo = std::max(0, s - (cols - 1));
    const int r_hi = std::min(s, rows - 1);
    if (s % 2 == 0) {
      // even anti-diagonals run bottom-left to top-right
      for (int r = r_hi; r >= r_lo; --r) order.emplace_back(r, s - r);
    } else {
      for (int r = r_lo; r <= r_hi; ++r) order.emplace_back(r, s - r);
    }
  }
  return order;
}

Vector zigzag_select(const Matrix& coeffs, int k) {
  const auto size = coeffs.rows() * coeffs.cols();
  if (k < 0 || k > size) {
    throw InvalidArgument("zigzag_select: k = " + std::to_string(k) + " exceeds matrix size " + std::to_string(size));
  }
  const auto order = zigzag_order(static_cast<int>(coeffs.rows()), static_cast<int>(coeffs.cols()));
  Vector out(k);
  for (int i = 0; i < k; ++i) out[i] = coeffs(order[static_cast<std::size_t>(i)].first, order[static_cast<std::size_t>(i)].second);
  return out;
}

std::array<int, 4> split_thirds(int length) {
  if (length < 3) throw InvalidArgument("split_thirds: length must be >= 3, got " + std::to_string(length));
  const int a = length / 3;
  return {0, a, 2 * a, length};
}

}  // namespace dopclust
