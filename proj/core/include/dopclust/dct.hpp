#pragma once

#include <array>

#include "dopclust/common.hpp"

namespace dopclust {

// Orthonormal type-II 2D DCT:
//   F[p,q] = 2/sqrt(u v) a_p a_q sum_i sum_j f[i,j] cos(pi(2i+1)p/2u) cos(pi(2j+1)q/2v)
// with a_0 = 1/sqrt(2) and a_k = 1 otherwise.
Matrix dct2(const Matrix& block);

// Inverse of dct2.
Matrix idct2(const Matrix& coeffs);

// The first k coefficients in JPEG zig-zag order starting at (0,0).
Vector zigzag_select(const Matrix& coeffs, int k);

// Matrix positions visited by the zig-zag scan of a rows x cols matrix.
std::vector<std::pair<int, int>> zigzag_order(int rows, int cols);

// Offsets of a length split into three parts floor(L/3), floor(L/3), L - 2 floor(L/3).
// Returns {0, a, 2a, L}.
std::array<int, 4> split_thirds(int length);

}  // namespace dopclust
