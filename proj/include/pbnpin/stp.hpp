/*!
  \file stp.hpp
  \brief Semi-tensor product kernel: STP, Kronecker product, swap matrices,
         power-reducing matrices and the Khatri-Rao product, all over exact
         rationals.

  The semi-tensor product of A (m x n) and B (p x q) is
      A |x| B = (A (x) I_{a/n}) (B (x) I_{a/p}),   a = lcm(n, p),
  which coincides with the ordinary product when n = p. All operations here
  are pure and exact; no rounding happens anywhere in this module.
*/

#pragma once

#include <numeric>

#include "matrix.hpp"

namespace pbnpin {

inline matrix kron(const matrix& a, const matrix& b) {
  matrix out(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      const rational& x = a.at(i, j);
      if (x.numerator() == 0) {
        continue;
      }
      for (int r = 0; r < b.rows; ++r) {
        for (int c = 0; c < b.cols; ++c) {
          out.at(i * b.rows + r, j * b.cols + c) = x * b.at(r, c);
        }
      }
    }
  }
  return out;
}

inline matrix stp_product(const matrix& a, const matrix& b) {
  const long long alpha = std::lcm<long long>(a.cols, b.rows);
  const int ka = static_cast<int>(alpha / a.cols);
  const int kb = static_cast<int>(alpha / b.rows);
  const matrix lhs = ka == 1 ? a : kron(a, matrix::identity(ka));
  const matrix rhs = kb == 1 ? b : kron(b, matrix::identity(kb));
  return lhs * rhs;
}

/// Kronecker product of two column vectors given as probability 2-vectors.
inline std::vector<rational> kron_cols(const std::vector<rational>& a,
                                       const std::vector<rational>& b) {
  std::vector<rational> out;
  out.reserve(a.size() * b.size());
  for (const rational& x : a) {
    for (const rational& y : b) {
      out.push_back(x * y);
    }
  }
  return out;
}

/*!
  Swap matrix W_{[p,d]} = [I_d (x) delta_p^1, ..., I_d (x) delta_p^p],
  the pd x pd logical matrix with  b |x| a = W_{[p,d]} |x| a |x| b
  for all unit vectors a in Delta_p, b in Delta_d.
*/
inline logical_matrix swap_matrix(int p, int d) {
  if (p < 1 || d < 1) {
    throw std::invalid_argument("swap_matrix: factors must be >= 1");
  }
  std::vector<int> cols(static_cast<size_t>(p) * d);
  for (int a = 1; a <= p; ++a) {
    for (int b = 1; b <= d; ++b) {
      cols[static_cast<size_t>(a - 1) * d + (b - 1)] = (b - 1) * p + a;
    }
  }
  return logical_matrix(p * d, std::move(cols));
}

/*!
  Power-reducing matrix Phi_n (4^n x 2^n): column j is
  delta_{2^n}^j (x) delta_{2^n}^j, so that x^2 = Phi_n x for every
  unit vector x in Delta_{2^n}. Phi_1 is the classical M_r = delta_4[1,4].
*/
inline logical_matrix power_reducing_matrix(int n) {
  if (n < 1 || n > 15) {
    throw std::invalid_argument("power_reducing_matrix: n out of range");
  }
  const int dim = 1 << n;
  std::vector<int> cols(dim);
  for (int j = 1; j <= dim; ++j) {
    cols[j - 1] = (j - 1) * dim + j;
  }
  return logical_matrix(dim * dim, std::move(cols));
}

/// Khatri-Rao product: column j of A * B is Col_j(A) |x| Col_j(B).
inline matrix khatri_rao(const matrix& a, const matrix& b) {
  if (a.cols != b.cols) {
    throw std::invalid_argument("khatri_rao: column counts differ");
  }
  matrix out(a.rows * b.rows, a.cols);
  for (int j = 0; j < a.cols; ++j) {
    for (int i = 0; i < a.rows; ++i) {
      const rational& x = a.at(i, j);
      if (x.numerator() == 0) {
        continue;
      }
      for (int r = 0; r < b.rows; ++r) {
        out.at(i * b.rows + r, j) = x * b.at(r, j);
      }
    }
  }
  return out;
}

} // namespace pbnpin
