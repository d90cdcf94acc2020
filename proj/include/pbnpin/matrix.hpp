/*!
  \file matrix.hpp
  \brief Dense rational matrices, unit-column (logical) matrices and
         column-stochastic matrices.

  A logical matrix is stored as one column index per column (1-based),
  never as dense entries: every matrix on the synthesis path is 2 x 2^k
  and index form keeps equality checks and compositions cheap.
*/

#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "rational.hpp"

namespace pbnpin {

/// Probability 2-vector as (top, bottom) = (P[x=1], P[x=0]).
using pvec2 = std::array<rational, 2>;

/// Unit 2-vector encoding a Boolean value v: delta_2^{2-v}.
inline pvec2 unit2(bool value) {
  return value ? pvec2{rat(1), rat(0)} : pvec2{rat(0), rat(1)};
}

struct matrix {
  int rows = 0;
  int cols = 0;
  std::vector<rational> a; // row-major

  matrix() = default;
  matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {
    if (r <= 0 || c <= 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
  }

  rational& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const rational& at(int r, int c) const {
    return a[static_cast<size_t>(r) * cols + c];
  }

  std::vector<rational> col(int c) const {
    std::vector<rational> out(rows);
    for (int r = 0; r < rows; ++r) {
      out[r] = at(r, c);
    }
    return out;
  }

  bool operator==(const matrix&) const = default;

  static matrix identity(int n) {
    matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      m.at(i, i) = rat(1);
    }
    return m;
  }

  matrix operator*(const matrix& rhs) const {
    if (cols != rhs.rows) {
      throw std::invalid_argument("matrix product: inner dimensions differ");
    }
    matrix out(rows, rhs.cols);
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < cols; ++k) {
        const rational& x = at(i, k);
        if (x.numerator() == 0) {
          continue;
        }
        for (int j = 0; j < rhs.cols; ++j) {
          out.at(i, j) += x * rhs.at(k, j);
        }
      }
    }
    return out;
  }
};

/// Unit-column matrix delta_rows[c1, c2, ...]; col_indices are 1-based.
struct logical_matrix {
  int rows = 0;
  std::vector<int> cols;

  logical_matrix() = default;
  logical_matrix(int r, std::vector<int> c) : rows(r), cols(std::move(c)) {
    for (int idx : cols) {
      if (idx < 1 || idx > rows) {
        throw std::invalid_argument("logical matrix: column index out of range");
      }
    }
  }

  int col_count() const { return static_cast<int>(cols.size()); }

  bool operator==(const logical_matrix&) const = default;

  static logical_matrix identity(int n) {
    std::vector<int> c(n);
    std::iota(c.begin(), c.end(), 1);
    return logical_matrix(n, std::move(c));
  }

  /// Constant matrix whose every column is delta_rows^idx.
  static logical_matrix constant(int rows, int idx, int ncols) {
    return logical_matrix(rows, std::vector<int>(ncols, idx));
  }

  matrix dense() const {
    matrix m(rows, col_count());
    for (int j = 0; j < col_count(); ++j) {
      m.at(cols[j] - 1, j) = rat(1);
    }
    return m;
  }
};

/// Shorthand mirroring the usual delta notation.
inline logical_matrix delta(int rows, std::vector<int> cols) {
  return logical_matrix(rows, std::move(cols));
}

inline bool is_column_stochastic(const matrix& m) {
  for (int j = 0; j < m.cols; ++j) {
    rational sum = rat(0);
    for (int r = 0; r < m.rows; ++r) {
      if (m.at(r, j) < rat(0)) {
        return false;
      }
      sum += m.at(r, j);
    }
    if (sum != rat(1)) {
      return false;
    }
  }
  return true;
}

/// Column-stochastic matrix; entries >= 0 and every column sums to exactly 1.
class stochastic_matrix {
public:
  stochastic_matrix() = default;
  explicit stochastic_matrix(matrix m) : m_(std::move(m)) {
    if (!is_column_stochastic(m_)) {
      throw std::invalid_argument("matrix is not column-stochastic");
    }
  }

  static stochastic_matrix from_logical(const logical_matrix& l) {
    return stochastic_matrix(l.dense());
  }

  const matrix& mat() const { return m_; }
  int rows() const { return m_.rows; }
  int cols() const { return m_.cols; }
  const rational& at(int r, int c) const { return m_.at(r, c); }

  /// For 2-row matrices: column c as a probability 2-vector.
  pvec2 col2(int c) const { return pvec2{m_.at(0, c), m_.at(1, c)}; }

  /// Exact unit-column recovery, if every column is a unit vector.
  std::optional<logical_matrix> as_logical() const {
    std::vector<int> idx(m_.cols);
    for (int j = 0; j < m_.cols; ++j) {
      int hit = -1;
      for (int r = 0; r < m_.rows; ++r) {
        if (m_.at(r, j) == rat(1)) {
          hit = r;
        } else if (m_.at(r, j) != rat(0)) {
          return std::nullopt;
        }
      }
      if (hit < 0) {
        return std::nullopt;
      }
      idx[j] = hit + 1;
    }
    return logical_matrix(m_.rows, std::move(idx));
  }

  bool operator==(const stochastic_matrix&) const = default;

private:
  matrix m_;
};

} // namespace pbnpin
