/*!
  \file boolexpr.hpp
  \brief Boolean expression trees over node references.

  Expressions are immutable values; copies share structure. Node references
  are 1-based indices into the owning network. The canonical column order of
  a truth table over variables (v_1, ..., v_k) lists assignments with v_1 as
  the highest-order factor and TRUE before FALSE, matching the unit-vector
  encoding x = delta_2^{2-x}.
*/

#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace pbnpin {

class bool_expr {
public:
  enum class op : uint8_t { constant, variable, negation, conjunction, disjunction, exclusive_or };

  bool_expr() : bool_expr(constant(false)) {}

  static bool_expr constant(bool v) {
    return bool_expr(std::make_shared<node>(node{op::constant, v, 0, nullptr, nullptr}));
  }

  static bool_expr var(int index) {
    if (index < 1) {
      throw std::invalid_argument("bool_expr: node indices are 1-based");
    }
    return bool_expr(std::make_shared<node>(node{op::variable, false, index, nullptr, nullptr}));
  }

  friend bool_expr operator!(const bool_expr& e) {
    return bool_expr(std::make_shared<node>(node{op::negation, false, 0, e.n_, nullptr}));
  }
  friend bool_expr operator&(const bool_expr& a, const bool_expr& b) {
    return bool_expr(std::make_shared<node>(node{op::conjunction, false, 0, a.n_, b.n_}));
  }
  friend bool_expr operator|(const bool_expr& a, const bool_expr& b) {
    return bool_expr(std::make_shared<node>(node{op::disjunction, false, 0, a.n_, b.n_}));
  }
  friend bool_expr operator^(const bool_expr& a, const bool_expr& b) {
    return bool_expr(std::make_shared<node>(node{op::exclusive_or, false, 0, a.n_, b.n_}));
  }

  op kind() const { return n_->kind; }
  bool const_value() const { return n_->value; }
  int var_index() const { return n_->var; }
  bool_expr lhs() const { return bool_expr(n_->lhs); }
  bool_expr rhs() const { return bool_expr(n_->rhs); }

  /// values is indexed by node id (values[i] for node i; values[0] unused).
  bool eval(const std::vector<unsigned char>& values) const { return eval_node(n_.get(), values); }

  void collect_vars(std::set<int>& out) const { collect(n_.get(), out); }

  std::set<int> vars() const {
    std::set<int> out;
    collect_vars(out);
    return out;
  }

  std::string to_string(const std::function<std::string(int)>& name) const {
    return print(n_.get(), name, 0);
  }

private:
  struct node {
    op kind;
    bool value;
    int var;
    std::shared_ptr<const node> lhs;
    std::shared_ptr<const node> rhs;
  };

  explicit bool_expr(std::shared_ptr<const node> n) : n_(std::move(n)) {}

  static bool eval_node(const node* n, const std::vector<unsigned char>& values) {
    switch (n->kind) {
      case op::constant: return n->value;
      case op::variable: return values[static_cast<size_t>(n->var)] != 0;
      case op::negation: return !eval_node(n->lhs.get(), values);
      case op::conjunction: return eval_node(n->lhs.get(), values) && eval_node(n->rhs.get(), values);
      case op::disjunction: return eval_node(n->lhs.get(), values) || eval_node(n->rhs.get(), values);
      case op::exclusive_or: return eval_node(n->lhs.get(), values) != eval_node(n->rhs.get(), values);
    }
    return false;
  }

  static void collect(const node* n, std::set<int>& out) {
    switch (n->kind) {
      case op::constant: return;
      case op::variable: out.insert(n->var); return;
      case op::negation: collect(n->lhs.get(), out); return;
      default:
        collect(n->lhs.get(), out);
        collect(n->rhs.get(), out);
    }
  }

  // precedence: | (1) < ^ (2) < & (3) < ! (4)
  static int prec(op k) {
    switch (k) {
      case op::disjunction: return 1;
      case op::exclusive_or: return 2;
      case op::conjunction: return 3;
      case op::negation: return 4;
      default: return 5;
    }
  }

  static std::string print(const node* n, const std::function<std::string(int)>& name, int outer) {
    std::string s;
    switch (n->kind) {
      case op::constant: s = n->value ? "1" : "0"; break;
      case op::variable: s = name(n->var); break;
      case op::negation: s = "!" + print(n->lhs.get(), name, prec(op::negation)); break;
      case op::conjunction:
        s = print(n->lhs.get(), name, prec(op::conjunction) - 1) + " & " +
            print(n->rhs.get(), name, prec(op::conjunction));
        break;
      case op::exclusive_or:
        s = print(n->lhs.get(), name, prec(op::exclusive_or) - 1) + " ^ " +
            print(n->rhs.get(), name, prec(op::exclusive_or));
        break;
      case op::disjunction:
        s = print(n->lhs.get(), name, prec(op::disjunction) - 1) + " | " +
            print(n->rhs.get(), name, prec(op::disjunction));
        break;
    }
    if (prec(n->kind) < 5 && prec(n->kind) <= outer && n->kind != op::negation) {
      return "(" + s + ")";
    }
    return s;
  }

  std::shared_ptr<const node> n_;
};

/// Bit of canonical column col0 (0-based) for variable position pos0 of k;
/// bit 1 means the variable is FALSE in that column's assignment.
inline int column_bit(int col0, int k, int pos0) {
  return (col0 >> (k - 1 - pos0)) & 1;
}

/// Truth table of expr over (v_1,...,v_k) in canonical column order.
inline std::vector<bool> truth_table(const bool_expr& e, const std::vector<int>& ordered_vars) {
  const int k = static_cast<int>(ordered_vars.size());
  if (k > 25) {
    throw cap_error("truth_table: too many variables");
  }
  int max_var = 0;
  for (int v : ordered_vars) {
    max_var = std::max(max_var, v);
  }
  for (int v : e.vars()) {
    max_var = std::max(max_var, v);
  }
  std::vector<unsigned char> values(static_cast<size_t>(max_var) + 1, 0);
  std::vector<bool> table(static_cast<size_t>(1) << k);
  for (int j = 0; j < static_cast<int>(table.size()); ++j) {
    for (int p = 0; p < k; ++p) {
      values[static_cast<size_t>(ordered_vars[p])] =
          static_cast<unsigned char>(1 - column_bit(j, k, p));
    }
    table[static_cast<size_t>(j)] = e.eval(values);
  }
  return table;
}

namespace detail {

inline bool table_depends_on(const std::vector<bool>& t, int k, int pos0) {
  const int stride = 1 << (k - 1 - pos0);
  for (size_t j = 0; j < t.size(); ++j) {
    if (((j >> (k - 1 - pos0)) & 1) == 0 && t[j] != t[j + stride]) {
      return true;
    }
  }
  return false;
}

} // namespace detail

/*!
  Recover an expression from a truth table over ordered_vars. Non-functional
  variables are projected away first; the result is a constant, a literal, or
  a disjunction of minterms over the remaining variables.
*/
inline bool_expr expr_from_table(const std::vector<bool>& table, const std::vector<int>& ordered_vars) {
  const int k = static_cast<int>(ordered_vars.size());
  if (table.size() != (static_cast<size_t>(1) << k)) {
    throw std::invalid_argument("expr_from_table: size mismatch");
  }

  // Project out variables the table does not depend on.
  std::vector<int> live;
  for (int p = 0; p < k; ++p) {
    if (detail::table_depends_on(table, k, p)) {
      live.push_back(p);
    }
  }
  const int m = static_cast<int>(live.size());
  std::vector<bool> t(static_cast<size_t>(1) << m);
  for (int j = 0; j < static_cast<int>(t.size()); ++j) {
    int full = 0;
    for (int q = 0; q < m; ++q) {
      full |= column_bit(j, m, q) << (k - 1 - live[q]);
    }
    t[static_cast<size_t>(j)] = table[static_cast<size_t>(full)];
  }

  if (m == 0) {
    return bool_expr::constant(t[0]);
  }
  if (m == 1) {
    // t = (value at x=1, value at x=0)
    return t[0] ? bool_expr::var(ordered_vars[live[0]]) : !bool_expr::var(ordered_vars[live[0]]);
  }

  bool_expr result;
  bool first = true;
  for (int j = 0; j < static_cast<int>(t.size()); ++j) {
    if (!t[static_cast<size_t>(j)]) {
      continue;
    }
    bool_expr term;
    bool term_first = true;
    for (int q = 0; q < m; ++q) {
      bool_expr lit = bool_expr::var(ordered_vars[live[q]]);
      if (column_bit(j, m, q) == 1) {
        lit = !lit;
      }
      term = term_first ? lit : (term & lit);
      term_first = false;
    }
    result = first ? term : (result | term);
    first = false;
  }
  if (first) {
    return bool_expr::constant(false);
  }
  return result;
}

/*!
  Apply a 2 x 4 structure matrix as a binary connective: columns correspond to
  the input pairs (u,f) = (1,1),(1,0),(0,1),(0,0). Returns the expression for
  the connective applied to (u, f), simplified through the 16 canonical cases.
*/
inline bool_expr apply_binary_table(const logical_matrix& m, const bool_expr& u, const bool_expr& f) {
  if (m.rows != 2 || m.col_count() != 4) {
    throw std::invalid_argument("apply_binary_table: expected a 2x4 logical matrix");
  }
  const int o1 = 2 - m.cols[0], o2 = 2 - m.cols[1], o3 = 2 - m.cols[2], o4 = 2 - m.cols[3];
  const int code = o1 << 3 | o2 << 2 | o3 << 1 | o4;
  switch (code) {
    case 0b0000: return bool_expr::constant(false);
    case 0b1111: return bool_expr::constant(true);
    case 0b1100: return u;
    case 0b0011: return !u;
    case 0b1010: return f;
    case 0b0101: return !f;
    case 0b1000: return u & f;
    case 0b0111: return !(u & f);
    case 0b1110: return u | f;
    case 0b0001: return !(u | f);
    case 0b0110: return u ^ f;
    case 0b1001: return !(u ^ f);
    case 0b0100: return u & !f;
    case 0b1011: return !u | f;
    case 0b0010: return !u & f;
    case 0b1101: return u | !f;
  }
  throw internal_error("apply_binary_table: unreachable");
}

} // namespace pbnpin
