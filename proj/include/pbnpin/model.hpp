/*!
  \file model.hpp
  \brief Probabilistic Boolean network model: candidate functions reduced to
         their functional variables, structure matrices, expected dynamics
         and the global state transition matrix.

  State/vector bijection used everywhere: a Boolean x maps to delta_2^{2-x},
  and a tuple (x_1,...,x_n) maps to delta_{2^n}^j with
      j = 1 + sum_i (1 - x_i) * 2^{n-i},
  so (1,...,1) is column 1 and (0,...,0) is column 2^n.
*/

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boolexpr.hpp"
#include "stp.hpp"

namespace pbnpin {

struct caps {
  int max_indegree = 20;     // exhaustive functional-variable enumeration bound
  int max_oracle_nodes = 12; // full state-space enumeration bound
  long long max_modes = 4096;
};

/*!
  Functional variables of expr within candidate_vars: inputs whose flip
  changes the output for at least one assignment, found by exhaustive
  enumeration over 2^|candidate_vars| assignments.
*/
inline std::vector<int> functional_variables(const bool_expr& expr,
                                             const std::vector<int>& candidate_vars,
                                             int max_indegree = caps{}.max_indegree) {
  const int k = static_cast<int>(candidate_vars.size());
  if (k > max_indegree) {
    throw cap_error("functional_variables: in-degree " + std::to_string(k) +
                    " exceeds cap " + std::to_string(max_indegree));
  }
  std::vector<int> sorted = candidate_vars;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<bool> table = truth_table(expr, sorted);
  std::vector<int> out;
  for (int p = 0; p < k; ++p) {
    if (detail::table_depends_on(table, k, p)) {
      out.push_back(sorted[p]);
    }
  }
  return out;
}

/// Structure matrix of expr over ordered_vars: column j holds delta_2^{2-f(a_j)}.
inline logical_matrix structure_matrix(const bool_expr& expr, const std::vector<int>& ordered_vars) {
  const std::vector<bool> table = truth_table(expr, ordered_vars);
  std::vector<int> cols(table.size());
  for (size_t j = 0; j < table.size(); ++j) {
    cols[j] = table[j] ? 1 : 2;
  }
  return logical_matrix(2, std::move(cols));
}

/*!
  Extended structure matrix: given F over from_vars (a subset of to_vars,
  both ascending), returns F^ over to_vars with
  F^ |x|_{j in to} x_j = F |x|_{j in from} x_j for all unit inputs.
*/
inline logical_matrix extend_structure_matrix(const logical_matrix& f,
                                              const std::vector<int>& from_vars,
                                              const std::vector<int>& to_vars) {
  const int k_from = static_cast<int>(from_vars.size());
  const int k_to = static_cast<int>(to_vars.size());
  if (f.col_count() != (1 << k_from)) {
    throw std::invalid_argument("extend_structure_matrix: width mismatch");
  }
  std::vector<int> pos; // position of each from-var inside to_vars
  pos.reserve(from_vars.size());
  for (int v : from_vars) {
    auto it = std::lower_bound(to_vars.begin(), to_vars.end(), v);
    if (it == to_vars.end() || *it != v) {
      throw std::invalid_argument("extend_structure_matrix: variables not a subset");
    }
    pos.push_back(static_cast<int>(it - to_vars.begin()));
  }
  std::vector<int> cols(static_cast<size_t>(1) << k_to);
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    int sub = 0;
    for (int q = 0; q < k_from; ++q) {
      sub |= column_bit(j, k_to, pos[q]) << (k_from - 1 - q);
    }
    cols[static_cast<size_t>(j)] = f.cols[static_cast<size_t>(sub)];
  }
  return logical_matrix(2, std::move(cols));
}

struct candidate_function {
  bool_expr expr;
  rational probability;
  std::vector<int> functional_vars; // ascending
  logical_matrix structure;         // 2 x 2^|functional_vars|
};

struct pbn_node {
  std::string name;
  int index = 0;
  std::vector<candidate_function> candidates;
  std::vector<int> neighbors; // N_i = union of candidate functional vars, ascending
};

struct node_spec {
  std::string name;
  std::vector<std::pair<rational, bool_expr>> candidates;
};

class pbn_model {
public:
  static pbn_model build(std::string name, const std::vector<node_spec>& specs,
                         const caps& limits = {}) {
    pbn_model m;
    m.name_ = std::move(name);
    const int n = static_cast<int>(specs.size());
    if (n == 0) {
      throw std::invalid_argument("model has no nodes");
    }
    for (int i = 0; i < n; ++i) {
      if (specs[i].name.empty()) {
        throw std::invalid_argument("node names must be nonempty");
      }
      if (m.index_.count(specs[i].name)) {
        throw std::invalid_argument("duplicate node name: " + specs[i].name);
      }
      m.index_[specs[i].name] = i + 1;
    }
    for (int i = 0; i < n; ++i) {
      const node_spec& spec = specs[i];
      pbn_node node;
      node.name = spec.name;
      node.index = i + 1;
      if (spec.candidates.empty()) {
        throw std::invalid_argument("node " + spec.name + " has no candidate functions");
      }
      rational sum = rat(0);
      std::set<int> nbrs;
      for (const auto& [prob, expr] : spec.candidates) {
        if (prob < rat(0) || prob > rat(1)) {
          throw std::invalid_argument("node " + spec.name + ": probability out of [0,1]");
        }
        sum += prob;
        for (int v : expr.vars()) {
          if (v < 1 || v > n) {
            throw std::invalid_argument("node " + spec.name + ": reference to unknown node");
          }
        }
        std::vector<int> referenced(expr.vars().begin(), expr.vars().end());
        candidate_function cand;
        cand.expr = expr;
        cand.probability = prob;
        cand.functional_vars = functional_variables(expr, referenced, limits.max_indegree);
        cand.structure = structure_matrix(expr, cand.functional_vars);
        nbrs.insert(cand.functional_vars.begin(), cand.functional_vars.end());
        node.candidates.push_back(std::move(cand));
      }
      if (sum != rat(1)) {
        throw std::invalid_argument("node " + spec.name +
                                    ": candidate probabilities sum to " + to_string(sum));
      }
      node.neighbors.assign(nbrs.begin(), nbrs.end());
      m.nodes_.push_back(std::move(node));
    }
    return m;
  }

  const std::string& name() const { return name_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const pbn_node& node(int i) const { return nodes_.at(static_cast<size_t>(i - 1)); }
  const std::vector<pbn_node>& nodes() const { return nodes_; }

  std::optional<int> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

private:
  std::string name_;
  std::vector<pbn_node> nodes_;
  std::map<std::string, int> index_;
};

/// Expected dynamics F^_i = sum_k p_i^k F^_i^k over N_i (Eq. of expectation).
inline stochastic_matrix expected_matrix(const pbn_node& node) {
  const int k = static_cast<int>(node.neighbors.size());
  matrix m(2, 1 << k);
  for (const candidate_function& cand : node.candidates) {
    const logical_matrix ext =
        extend_structure_matrix(cand.structure, cand.functional_vars, node.neighbors);
    for (int j = 0; j < ext.col_count(); ++j) {
      m.at(ext.cols[static_cast<size_t>(j)] - 1, j) += cand.probability;
    }
  }
  return stochastic_matrix(std::move(m));
}

inline long long state_index(const std::vector<bool>& values) {
  const int n = static_cast<int>(values.size());
  if (n > 62) {
    throw cap_error("state_index: too many nodes");
  }
  long long idx = 0;
  for (int i = 0; i < n; ++i) {
    idx |= static_cast<long long>(values[static_cast<size_t>(i)] ? 0 : 1) << (n - 1 - i);
  }
  return idx + 1;
}

inline std::vector<bool> state_values(long long index, int n) {
  if (index < 1 || index > (1LL << n)) {
    throw std::invalid_argument("state_values: index out of range");
  }
  std::vector<bool> values(static_cast<size_t>(n));
  const long long j = index - 1;
  for (int i = 0; i < n; ++i) {
    values[static_cast<size_t>(i)] = ((j >> (n - 1 - i)) & 1) == 0;
  }
  return values;
}

/// Column index (0-based) of a state projected onto vars (ascending subset).
inline int project_state(long long state0, int n, const std::vector<int>& vars) {
  const int k = static_cast<int>(vars.size());
  int idx = 0;
  for (int p = 0; p < k; ++p) {
    idx |= static_cast<int>((state0 >> (n - vars[p])) & 1) << (k - 1 - p);
  }
  return idx;
}

/*!
  Global state transition matrix L (2^n x 2^n): column s is the distribution
  of x(t+1) given state s. Built as the Khatri-Rao product of the per-node
  expected dynamics retrieved through the state projection; the retrieval
  matrices are realized as index projections, never materialized.
*/
inline stochastic_matrix transition_matrix(const pbn_model& model, const caps& limits = {}) {
  const int n = model.node_count();
  if (n > limits.max_oracle_nodes) {
    throw cap_error("transition_matrix: " + std::to_string(n) + " nodes exceed oracle cap " +
                    std::to_string(limits.max_oracle_nodes));
  }
  std::vector<stochastic_matrix> expected;
  expected.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    expected.push_back(expected_matrix(model.node(i)));
  }
  const long long dim = 1LL << n;
  matrix l(static_cast<int>(dim), static_cast<int>(dim));
  std::vector<rational> column;
  for (long long s = 0; s < dim; ++s) {
    column.assign(1, rat(1));
    for (int i = 1; i <= n; ++i) {
      const int proj = project_state(s, n, model.node(i).neighbors);
      const pvec2 ci = expected[static_cast<size_t>(i - 1)].col2(proj);
      column = kron_cols(column, {ci[0], ci[1]});
    }
    for (long long r = 0; r < dim; ++r) {
      l.at(static_cast<int>(r), static_cast<int>(s)) = column[static_cast<size_t>(r)];
    }
  }
  return stochastic_matrix(std::move(l));
}

} // namespace pbnpin
