/*!
  \file pinsynth.hpp
  \brief First-stage controller synthesis for pinned nodes.

  For each pinned node the expected dynamics is reordered so the kept
  in-neighbors lead and the deleted ones trail, a target pair (G, T) with
  T = G (I (x) 1^T) is derived, solvability of the uniform feedback equation

      M_o Psi^ (I (x) L) Phi = T

  is decided by the four-class column cover test, and a uniform controller
  (single law for all modes) or per-mode non-uniform controllers are built.
  The defining equation is always re-verified column-by-column on unit
  inputs before a controller is returned; the blown-up product
  (I_{2^k} (x) L) Phi_k itself is never materialized.
*/

#pragma once

#include <optional>
#include <variant>

#include "wiring.hpp"

namespace pbnpin {

/// Expected dynamics with inputs permuted to (kept ascending, deleted ascending).
struct reordered_dynamics {
  int node = 0;
  std::vector<int> input_order; // n_circ then n_star
  int n_circ_count = 0;
  int n_star_count = 0;
  stochastic_matrix l; // 2 x 2^{|input_order|}
};

namespace synth_detail {

/// Column permutation: new canonical column -> old canonical column.
inline std::vector<int> column_permutation(const std::vector<int>& old_order,
                                           const std::vector<int>& new_order) {
  const int k = static_cast<int>(old_order.size());
  std::vector<int> old_pos(new_order.size());
  for (int p = 0; p < k; ++p) {
    auto it = std::find(old_order.begin(), old_order.end(), new_order[static_cast<size_t>(p)]);
    if (it == old_order.end()) {
      throw std::invalid_argument("column_permutation: orders differ in content");
    }
    old_pos[static_cast<size_t>(p)] = static_cast<int>(it - old_order.begin());
  }
  std::vector<int> perm(static_cast<size_t>(1) << k);
  for (int j = 0; j < static_cast<int>(perm.size()); ++j) {
    int old_j = 0;
    for (int p = 0; p < k; ++p) {
      old_j |= column_bit(j, k, p) << (k - 1 - old_pos[static_cast<size_t>(p)]);
    }
    perm[static_cast<size_t>(j)] = old_j;
  }
  return perm;
}

} // namespace synth_detail

inline reordered_dynamics reorder_inputs(int node, const stochastic_matrix& expected,
                                         const std::vector<int>& neighbors,
                                         const std::vector<int>& n_star) {
  reordered_dynamics out;
  out.node = node;
  std::vector<int> n_circ;
  for (int v : neighbors) {
    if (!std::binary_search(n_star.begin(), n_star.end(), v)) {
      n_circ.push_back(v);
    }
  }
  out.n_circ_count = static_cast<int>(n_circ.size());
  out.n_star_count = static_cast<int>(n_star.size());
  out.input_order = n_circ;
  out.input_order.insert(out.input_order.end(), n_star.begin(), n_star.end());
  if (out.input_order.size() != neighbors.size()) {
    throw std::invalid_argument("reorder_inputs: deleted set is not a subset of the neighbors");
  }
  const std::vector<int> perm = synth_detail::column_permutation(neighbors, out.input_order);
  matrix l(2, expected.cols());
  for (int j = 0; j < expected.cols(); ++j) {
    const pvec2 c = expected.col2(perm[static_cast<size_t>(j)]);
    l.at(0, j) = c[0];
    l.at(1, j) = c[1];
  }
  out.l = stochastic_matrix(std::move(l));
  return out;
}

/*!
  Target dynamics for a pinned node: G over the kept inputs and its
  block-replicated form T = G (I (x) 1^T) over all inputs.

  G is obtained from the reordered dynamics by fixing the deleted inputs at
  constants. Among the 2^{|deleted|} substitutions the one whose restriction
  keeps the most functional kept-inputs is chosen (deleting edges should
  perturb the retained coupling as little as possible); ties go to the
  lexicographically smallest assignment, value 0 before 1.
*/
struct target_dynamics {
  stochastic_matrix g; // 2 x 2^{n_circ}
  stochastic_matrix t; // 2 x 2^{n_circ + n_star}
  std::vector<bool> substitution; // chosen value per deleted input, ascending
};

namespace synth_detail {

inline int functional_count2(const matrix& g, int k) {
  int count = 0;
  for (int p = 0; p < k; ++p) {
    const int stride = 1 << (k - 1 - p);
    bool depends = false;
    for (int j = 0; j < g.cols && !depends; ++j) {
      if (((j >> (k - 1 - p)) & 1) == 0) {
        depends = g.at(0, j) != g.at(0, j + stride);
      }
    }
    count += depends ? 1 : 0;
  }
  return count;
}

} // namespace synth_detail

inline target_dynamics derive_target(const reordered_dynamics& dyn) {
  const int c = dyn.n_circ_count;
  const int s = dyn.n_star_count;
  const int blocks = 1 << c;
  const int block_size = 1 << s;

  matrix best_g(2, blocks);
  int best_score = -1;
  std::vector<bool> best_sub;
  for (int v = 0; v < block_size; ++v) { // value tuples in lexicographic order
    const int offset = (block_size - 1) - v; // canonical sub-column of this assignment
    matrix g(2, blocks);
    for (int b = 0; b < blocks; ++b) {
      const pvec2 col = dyn.l.col2(b * block_size + offset);
      g.at(0, b) = col[0];
      g.at(1, b) = col[1];
    }
    const int score = synth_detail::functional_count2(g, c);
    if (score > best_score) {
      best_score = score;
      best_g = std::move(g);
      best_sub.assign(static_cast<size_t>(s), false);
      for (int p = 0; p < s; ++p) {
        best_sub[static_cast<size_t>(p)] = ((v >> (s - 1 - p)) & 1) != 0;
      }
    }
  }

  target_dynamics out;
  matrix t(2, blocks * block_size);
  for (int j = 0; j < t.cols; ++j) {
    t.at(0, j) = best_g.at(0, j / block_size);
    t.at(1, j) = best_g.at(1, j / block_size);
  }
  out.g = stochastic_matrix(std::move(best_g));
  out.t = stochastic_matrix(std::move(t));
  out.substitution = std::move(best_sub);
  return out;
}

/*!
  Column classes of the solvability test. For a target column t against a
  dynamics column l:
    omega1: t = l (copy);        omega2: t = (1,0)^T (force 1);
    omega3: t = (1,1)^T - l      omega4: t = (0,1)^T (force 0).
    (negate);
  A column may belong to several classes; the uniform equation is solvable
  iff all columns are covered by at most two classes.
*/
enum class omega : uint8_t { o1 = 0, o2 = 1, o3 = 2, o4 = 3 };

struct omega_set {
  uint8_t bits = 0;
  bool contains(omega o) const { return (bits >> static_cast<int>(o)) & 1; }
  void insert(omega o) { bits |= static_cast<uint8_t>(1 << static_cast<int>(o)); }
  bool empty() const { return bits == 0; }
  bool operator==(const omega_set&) const = default;
};

inline omega_set classify_column(const pvec2& t, const pvec2& l) {
  if (t[0] + t[1] != rat(1) || l[0] + l[1] != rat(1) || t[0] < rat(0) || t[1] < rat(0) ||
      l[0] < rat(0) || l[1] < rat(0)) {
    throw std::invalid_argument("classify_column: inputs must be probability vectors");
  }
  omega_set out;
  if (t == l) {
    out.insert(omega::o1);
  }
  if (t[0] == rat(1)) {
    out.insert(omega::o2);
  }
  if (t[0] == rat(1) - l[0] && t[1] == rat(1) - l[1]) {
    out.insert(omega::o3);
  }
  if (t[0] == rat(0)) {
    out.insert(omega::o4);
  }
  return out;
}

/// Cover families in search order: the four single classes, then the pairs.
/// A single class is reported as a (c, c) pair.
inline const std::vector<std::pair<omega, omega>>& cover_families() {
  static const std::vector<std::pair<omega, omega>> families = {
      {omega::o1, omega::o1}, {omega::o2, omega::o2}, {omega::o3, omega::o3},
      {omega::o4, omega::o4}, {omega::o1, omega::o2}, {omega::o1, omega::o3},
      {omega::o1, omega::o4}, {omega::o2, omega::o3}, {omega::o2, omega::o4},
      {omega::o3, omega::o4}};
  return families;
}

inline std::optional<std::pair<omega, omega>> find_cover(const stochastic_matrix& t,
                                                         const stochastic_matrix& l) {
  if (t.cols() != l.cols()) {
    throw std::invalid_argument("find_cover: column counts differ");
  }
  std::vector<omega_set> membership(static_cast<size_t>(t.cols()));
  for (int j = 0; j < t.cols(); ++j) {
    membership[static_cast<size_t>(j)] = classify_column(t.col2(j), l.col2(j));
  }
  for (const auto& family : cover_families()) {
    bool covers = true;
    for (const omega_set& m : membership) {
      if (!m.contains(family.first) && !m.contains(family.second)) {
        covers = false;
        break;
      }
    }
    if (covers) {
      return family;
    }
  }
  return std::nullopt;
}

inline bool solvable_uniform(const stochastic_matrix& t, const stochastic_matrix& l) {
  return find_cover(t, l).has_value();
}

/// choose_target = derive the substitution target, then test the cover.
inline std::optional<std::pair<target_dynamics, std::pair<omega, omega>>> choose_target(
    const reordered_dynamics& dyn) {
  target_dynamics target = derive_target(dyn);
  const auto cover = find_cover(target.t, dyn.l);
  if (!cover) {
    return std::nullopt;
  }
  return std::make_pair(std::move(target), *cover);
}

struct uniform_controller {
  logical_matrix m_odot;  // 2 x 4
  logical_matrix psi_hat; // 2 x 2^{|N|}, over the reordered inputs
  std::pair<omega, omega> groups;
};

namespace synth_detail {

/// Branch of the connective realizing a class: alpha-pair (a, b) means the
/// branch maps a dynamics column (xi, 1-xi) to a*xi + b*(1-xi) on top.
inline std::pair<int, int> branch_of(omega o) {
  switch (o) {
    case omega::o1: return {1, 0}; // copy
    case omega::o2: return {1, 1}; // force 1
    case omega::o3: return {0, 1}; // negate
    case omega::o4: return {0, 0}; // force 0
  }
  throw internal_error("branch_of: unreachable");
}

inline pvec2 connective_column(const logical_matrix& m_odot, int psi, const pvec2& l) {
  // M_o |x| delta_2^psi |x| l = l_top * Col_{2 psi - 1}(M_o) + l_bot * Col_{2 psi}(M_o)
  pvec2 out{rat(0), rat(0)};
  const int c1 = m_odot.cols[static_cast<size_t>(2 * psi - 2)];
  const int c2 = m_odot.cols[static_cast<size_t>(2 * psi - 1)];
  out[static_cast<size_t>(c1 - 1)] += l[0];
  out[static_cast<size_t>(c2 - 1)] += l[1];
  return out;
}

inline void verify_feedback_equation(const logical_matrix& m_odot, const logical_matrix& psi_hat,
                                     const stochastic_matrix& l, const stochastic_matrix& t) {
  for (int j = 0; j < l.cols(); ++j) {
    const pvec2 lhs =
        connective_column(m_odot, psi_hat.cols[static_cast<size_t>(j)], l.col2(j));
    if (lhs != t.col2(j)) {
      throw internal_error("stage-1 feedback equation failed to verify at column " +
                           std::to_string(j + 1));
    }
  }
}

} // namespace synth_detail

inline uniform_controller synthesize_uniform(const stochastic_matrix& t,
                                             const stochastic_matrix& l,
                                             std::pair<omega, omega> groups) {
  uniform_controller out;
  out.groups = groups;
  const auto [a1, a2] = synth_detail::branch_of(groups.first);
  const auto [a3, a4] = synth_detail::branch_of(groups.second);
  out.m_odot = delta(2, {2 - a1, 2 - a2, 2 - a3, 2 - a4});
  std::vector<int> psi(static_cast<size_t>(t.cols()));
  for (int j = 0; j < t.cols(); ++j) {
    const omega_set m = classify_column(t.col2(j), l.col2(j));
    if (m.contains(groups.first)) {
      psi[static_cast<size_t>(j)] = 1; // first group; also the tie-break
    } else if (m.contains(groups.second)) {
      psi[static_cast<size_t>(j)] = 2;
    } else {
      throw internal_error("synthesize_uniform: column not covered by the chosen groups");
    }
  }
  out.psi_hat = delta(2, std::move(psi));
  synth_detail::verify_feedback_equation(out.m_odot, out.psi_hat, l, t);
  return out;
}

/*!
  Per-mode controller for a node where no uniform law exists. The connective
  is the fixed select operator delta_2[1,2,2,1] (u = 1 passes the mode's
  update through, u = 0 negates it), so Psi^ marks the columns where the
  mode already agrees with its target; this is solvable for every logical
  pair (T, L).
*/
struct mode_controller {
  int mode = 0;                 // 1-based candidate index
  std::vector<int> mode_vars;   // functional variables of this candidate
  std::vector<int> input_order; // kept ascending, deleted ascending
  int n_circ_count = 0;
  logical_matrix l;       // reordered mode dynamics
  logical_matrix g;       // target over kept mode inputs
  logical_matrix t;       // block-replicated target
  logical_matrix m_odot;  // always delta_2[1,2,2,1]
  logical_matrix psi_hat; // pass/negate per column
  logical_matrix g_hat;   // g extended to the node's full kept set
  std::vector<bool> substitution;
};

struct nonuniform_controller {
  std::vector<mode_controller> modes;
};

inline mode_controller synthesize_nonuniform_mode(int mode_index,
                                                  const candidate_function& cand,
                                                  const std::vector<int>& n_star,
                                                  const std::vector<int>& node_n_circ) {
  mode_controller out;
  out.mode = mode_index;
  out.mode_vars = cand.functional_vars;

  std::vector<int> mode_star;
  for (int v : cand.functional_vars) {
    if (std::binary_search(n_star.begin(), n_star.end(), v)) {
      mode_star.push_back(v);
    }
  }
  const reordered_dynamics dyn = reorder_inputs(
      0, stochastic_matrix::from_logical(cand.structure), cand.functional_vars, mode_star);
  out.input_order = dyn.input_order;
  out.n_circ_count = dyn.n_circ_count;
  const target_dynamics target = derive_target(dyn);
  out.substitution = target.substitution;

  const auto l_log = dyn.l.as_logical();
  const auto g_log = target.g.as_logical();
  const auto t_log = target.t.as_logical();
  if (!l_log || !g_log || !t_log) {
    throw internal_error("non-uniform synthesis expects deterministic mode dynamics");
  }
  out.l = *l_log;
  out.g = *g_log;
  out.t = *t_log;

  out.m_odot = delta(2, {1, 2, 2, 1});
  std::vector<int> psi(static_cast<size_t>(out.t.col_count()));
  for (int j = 0; j < out.t.col_count(); ++j) {
    psi[static_cast<size_t>(j)] =
        out.t.cols[static_cast<size_t>(j)] == out.l.cols[static_cast<size_t>(j)] ? 1 : 2;
  }
  out.psi_hat = delta(2, std::move(psi));
  synth_detail::verify_feedback_equation(out.m_odot, out.psi_hat,
                                         stochastic_matrix::from_logical(out.l),
                                         stochastic_matrix::from_logical(out.t));

  // Extend the per-mode target to the node's kept in-neighbor set.
  std::vector<int> mode_circ;
  for (int v : cand.functional_vars) {
    if (!std::binary_search(n_star.begin(), n_star.end(), v)) {
      mode_circ.push_back(v);
    }
  }
  out.g_hat = extend_structure_matrix(out.g, mode_circ, node_n_circ);
  return out;
}

/// Everything the first stage produced for one pinned node.
struct stage1_controller {
  int node = 0;
  reordered_dynamics dynamics;
  target_dynamics target; // the uniform target that was tested
  std::variant<uniform_controller, nonuniform_controller> controller;
  bool uniform() const { return std::holds_alternative<uniform_controller>(controller); }
};

struct stage1_plan {
  pinning_partition partition;
  std::vector<stage1_controller> controllers; // one per pinned node, ascending
  std::vector<int> lambda1;                   // uniform-solvable pinned nodes
  std::vector<int> lambda2;                   // per-mode controlled pinned nodes
};

inline stage1_plan synthesize_stage1(const pbn_model& model, const pinning_partition& partition) {
  stage1_plan plan;
  plan.partition = partition;
  for (const pinned_node& pin : partition.pinned) {
    const pbn_node& node = model.node(pin.node);
    stage1_controller ctl;
    ctl.node = pin.node;
    ctl.dynamics = reorder_inputs(pin.node, expected_matrix(node), node.neighbors, pin.n_star);
    ctl.target = derive_target(ctl.dynamics);
    const auto cover = find_cover(ctl.target.t, ctl.dynamics.l);
    if (cover) {
      ctl.controller = synthesize_uniform(ctl.target.t, ctl.dynamics.l, *cover);
      plan.lambda1.push_back(pin.node);
    } else {
      nonuniform_controller non;
      for (size_t k = 0; k < node.candidates.size(); ++k) {
        non.modes.push_back(synthesize_nonuniform_mode(static_cast<int>(k) + 1,
                                                       node.candidates[k], pin.n_star,
                                                       pin.n_circ));
      }
      ctl.controller = std::move(non);
      plan.lambda2.push_back(pin.node);
    }
    plan.controllers.push_back(std::move(ctl));
  }
  return plan;
}

} // namespace pbnpin
