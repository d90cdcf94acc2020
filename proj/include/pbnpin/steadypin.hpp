/*!
  \file steadypin.hpp
  \brief Second-stage pinning: minimal pinning-set optimization for a
         prescribed steady state, second controllers and assembly of the
         final controlled network.

  The constraints decouple per node, so the exact optimum is closed-form:
  a node needs pinning iff its post-stage-1 column at the steady input does
  not already equal the required unit vector. The alternative "robust"
  policy pins every node whose post-stage-1 update is not constantly the
  target value; it is never smaller, but forces the target regardless of
  the state the network starts in.
*/

#pragma once

#include "pinsynth.hpp"

namespace pbnpin {

struct steady_target {
  std::vector<bool> epsilon; // value per node, 1-based at position index-1
  long long index = 0;       // canonical delta_{2^n} index

  static steady_target from_values(std::vector<bool> values) {
    steady_target t;
    t.index = state_index(values);
    t.epsilon = std::move(values);
    return t;
  }
};

enum class pin_policy : uint8_t {
  minimal, // pin iff the steady-input column is not already the target unit
  robust   // pin iff the update is not constantly the target value
};

/// Post-stage-1 dynamics of one node over its kept in-neighbors.
struct node_dynamics {
  int node = 0;
  std::vector<int> vars; // N_i for unpinned nodes, N_i minus deleted otherwise
  stochastic_matrix g;   // 2 x 2^{|vars|}
};

inline std::vector<node_dynamics> post_stage1_dynamics(const pbn_model& model,
                                                       const stage1_plan& stage1) {
  std::vector<node_dynamics> out;
  out.reserve(static_cast<size_t>(model.node_count()));
  for (int i = 1; i <= model.node_count(); ++i) {
    node_dynamics d;
    d.node = i;
    const auto ctl = std::find_if(stage1.controllers.begin(), stage1.controllers.end(),
                                  [i](const stage1_controller& c) { return c.node == i; });
    if (ctl == stage1.controllers.end()) {
      d.vars = model.node(i).neighbors;
      d.g = expected_matrix(model.node(i));
    } else {
      const auto pin = std::find_if(stage1.partition.pinned.begin(),
                                    stage1.partition.pinned.end(),
                                    [i](const pinned_node& p) { return p.node == i; });
      d.vars = pin->n_circ;
      if (ctl->uniform()) {
        d.g = ctl->target.g;
      } else {
        // expectation of the per-mode targets extended to the kept set
        matrix g(2, 1 << d.vars.size());
        const auto& modes = std::get<nonuniform_controller>(ctl->controller).modes;
        for (size_t k = 0; k < modes.size(); ++k) {
          const rational p = model.node(i).candidates[k].probability;
          const logical_matrix& ghat = modes[k].g_hat;
          for (int j = 0; j < ghat.col_count(); ++j) {
            g.at(ghat.cols[static_cast<size_t>(j)] - 1, j) += p;
          }
        }
        d.g = stochastic_matrix(std::move(g));
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

struct steady_controller {
  int node = 0;
  logical_matrix q;       // constant target matrix over the kept inputs
  logical_matrix m_oplus; // 2 x 4
  logical_matrix upsilon; // 2 x 2^{|vars|}, fixed all-ones
};

struct steady_plan {
  std::vector<int> lambda; // 0/1 per node
  int xi = 0;
  std::vector<int> gamma; // pinned node indices, ascending
  std::vector<steady_controller> controllers;
  pin_policy policy = pin_policy::minimal;
};

namespace steady_detail {

inline int steady_input_column(const std::vector<int>& vars, const std::vector<bool>& epsilon) {
  const int k = static_cast<int>(vars.size());
  int idx = 0;
  for (int p = 0; p < k; ++p) {
    idx |= (epsilon[static_cast<size_t>(vars[p] - 1)] ? 0 : 1) << (k - 1 - p);
  }
  return idx;
}

inline bool column_is_unit(const pvec2& col, bool value) { return col == unit2(value); }

} // namespace steady_detail

/*!
  Closed-form solution of the minimal pinning optimization: each lambda_i is
  individually forced, so the returned cost is exactly minimal under the
  minimal policy. Only lambda, Q and the cost are produced here; the second
  controllers come from synthesize_steady_controller.
*/
inline steady_plan minimal_steady_pinning(const std::vector<node_dynamics>& dynamics,
                                          const steady_target& target,
                                          pin_policy policy = pin_policy::minimal) {
  steady_plan plan;
  plan.policy = policy;
  plan.lambda.assign(dynamics.size(), 0);
  for (size_t i = 0; i < dynamics.size(); ++i) {
    const node_dynamics& d = dynamics[i];
    const bool eps_i = target.epsilon[static_cast<size_t>(d.node - 1)];
    bool pinned;
    if (policy == pin_policy::minimal) {
      const int col = steady_detail::steady_input_column(d.vars, target.epsilon);
      pinned = !steady_detail::column_is_unit(d.g.col2(col), eps_i);
    } else {
      pinned = false;
      for (int j = 0; j < d.g.cols() && !pinned; ++j) {
        pinned = !steady_detail::column_is_unit(d.g.col2(j), eps_i);
      }
    }
    if (pinned) {
      plan.lambda[i] = 1;
      plan.gamma.push_back(d.node);
      steady_controller ctl;
      ctl.node = d.node;
      ctl.q = logical_matrix::constant(2, eps_i ? 1 : 2, d.g.cols());
      plan.controllers.push_back(std::move(ctl));
    }
  }
  plan.xi = static_cast<int>(plan.gamma.size());
  return plan;
}

/*!
  Solves M_+ Y (I (x) G) Phi = Q for a constant Q: since every column of Q
  is the same unit vector, the all-ones Y and the constant connective do it,
  and the identity is checked column-wise before returning.
*/
inline void synthesize_steady_controller(steady_controller& ctl, const node_dynamics& d) {
  const int q_idx = ctl.q.cols.front();
  ctl.m_oplus = delta(2, {q_idx, q_idx, q_idx, q_idx});
  ctl.upsilon = logical_matrix::constant(2, 1, d.g.cols());
  for (int j = 0; j < d.g.cols(); ++j) {
    const pvec2 lhs = synth_detail::connective_column(
        ctl.m_oplus, ctl.upsilon.cols[static_cast<size_t>(j)], d.g.col2(j));
    if (lhs != unit2(q_idx == 1)) {
      throw internal_error("stage-2 feedback equation failed to verify");
    }
  }
}

inline void synthesize_stage2_controllers(steady_plan& plan,
                                          const std::vector<node_dynamics>& dynamics) {
  for (steady_controller& ctl : plan.controllers) {
    const auto d = std::find_if(dynamics.begin(), dynamics.end(),
                                [&](const node_dynamics& nd) { return nd.node == ctl.node; });
    synthesize_steady_controller(ctl, *d);
  }
}

namespace steady_detail {

inline bool_expr controller_expr(const logical_matrix& table, const std::vector<int>& vars) {
  std::vector<bool> tt(static_cast<size_t>(table.col_count()));
  for (int j = 0; j < table.col_count(); ++j) {
    tt[static_cast<size_t>(j)] = table.cols[static_cast<size_t>(j)] == 1;
  }
  return expr_from_table(tt, vars);
}

} // namespace steady_detail

/*!
  Assemble the controlled network. Node updates follow the four cases of the
  final controlled form: stage-1 connectives wrap the original candidates of
  pinned nodes (per mode for non-uniform ones), and stage-2 connectives wrap
  the result for nodes in the steady pinning set. Candidate probabilities
  carry over unchanged.
*/
inline pbn_model assemble_controlled_pbn(const pbn_model& model, const stage1_plan& stage1,
                                         const steady_plan& stage2, const caps& limits = {}) {
  std::vector<node_spec> specs;
  specs.reserve(static_cast<size_t>(model.node_count()));
  for (int i = 1; i <= model.node_count(); ++i) {
    const pbn_node& node = model.node(i);
    node_spec spec;
    spec.name = node.name;

    std::vector<bool_expr> cores;
    cores.reserve(node.candidates.size());
    const auto ctl = std::find_if(stage1.controllers.begin(), stage1.controllers.end(),
                                  [i](const stage1_controller& c) { return c.node == i; });
    if (ctl == stage1.controllers.end()) {
      for (const candidate_function& cand : node.candidates) {
        cores.push_back(cand.expr);
      }
    } else if (ctl->uniform()) {
      const auto& uni = std::get<uniform_controller>(ctl->controller);
      const bool_expr u =
          steady_detail::controller_expr(uni.psi_hat, ctl->dynamics.input_order);
      for (const candidate_function& cand : node.candidates) {
        cores.push_back(apply_binary_table(uni.m_odot, u, cand.expr));
      }
    } else {
      const auto& non = std::get<nonuniform_controller>(ctl->controller);
      for (size_t k = 0; k < node.candidates.size(); ++k) {
        const mode_controller& mode = non.modes[k];
        const bool_expr u = steady_detail::controller_expr(mode.psi_hat, mode.input_order);
        cores.push_back(apply_binary_table(mode.m_odot, u, node.candidates[k].expr));
      }
    }

    const auto sctl = std::find_if(stage2.controllers.begin(), stage2.controllers.end(),
                                   [i](const steady_controller& c) { return c.node == i; });
    if (sctl != stage2.controllers.end()) {
      const auto pin = std::find_if(stage1.partition.pinned.begin(),
                                    stage1.partition.pinned.end(),
                                    [i](const pinned_node& p) { return p.node == i; });
      const std::vector<int>& vars =
          pin != stage1.partition.pinned.end() ? pin->n_circ : node.neighbors;
      const bool_expr v = steady_detail::controller_expr(sctl->upsilon, vars);
      for (bool_expr& core : cores) {
        core = apply_binary_table(sctl->m_oplus, v, core);
      }
    }

    for (size_t k = 0; k < node.candidates.size(); ++k) {
      spec.candidates.emplace_back(node.candidates[k].probability, cores[k]);
    }
    specs.push_back(std::move(spec));
  }
  return pbn_model::build(model.name() + "_pinned", specs, limits);
}

} // namespace pbnpin
