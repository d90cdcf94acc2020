/*!
  \file report.hpp
  \brief JSON serialization of synthesis results (schema 1).

  Logical matrices are serialized as arrays of 1-based column indices with an
  explicit input-order field; stochastic matrices as rows of exact "p/q"
  strings. The controlled network is embedded as .pbn text so a report can be
  re-parsed and re-verified on its own.
*/

#pragma once

#include <json.hpp>

#include "parse.hpp"
#include "pipeline.hpp"

namespace pbnpin {

namespace report_detail {

inline nlohmann::json names_of(const pbn_model& model, const std::vector<int>& indices) {
  nlohmann::json out = nlohmann::json::array();
  for (int i : indices) {
    out.push_back(model.node(i).name);
  }
  return out;
}

inline nlohmann::json stochastic_json(const stochastic_matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) {
      row.push_back(to_string(m.at(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json attractor_json(const pbn_model& model,
                                     const std::vector<std::vector<long long>>& cycles) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& cycle : cycles) {
    nlohmann::json states = nlohmann::json::array();
    for (long long s : cycle) {
      nlohmann::json tuple = nlohmann::json::array();
      for (bool b : state_values(s, model.node_count())) {
        tuple.push_back(b ? 1 : 0);
      }
      states.push_back(nlohmann::json{{"index", s}, {"values", tuple}});
    }
    out.push_back(std::move(states));
  }
  return out;
}

} // namespace report_detail

inline nlohmann::json verification_json(const pbn_model& model, const verification_report& v) {
  nlohmann::json out;
  out["stable"] = v.stable;
  out["steady_at_target"] = v.epsilon_steady;
  out["unique_attractor_per_mode"] = v.unique_attractor_per_mode;
  out["all_states_reach_target"] = v.all_states_reach;
  out["mode_count"] = v.mode_count;
  out["state_count"] = v.state_count;
  out["wiring_acyclic"] = v.thm_acyclic;
  out["steady_states"] = v.steady_states;
  out["attractors_per_mode"] = nlohmann::json::array();
  for (const auto& cycles : v.attractors_per_mode) {
    out["attractors_per_mode"].push_back(report_detail::attractor_json(model, cycles));
  }
  return out;
}

inline nlohmann::json report_json(const pbn_model& model, const synthesis_result& r) {
  using nlohmann::json;
  json out;
  out["schema"] = 1;
  out["network"] = model.name();
  json nodes = json::array();
  for (const pbn_node& node : model.nodes()) {
    nodes.push_back(node.name);
  }
  out["nodes"] = nodes;

  json tuple = json::array();
  for (bool b : r.target.epsilon) {
    tuple.push_back(b ? 1 : 0);
  }
  out["target"] = {{"values", tuple}, {"index", r.target.index}};

  json edges = json::array();
  for (const edge& e : r.digraph.edges) {
    edges.push_back({model.node(e.first).name, model.node(e.second).name});
  }
  out["digraph"] = {{"edges", edges}, {"acyclic", r.was_acyclic}};

  json fas_edges = json::array();
  for (const edge& e : r.arcs.edges) {
    fas_edges.push_back({model.node(e.first).name, model.node(e.second).name});
  }
  out["fas"] = fas_edges;

  const auto name_of = [&](int i) { return model.node(i).name; };
  json stage1 = json::array();
  for (const stage1_controller& ctl : r.stage1.controllers) {
    const auto pin = std::find_if(r.stage1.partition.pinned.begin(),
                                  r.stage1.partition.pinned.end(),
                                  [&](const pinned_node& p) { return p.node == ctl.node; });
    json entry;
    entry["node"] = model.node(ctl.node).name;
    entry["deleted_inputs"] = report_detail::names_of(model, pin->n_star);
    entry["kept_inputs"] = report_detail::names_of(model, pin->n_circ);
    entry["input_order"] = report_detail::names_of(model, ctl.dynamics.input_order);
    entry["target_G"] = report_detail::stochastic_json(ctl.target.g);
    entry["target_T"] = report_detail::stochastic_json(ctl.target.t);
    if (ctl.uniform()) {
      const auto& uni = std::get<uniform_controller>(ctl.controller);
      entry["kind"] = "uniform";
      entry["m_odot"] = uni.m_odot.cols;
      entry["psi_hat"] = uni.psi_hat.cols;
      entry["u"] = steady_detail::controller_expr(uni.psi_hat, ctl.dynamics.input_order)
                       .to_string(name_of);
    } else {
      entry["kind"] = "nonuniform";
      json modes = json::array();
      for (const mode_controller& mode : std::get<nonuniform_controller>(ctl.controller).modes) {
        json m;
        m["mode"] = mode.mode;
        m["input_order"] = report_detail::names_of(model, mode.input_order);
        m["m_odot"] = mode.m_odot.cols;
        m["psi_hat"] = mode.psi_hat.cols;
        m["target_G"] = mode.g.cols;
        m["u"] = steady_detail::controller_expr(mode.psi_hat, mode.input_order).to_string(name_of);
        modes.push_back(std::move(m));
      }
      entry["modes"] = std::move(modes);
    }
    stage1.push_back(std::move(entry));
  }
  out["stage1"] = {{"lambda", report_detail::names_of(model, pinned_indices(r.stage1.partition))},
                   {"lambda1", report_detail::names_of(model, r.stage1.lambda1)},
                   {"lambda2", report_detail::names_of(model, r.stage1.lambda2)},
                   {"controllers", stage1}};

  json stage2;
  stage2["policy"] = r.stage2.policy == pin_policy::minimal ? "minimal" : "robust";
  stage2["lambda"] = r.stage2.lambda;
  stage2["xi"] = r.stage2.xi;
  stage2["gamma"] = report_detail::names_of(model, r.stage2.gamma);
  json sctls = json::array();
  for (const steady_controller& ctl : r.stage2.controllers) {
    const auto d = std::find_if(r.dynamics.begin(), r.dynamics.end(),
                                [&](const node_dynamics& nd) { return nd.node == ctl.node; });
    json entry;
    entry["node"] = model.node(ctl.node).name;
    entry["input_order"] = report_detail::names_of(model, d->vars);
    entry["Q"] = ctl.q.cols;
    entry["m_oplus"] = ctl.m_oplus.cols;
    entry["upsilon"] = ctl.upsilon.cols;
    entry["v"] = steady_detail::controller_expr(ctl.upsilon, d->vars).to_string(name_of);
    sctls.push_back(std::move(entry));
  }
  stage2["controllers"] = std::move(sctls);
  out["stage2"] = std::move(stage2);

  out["controlled_model"] = serialize(r.controlled, r.target.epsilon);
  out["verification"] = verification_json(r.controlled, r.verification);
  return out;
}

} // namespace pbnpin
