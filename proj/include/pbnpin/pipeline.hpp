/*!
  \file pipeline.hpp
  \brief End-to-end synthesis: wiring digraph, FAS, stage-1 controllers,
         steady-state pinning, assembly and oracle verification.
*/

#pragma once

#include "verify.hpp"

namespace pbnpin {

struct synthesis_options {
  fas_strategy strategy = fas_strategy::dfs_back_edges;
  std::optional<std::vector<edge>> fas_override; // implies user_supplied
  pin_policy policy = pin_policy::minimal;
  caps limits;
  int exhaustive_edge_cap = 24;
};

struct synthesis_result {
  wiring_digraph digraph;
  bool was_acyclic = false;
  fas arcs;
  stage1_plan stage1;
  std::vector<node_dynamics> dynamics; // post-stage-1, input to stage 2
  steady_plan stage2;
  pbn_model controlled;
  verification_report verification;
  steady_target target;
};

inline synthesis_result synthesize_pinning(const pbn_model& model, const steady_target& target,
                                           const synthesis_options& options = {}) {
  if (static_cast<int>(target.epsilon.size()) != model.node_count()) {
    throw std::invalid_argument("target length does not match the node count");
  }
  synthesis_result result;
  result.target = target;
  result.digraph = build_wiring_digraph(model);
  result.was_acyclic = is_acyclic(result.digraph);
  if (!result.was_acyclic) {
    if (options.fas_override) {
      result.arcs = compute_fas(result.digraph, fas_strategy::user_supplied,
                                options.fas_override, options.exhaustive_edge_cap);
    } else {
      result.arcs = compute_fas(result.digraph, options.strategy, std::nullopt,
                                options.exhaustive_edge_cap);
    }
  }
  result.stage1 = synthesize_stage1(model, make_pinning_partition(model, result.arcs));
  result.dynamics = post_stage1_dynamics(model, result.stage1);
  result.stage2 = minimal_steady_pinning(result.dynamics, target, options.policy);
  synthesize_stage2_controllers(result.stage2, result.dynamics);
  result.controlled =
      assemble_controlled_pbn(model, result.stage1, result.stage2, options.limits);
  result.verification = check_global_stability(result.controlled, target, options.limits);
  return result;
}

/// Parse a "Name=1,Other=0" style assignment into a steady target.
inline steady_target parse_target_string(const pbn_model& model, const std::string& text) {
  std::vector<bool> eps(static_cast<size_t>(model.node_count()), false);
  std::vector<bool> seen(static_cast<size_t>(model.node_count()), false);
  size_t pos = 0;
  const auto skip = [&] {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) {
      ++pos;
    }
  };
  skip();
  while (pos < text.size()) {
    size_t eq = text.find('=', pos);
    if (eq == std::string::npos) {
      throw std::invalid_argument("target: expected name=value near '" + text.substr(pos) + "'");
    }
    std::string name = text.substr(pos, eq - pos);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) {
      name.pop_back();
    }
    const auto idx = model.index_of(name);
    if (!idx) {
      throw std::invalid_argument("target: unknown node '" + name + "'");
    }
    pos = eq + 1;
    skip();
    if (pos >= text.size() || (text[pos] != '0' && text[pos] != '1')) {
      throw std::invalid_argument("target: value of '" + name + "' must be 0 or 1");
    }
    if (seen[static_cast<size_t>(*idx - 1)]) {
      throw std::invalid_argument("target: node '" + name + "' assigned twice");
    }
    seen[static_cast<size_t>(*idx - 1)] = true;
    eps[static_cast<size_t>(*idx - 1)] = text[pos] == '1';
    ++pos;
    skip();
  }
  for (int i = 1; i <= model.node_count(); ++i) {
    if (!seen[static_cast<size_t>(i - 1)]) {
      throw std::invalid_argument("target: node '" + model.node(i).name + "' not assigned");
    }
  }
  return steady_target::from_values(std::move(eps));
}

} // namespace pbnpin
