/*!
  \file verify.hpp
  \brief Brute-force verification oracle: mode enumeration, attractors per
         deterministic mode, and the global-stability verdict for a
         prescribed state. Independent of the synthesis path; everything is
         decided by exhaustive state-space enumeration and graph
         reachability over exact probabilities.
*/

#pragma once

#include <random>

#include "steadypin.hpp"

namespace pbnpin {

/// One candidate after within-node duplicate merging (same truth table over
/// the node's in-neighbor set; probabilities summed, zero-probability
/// candidates dropped).
struct effective_candidate {
  bool_expr expr;
  rational probability;
  logical_matrix table; // over the node's full neighbor set
};

struct mode_model {
  std::vector<int> choice; // per node: index into the node's effective candidates
  rational probability;
};

class mode_set {
public:
  mode_set(const pbn_model& model, const caps& limits = {}) : model_(&model) {
    const int n = model.node_count();
    per_node_.resize(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
      const pbn_node& node = model.node(i);
      auto& merged = per_node_[static_cast<size_t>(i - 1)];
      for (const candidate_function& cand : node.candidates) {
        if (cand.probability == rat(0)) {
          continue;
        }
        const logical_matrix table =
            extend_structure_matrix(cand.structure, cand.functional_vars, node.neighbors);
        auto it = std::find_if(merged.begin(), merged.end(), [&](const effective_candidate& e) {
          return e.table == table;
        });
        if (it == merged.end()) {
          merged.push_back({cand.expr, cand.probability, table});
        } else {
          it->probability += cand.probability;
        }
      }
      if (merged.empty()) {
        throw std::invalid_argument("node " + node.name + " has no positive-probability candidate");
      }
    }

    long long count = 1;
    for (const auto& merged : per_node_) {
      count *= static_cast<long long>(merged.size());
      if (count > limits.max_modes) {
        throw cap_error("mode enumeration exceeds cap of " + std::to_string(limits.max_modes));
      }
    }
    std::vector<int> choice(per_node_.size(), 0);
    for (long long m = 0; m < count; ++m) {
      mode_model mode;
      mode.choice = choice;
      mode.probability = rat(1);
      for (size_t i = 0; i < per_node_.size(); ++i) {
        mode.probability *= per_node_[i][static_cast<size_t>(choice[i])].probability;
      }
      modes_.push_back(std::move(mode));
      for (int i = static_cast<int>(choice.size()) - 1; i >= 0; --i) {
        if (++choice[static_cast<size_t>(i)] <
            static_cast<int>(per_node_[static_cast<size_t>(i)].size())) {
          break;
        }
        choice[static_cast<size_t>(i)] = 0;
      }
    }
  }

  const std::vector<mode_model>& modes() const { return modes_; }
  const std::vector<std::vector<effective_candidate>>& per_node() const { return per_node_; }

  /// Next state (1-based) of state s under mode m; pure table lookups.
  long long next_state(const mode_model& m, long long s) const {
    const int n = model_->node_count();
    const long long s0 = s - 1;
    long long out0 = 0;
    for (int i = 1; i <= n; ++i) {
      const effective_candidate& cand =
          per_node_[static_cast<size_t>(i - 1)][static_cast<size_t>(m.choice[static_cast<size_t>(i - 1)])];
      const int col = project_state(s0, n, model_->node(i).neighbors);
      const bool value = cand.table.cols[static_cast<size_t>(col)] == 1;
      out0 |= static_cast<long long>(value ? 0 : 1) << (n - i);
    }
    return out0 + 1;
  }

private:
  const pbn_model* model_;
  std::vector<std::vector<effective_candidate>> per_node_;
  std::vector<mode_model> modes_;
};

inline std::vector<mode_model> enumerate_modes(const pbn_model& model, const caps& limits = {}) {
  return mode_set(model, limits).modes();
}

/*!
  Attractors of a deterministic next-state map: the cycles of its functional
  graph, each rotated to start at its smallest state. Fixed points come out
  as length-1 cycles.
*/
inline std::vector<std::vector<long long>> attractors(const std::vector<long long>& next) {
  const long long count = static_cast<long long>(next.size()) - 1; // 1-based map
  std::vector<int> color(next.size(), 0);                          // 0 new, 1 in walk, 2 done
  std::vector<std::vector<long long>> cycles;
  std::vector<long long> walk;
  for (long long s = 1; s <= count; ++s) {
    if (color[static_cast<size_t>(s)] != 0) {
      continue;
    }
    walk.clear();
    long long u = s;
    while (color[static_cast<size_t>(u)] == 0) {
      color[static_cast<size_t>(u)] = 1;
      walk.push_back(u);
      u = next[static_cast<size_t>(u)];
    }
    if (color[static_cast<size_t>(u)] == 1) {
      auto it = std::find(walk.begin(), walk.end(), u);
      std::vector<long long> cycle(it, walk.end());
      auto min_it = std::min_element(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), min_it, cycle.end());
      cycles.push_back(std::move(cycle));
    }
    for (long long v : walk) {
      color[static_cast<size_t>(v)] = 2;
    }
  }
  return cycles;
}

struct verification_report {
  bool stable = false;
  bool epsilon_steady = false;           // fixed by every mode
  bool unique_attractor_per_mode = false; // every mode's only attractor is {epsilon}
  bool all_states_reach = false;         // union-graph reachability of epsilon
  long long mode_count = 0;
  long long state_count = 0;
  std::vector<std::vector<std::vector<long long>>> attractors_per_mode;
  std::vector<long long> steady_states; // states fixed by every mode
  bool thm_acyclic = false;             // controlled wiring digraph acyclic
  steady_target target;
};

inline verification_report check_global_stability(const pbn_model& model,
                                                  const steady_target& target,
                                                  const caps& limits = {}) {
  const int n = model.node_count();
  if (n > limits.max_oracle_nodes) {
    throw cap_error("verification: " + std::to_string(n) + " nodes exceed oracle cap " +
                    std::to_string(limits.max_oracle_nodes));
  }
  verification_report report;
  report.target = target;
  const long long states = 1LL << n;
  report.state_count = states;

  const mode_set modes(model, limits);
  report.mode_count = static_cast<long long>(modes.modes().size());
  const long long eps = target.index;

  std::vector<std::vector<long long>> next_maps;
  next_maps.reserve(modes.modes().size());
  for (const mode_model& m : modes.modes()) {
    std::vector<long long> next(static_cast<size_t>(states) + 1, 0);
    for (long long s = 1; s <= states; ++s) {
      next[static_cast<size_t>(s)] = modes.next_state(m, s);
    }
    next_maps.push_back(std::move(next));
  }

  report.epsilon_steady = true;
  report.unique_attractor_per_mode = true;
  for (const auto& next : next_maps) {
    if (next[static_cast<size_t>(eps)] != eps) {
      report.epsilon_steady = false;
    }
    auto cycles = attractors(next);
    const bool unique = cycles.size() == 1 && cycles.front().size() == 1 &&
                        cycles.front().front() == eps;
    if (!unique) {
      report.unique_attractor_per_mode = false;
    }
    report.attractors_per_mode.push_back(std::move(cycles));
  }

  // States fixed by every mode (the steady states of the network).
  for (long long s = 1; s <= states; ++s) {
    bool fixed = true;
    for (const auto& next : next_maps) {
      if (next[static_cast<size_t>(s)] != s) {
        fixed = false;
        break;
      }
    }
    if (fixed) {
      report.steady_states.push_back(s);
    }
  }

  // Reverse reachability of epsilon over the union transition graph. All
  // mode probabilities are strictly positive, so "reaches with probability
  // one" reduces to the absence of any other escape-free recurrent class.
  std::vector<std::vector<int32_t>> preds(static_cast<size_t>(states) + 1);
  for (const auto& next : next_maps) {
    for (long long s = 1; s <= states; ++s) {
      preds[static_cast<size_t>(next[static_cast<size_t>(s)])].push_back(static_cast<int32_t>(s));
    }
  }
  std::vector<char> reached(static_cast<size_t>(states) + 1, 0);
  std::vector<long long> queue{eps};
  reached[static_cast<size_t>(eps)] = 1;
  while (!queue.empty()) {
    const long long u = queue.back();
    queue.pop_back();
    for (int32_t p : preds[static_cast<size_t>(u)]) {
      if (!reached[static_cast<size_t>(p)]) {
        reached[static_cast<size_t>(p)] = 1;
        queue.push_back(p);
      }
    }
  }
  report.all_states_reach = true;
  for (long long s = 1; s <= states; ++s) {
    if (!reached[static_cast<size_t>(s)]) {
      report.all_states_reach = false;
      break;
    }
  }

  report.thm_acyclic = is_acyclic(build_wiring_digraph(model));
  report.stable =
      report.epsilon_steady && report.unique_attractor_per_mode && report.all_states_reach;
  return report;
}

namespace sim_detail {

/// Portable unbiased bounded draw (rejection sampling on the raw generator).
inline uint64_t bounded_draw(std::mt19937_64& gen, uint64_t bound) {
  const uint64_t limit = std::numeric_limits<uint64_t>::max() / bound * bound;
  for (;;) {
    const uint64_t r = gen();
    if (r < limit) {
      return r % bound;
    }
  }
}

} // namespace sim_detail

/*!
  Seeded trajectory sampling with exact per-node candidate draws: each node's
  candidate is selected by an integer draw below the common denominator of
  its probabilities, so the sampling distribution is exactly the model's.
  Deterministic for a fixed seed.
*/
inline std::vector<long long> simulate(const pbn_model& model, const std::vector<bool>& x0,
                                       int steps, uint64_t seed, const caps& limits = {}) {
  const int n = model.node_count();
  if (static_cast<int>(x0.size()) != n) {
    throw std::invalid_argument("simulate: initial state has wrong length");
  }
  const mode_set modes(model, limits);
  std::mt19937_64 gen(seed);

  // Per node: common denominator and cumulative numerators.
  std::vector<uint64_t> denom(static_cast<size_t>(n));
  std::vector<std::vector<uint64_t>> cumulative(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    integer d = 1;
    for (const effective_candidate& c : modes.per_node()[static_cast<size_t>(i)]) {
      d = boost::multiprecision::lcm(d, c.probability.denominator());
    }
    if (d > integer(std::numeric_limits<int64_t>::max())) {
      throw cap_error("simulate: probability denominators too large for exact sampling");
    }
    denom[static_cast<size_t>(i)] = static_cast<uint64_t>(d);
    integer acc = 0;
    for (const effective_candidate& c : modes.per_node()[static_cast<size_t>(i)]) {
      acc += c.probability.numerator() * (d / c.probability.denominator());
      cumulative[static_cast<size_t>(i)].push_back(static_cast<uint64_t>(acc));
    }
  }

  std::vector<long long> trajectory;
  trajectory.reserve(static_cast<size_t>(steps) + 1);
  long long s = state_index(x0);
  trajectory.push_back(s);
  mode_model draw;
  draw.choice.assign(static_cast<size_t>(n), 0);
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < n; ++i) {
      const auto& cum = cumulative[static_cast<size_t>(i)];
      int pick = 0;
      if (cum.size() > 1) {
        const uint64_t r = sim_detail::bounded_draw(gen, denom[static_cast<size_t>(i)]);
        while (r >= cum[static_cast<size_t>(pick)]) {
          ++pick;
        }
      }
      draw.choice[static_cast<size_t>(i)] = pick;
    }
    s = modes.next_state(draw, s);
    trajectory.push_back(s);
  }
  return trajectory;
}

} // namespace pbnpin
