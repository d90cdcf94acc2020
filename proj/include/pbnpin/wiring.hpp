/*!
  \file wiring.hpp
  \brief Wiring digraph, cycle detection, feedback arc sets and the
         first-stage pinning partition.

  Edges are functional only: j -> i exists iff x_j is a functional variable
  of some positive-probability candidate of node i. A feedback arc set (FAS)
  is an edge set whose removal leaves the digraph acyclic; its validity is
  always re-verified by an acyclicity check, never assumed.
*/

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "model.hpp"

namespace pbnpin {

using edge = std::pair<int, int>; // (tail j, head i) for j -> i

struct wiring_digraph {
  int n = 0;
  std::set<edge> edges;

  std::vector<std::vector<int>> out_adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n) + 1);
    for (const edge& e : edges) {
      adj[static_cast<size_t>(e.first)].push_back(e.second);
    }
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
    }
    return adj;
  }
};

inline wiring_digraph build_wiring_digraph(const pbn_model& model) {
  wiring_digraph g;
  g.n = model.node_count();
  for (const pbn_node& node : model.nodes()) {
    for (const candidate_function& cand : node.candidates) {
      if (cand.probability == rat(0)) {
        continue;
      }
      for (int j : cand.functional_vars) {
        g.edges.insert({j, node.index});
      }
    }
  }
  return g;
}

namespace graph_detail {

// DFS over nodes ascending, out-neighbors ascending. Reports back edges and
// one cycle per back edge (the stack segment closing it).
struct dfs_result {
  std::vector<edge> back_edges;
  std::vector<std::vector<int>> cycles;
};

inline dfs_result dfs_back_edges(const wiring_digraph& g, const std::set<edge>& removed = {}) {
  const auto adj = g.out_adjacency();
  std::vector<int> state(static_cast<size_t>(g.n) + 1, 0); // 0 new, 1 on stack, 2 done
  std::vector<int> stack;
  dfs_result result;

  // Explicit stack of (node, next-neighbor position) to avoid deep recursion.
  std::vector<std::pair<int, size_t>> frames;
  for (int root = 1; root <= g.n; ++root) {
    if (state[static_cast<size_t>(root)] != 0) {
      continue;
    }
    frames.emplace_back(root, 0);
    state[static_cast<size_t>(root)] = 1;
    stack.push_back(root);
    while (!frames.empty()) {
      const int u = frames.back().first;
      const auto& nbrs = adj[static_cast<size_t>(u)];
      bool descended = false;
      while (frames.back().second < nbrs.size()) {
        const int v = nbrs[frames.back().second++];
        if (removed.count({u, v})) {
          continue;
        }
        if (state[static_cast<size_t>(v)] == 1) {
          result.back_edges.push_back({u, v});
          auto it = std::find(stack.begin(), stack.end(), v);
          result.cycles.emplace_back(it, stack.end());
          continue;
        }
        if (state[static_cast<size_t>(v)] == 0) {
          state[static_cast<size_t>(v)] = 1;
          stack.push_back(v);
          frames.emplace_back(v, 0);
          descended = true;
          break;
        }
      }
      if (!descended) {
        state[static_cast<size_t>(u)] = 2;
        stack.pop_back();
        frames.pop_back();
      }
    }
  }
  return result;
}

} // namespace graph_detail

inline bool is_acyclic(const wiring_digraph& g, const std::set<edge>& removed = {}) {
  return graph_detail::dfs_back_edges(g, removed).back_edges.empty();
}

/// Cycles met during DFS; self-loops appear as length-1 cycles.
inline std::vector<std::vector<int>> find_cycles(const wiring_digraph& g) {
  return graph_detail::dfs_back_edges(g).cycles;
}

enum class fas_strategy : uint8_t { dfs_back_edges, exhaustive_min, user_supplied };

struct fas {
  std::set<edge> edges;
};

namespace graph_detail {

inline fas exhaustive_min_fas(const wiring_digraph& g, int edge_cap) {
  if (static_cast<int>(g.edges.size()) > edge_cap) {
    throw cap_error("exhaustive_min: graph has more than " + std::to_string(edge_cap) + " edges");
  }
  std::set<edge> base; // self-loops belong to every FAS
  std::vector<edge> candidates;
  for (const edge& e : g.edges) {
    if (e.first == e.second) {
      base.insert(e);
    } else {
      candidates.push_back(e);
    }
  }
  if (is_acyclic(g, base)) {
    return fas{base};
  }
  const int m = static_cast<int>(candidates.size());
  for (int k = 1; k <= m; ++k) {
    std::vector<int> pick(static_cast<size_t>(k));
    // lexicographic k-combinations over candidate edges (sorted by set order)
    for (int i = 0; i < k; ++i) {
      pick[static_cast<size_t>(i)] = i;
    }
    for (;;) {
      std::set<edge> removed = base;
      for (int i : pick) {
        removed.insert(candidates[static_cast<size_t>(i)]);
      }
      if (is_acyclic(g, removed)) {
        return fas{removed};
      }
      int i = k - 1;
      while (i >= 0 && pick[static_cast<size_t>(i)] == m - k + i) {
        --i;
      }
      if (i < 0) {
        break;
      }
      ++pick[static_cast<size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
      }
    }
  }
  throw internal_error("exhaustive_min: no feedback arc set found"); // removing all edges is acyclic
}

} // namespace graph_detail

inline fas compute_fas(const wiring_digraph& g, fas_strategy strategy = fas_strategy::dfs_back_edges,
                       const std::optional<std::vector<edge>>& user_edges = std::nullopt,
                       int exhaustive_edge_cap = 24) {
  fas result;
  switch (strategy) {
    case fas_strategy::dfs_back_edges: {
      const auto dfs = graph_detail::dfs_back_edges(g);
      result.edges.insert(dfs.back_edges.begin(), dfs.back_edges.end());
      break;
    }
    case fas_strategy::exhaustive_min:
      result = graph_detail::exhaustive_min_fas(g, exhaustive_edge_cap);
      break;
    case fas_strategy::user_supplied: {
      if (!user_edges) {
        throw std::invalid_argument("user_supplied FAS requires an edge list");
      }
      for (const edge& e : *user_edges) {
        if (!g.edges.count(e)) {
          throw std::invalid_argument("FAS edge " + std::to_string(e.first) + "->" +
                                      std::to_string(e.second) + " is not in the wiring digraph");
        }
        result.edges.insert(e);
      }
      break;
    }
  }
  if (!is_acyclic(g, result.edges)) {
    throw std::invalid_argument("edge set does not break every cycle");
  }
  return result;
}

/// Per pinned node: deleted in-neighbors (FAS tails) and the kept remainder.
struct pinned_node {
  int node = 0;
  std::vector<int> n_star; // ascending
  std::vector<int> n_circ; // ascending
};

struct pinning_partition {
  fas arcs;
  std::vector<pinned_node> pinned; // ascending by node; Lambda = their indices
};

inline pinning_partition make_pinning_partition(const pbn_model& model, const fas& arcs) {
  pinning_partition plan;
  plan.arcs = arcs;
  std::map<int, std::set<int>> stars;
  for (const edge& e : arcs.edges) {
    stars[e.second].insert(e.first);
  }
  for (const auto& [head, tails] : stars) {
    pinned_node p;
    p.node = head;
    const std::vector<int>& neighbors = model.node(head).neighbors;
    for (int v : neighbors) {
      if (tails.count(v)) {
        p.n_star.push_back(v);
      } else {
        p.n_circ.push_back(v);
      }
    }
    if (p.n_star.size() != tails.size()) {
      throw internal_error("pinning partition: FAS tail outside in-neighbor set");
    }
    plan.pinned.push_back(std::move(p));
  }
  return plan;
}

inline std::vector<int> pinned_indices(const pinning_partition& plan) {
  std::vector<int> out;
  out.reserve(plan.pinned.size());
  for (const pinned_node& p : plan.pinned) {
    out.push_back(p.node);
  }
  return out;
}

/// DOT export; FAS edges are colored red, pinned nodes drawn filled.
inline std::string to_dot(const pbn_model& model, const wiring_digraph& g, const fas& arcs,
                          const std::vector<int>& pinned) {
  std::ostringstream out;
  out << "digraph wiring {\n";
  const std::set<int> pin(pinned.begin(), pinned.end());
  for (int i = 1; i <= g.n; ++i) {
    out << "  \"" << model.node(i).name << "\"";
    if (pin.count(i)) {
      out << " [style=filled, fillcolor=lightblue]";
    }
    out << ";\n";
  }
  for (const edge& e : g.edges) {
    out << "  \"" << model.node(e.first).name << "\" -> \"" << model.node(e.second).name << "\"";
    if (arcs.edges.count(e)) {
      out << " [color=red]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

} // namespace pbnpin
