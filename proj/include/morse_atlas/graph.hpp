#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace morse_atlas {

using VertexId = int;
using EdgeId = int;

// Directed half-edges come in pairs (2k, 2k+1); reverse is xor 1. Loops are
// allowed and still give two distinct half-edges.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int vertex_count) : out_(vertex_count) {}

  VertexId add_vertex() {
    out_.emplace_back();
    return static_cast<VertexId>(out_.size()) - 1;
  }

  // Returns the half-edge from s to t; its reverse is the returned id ^ 1.
  EdgeId add_edge(VertexId s, VertexId t) {
    check_vertex(s);
    check_vertex(t);
    EdgeId e = static_cast<EdgeId>(source_.size());
    source_.push_back(s);
    source_.push_back(t);
    out_[s].push_back(e);
    out_[t].push_back(e + 1);
    return e;
  }

  int vertex_count() const { return static_cast<int>(out_.size()); }
  int edge_count() const { return static_cast<int>(source_.size()); }
  int pair_count() const { return edge_count() / 2; }

  VertexId source(EdgeId e) const { return source_[check_edge(e)]; }
  VertexId target(EdgeId e) const { return source_[check_edge(e) ^ 1]; }
  static EdgeId reverse(EdgeId e) { return e ^ 1; }
  static int pair_of(EdgeId e) { return e >> 1; }

  // Out half-edges of v in insertion order.
  const std::vector<EdgeId>& out_edges(VertexId v) const {
    check_vertex(v);
    return out_[v];
  }

  bool has_vertex(VertexId v) const { return v >= 0 && v < vertex_count(); }

  void check_vertex(VertexId v) const {
    if (!has_vertex(v))
      throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(v));
  }

  EdgeId check_edge(EdgeId e) const {
    if (e < 0 || e >= edge_count())
      throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(e));
    return e;
  }

  // Hop distances from `from`; -1 for unreachable vertices.
  std::vector<int> distances(VertexId from) const {
    check_vertex(from);
    std::vector<int> dist(vertex_count(), -1);
    std::deque<VertexId> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
      VertexId v = queue.front();
      queue.pop_front();
      for (EdgeId e : out_[v]) {
        VertexId w = target(e);
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    return dist;
  }

  bool connected() const {
    if (vertex_count() == 0) return true;
    auto d = distances(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
  }

 private:
  std::vector<VertexId> source_;
  std::vector<std::vector<EdgeId>> out_;
};

/// BFS tree from the least vertex id, scanning out-edges in insertion order.
/// Each returned half-edge points away from vertex 0.
inline std::vector<EdgeId> spanning_tree(const Graph& g) {
  if (g.vertex_count() == 0)
    throw Error(ErrorCode::DisconnectedGraph, "empty graph has no spanning tree");
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<EdgeId> tree;
  std::deque<VertexId> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.out_edges(v)) {
      VertexId w = g.target(e);
      if (!seen[w]) {
        seen[w] = 1;
        tree.push_back(e);
        queue.push_back(w);
      }
    }
  }
  if (static_cast<int>(tree.size()) != g.vertex_count() - 1)
    throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");
  return tree;
}

// Membership by edge pair, for a list of half-edges.
inline std::vector<char> pair_mask(const Graph& g, const std::vector<EdgeId>& edges) {
  std::vector<char> mask(g.pair_count(), 0);
  for (EdgeId e : edges) mask[Graph::pair_of(g.check_edge(e))] = 1;
  return mask;
}

/// True iff `edges` (one half-edge per pair, any orientation) is a spanning
/// tree of g.
inline bool is_spanning_tree(const Graph& g, const std::vector<EdgeId>& edges) {
  if (g.vertex_count() == 0) return false;
  if (static_cast<int>(edges.size()) != g.vertex_count() - 1) return false;
  std::vector<int> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (EdgeId e : edges) {
    if (e < 0 || e >= g.edge_count()) return false;
    int a = find(g.source(e)), b = find(g.target(e));
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

struct Subgraph {
  Graph graph;
  std::vector<VertexId> parent_vertex;  // new id -> id in the parent graph
  std::vector<EdgeId> parent_edge;      // new half-edge -> parent half-edge
};

/// Vertices of U (renumbered in increasing order) and every edge with both
/// endpoints in U.
inline Subgraph induced_subgraph(const Graph& g, std::vector<VertexId> U) {
  for (VertexId v : U) g.check_vertex(v);
  std::sort(U.begin(), U.end());
  U.erase(std::unique(U.begin(), U.end()), U.end());
  std::vector<int> index(g.vertex_count(), -1);
  for (int i = 0; i < static_cast<int>(U.size()); ++i) index[U[i]] = i;
  Subgraph sub{Graph(static_cast<int>(U.size())), U, {}};
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    int s = index[g.source(e)], t = index[g.target(e)];
    if (s < 0 || t < 0) continue;
    sub.graph.add_edge(s, t);
    sub.parent_edge.push_back(e);
    sub.parent_edge.push_back(e + 1);
  }
  return sub;
}

/// Components of g - {v}, each sorted, listed by least member.
inline std::vector<std::vector<VertexId>> components_minus_vertex(const Graph& g, VertexId v) {
  g.check_vertex(v);
  std::vector<int> comp(g.vertex_count(), -1);
  comp[v] = -2;
  std::vector<std::vector<VertexId>> out;
  for (VertexId start = 0; start < g.vertex_count(); ++start) {
    if (comp[start] != -1) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<VertexId> queue{start};
    comp[start] = id;
    while (!queue.empty()) {
      VertexId x = queue.front();
      queue.pop_front();
      out[id].push_back(x);
      for (EdgeId e : g.out_edges(x)) {
        VertexId y = g.target(e);
        if (comp[y] == -1) {
          comp[y] = id;
          queue.push_back(y);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

inline bool is_connected_set(const Graph& g, const std::vector<VertexId>& U) {
  if (U.empty()) return false;
  return induced_subgraph(g, U).graph.connected();
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

/// Undirected DOT, one edge per pair. Labels default to vertex ids.
inline std::string to_dot(const Graph& g, const std::vector<std::string>& vertex_labels = {},
                          const std::vector<std::string>& edge_labels = {},
                          const std::string& name = "G") {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    os << "  " << v << " [label=\""
       << dot_escape(v < static_cast<int>(vertex_labels.size()) ? vertex_labels[v]
                                                               : std::to_string(v))
       << "\"];\n";
  }
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    os << "  " << g.source(e) << " -- " << g.target(e);
    if (e < static_cast<int>(edge_labels.size()) && !edge_labels[e].empty())
      os << " [label=\"" << dot_escape(edge_labels[e]) << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace morse_atlas
