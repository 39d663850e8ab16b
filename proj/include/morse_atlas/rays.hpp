#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bass_serre.hpp"
#include "error.hpp"
#include "gauge.hpp"
#include "paths.hpp"

namespace morse_atlas {

/// Eventually periodic word prefix * period^infinity. Letters are +-(i+1)
/// for the i-th declared generator of the terminal vertex group.
struct TailSpec {
  Word prefix;
  Word period;

  Letter at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    return period[(i - prefix.size()) % period.size()];
  }
};

/// Root-based edge path in a tree ball, either a prefix of an infinite path
/// or a finite path followed by a tail in its terminal vertex group.
struct CombinatorialRay {
  enum class Kind { Finite, InfinitePrefix };
  Kind kind = Kind::Finite;
  std::vector<EdgeId> edges;  // outgoing half-edges of the tree ball
  std::optional<TailSpec> tail;

  int length() const { return static_cast<int>(edges.size()); }
};

inline void validate_ray(const TreeBall& tree, const CombinatorialRay& r) {
  bool finite = r.kind == CombinatorialRay::Kind::Finite;
  if (finite != r.tail.has_value())
    throw Error(ErrorCode::InvalidInput, finite ? "finite ray needs a tail" : "infinite ray takes no tail");
  if (r.tail && r.tail->period.empty()) throw Error(ErrorCode::InvalidInput, "tail period is empty");
  int at = tree.root;
  for (EdgeId e : r.edges) {
    if (e < 0 || e >= tree.graph.edge_count()) throw Error(ErrorCode::NotInBall, "ray edge outside the tree ball");
    if (!tree.outgoing[e]) throw Error(ErrorCode::InvalidInput, "ray edges must point away from the root");
    if (tree.graph.source(e) != at) throw Error(ErrorCode::InvalidInput, "ray edges do not form a root-based path");
    at = tree.graph.target(e);
  }
}

/// Terminal tree vertex of the edge path.
inline int ray_end(const TreeBall& tree, const CombinatorialRay& r) {
  return r.edges.empty() ? tree.root : tree.graph.target(r.edges.back());
}

struct Realisation {
  Path path;
  std::vector<int> piece_start;  // index in `path` of alpha_i*, i = 1..n
  int prefix_edges = 0;          // edges of p(r) realised
  int tail_start = 0;            // index of omega*
  int tail_letters = 0;          // tail letters realised before the boundary
  bool truncated = false;        // the tail left the ball
};

/// Concatenated shortlex-least geodesics basepoint -> alpha_1* -> ... ->
/// alpha_n*, then the tail read letter by letter from omega* until it
/// leaves the ball.
inline Realisation realisation(const TreeBall& tree, const SpaceBall& space, const BallMetric& m,
                               const CombinatorialRay& r, int max_tail = -1) {
  validate_ray(tree, r);
  Realisation out;
  out.path = {space.basepoint};
  for (EdgeId e : r.edges) {
    int star = tree.edge_star[e];
    Path piece = first_geodesic(m, out.path.back(), star);
    out.piece_start.push_back(static_cast<int>(out.path.size()) - 1 + path_length(piece));
    out.path.insert(out.path.end(), piece.begin() + 1, piece.end());
    ++out.prefix_edges;
  }
  out.tail_start = static_cast<int>(out.path.size()) - 1;
  if (!r.tail) return out;
  VertexId v = tree.gamma_vertex[ray_end(tree, r)];
  const int gens = static_cast<int>(space.generating_sets[v].size());
  if (max_tail < 0) max_tail = space.radius + 1;
  for (int i = 0; i < max_tail; ++i) {
    Letter x = r.tail->at(i);
    if (x == 0 || std::abs(x) > gens) throw Error(ErrorCode::InvalidInput, "tail letter outside the vertex group");
    int cur = out.path.back(), next = -1;
    for (EdgeId e : space.graph.out_edges(cur))
      if (space.edge_letter[e] == x) next = space.graph.target(e);
    if (next < 0) {
      out.truncated = true;
      break;
    }
    out.path.push_back(next);
    ++out.tail_letters;
  }
  return out;
}

inline Realisation realisation(const TreeBall& tree, const SpaceBall& space, const CombinatorialRay& r) {
  return realisation(tree, space, metric_of(space), r);
}

struct LyingEdge {
  EdgeId edge;
  int from_index;  // least i with pi(gamma[i..]) inside T_edge

  bool operator==(const LyingEdge&) const = default;
};

/// Outgoing edges alpha whose subtree T_alpha contains the projection of a
/// terminal segment of gamma. Inside a finite ball these are the edges of
/// the root path to the coset of gamma's last vertex.
inline std::vector<LyingEdge> edges_lying_on(const TreeBall& tree, const SpaceBall& space, const Path& gamma) {
  if (gamma.empty() || gamma.front() != space.basepoint)
    throw Error(ErrorCode::BadBasepoint, "path must start at the basepoint");
  for (int x : gamma)
    if (x < 0 || x >= space.vertex_count()) throw Error(ErrorCode::NotInBall, "path vertex outside the ball");
  std::vector<LyingEdge> out;
  for (EdgeId e : tree.root_path(space.tree_label[gamma.back()])) {
    int i = static_cast<int>(gamma.size()) - 1;
    while (i > 0 && tree.in_subtree(e, space.tree_label[gamma[i - 1]])) --i;
    out.push_back({e, i});
  }
  return out;
}

/// Membership of r2 in the neighborhood V_k of r. Infinite type: r2 is long
/// enough and agrees with r at edge k. Finite type: r2 extends p(r) and the
/// two paths after omega(r)* stay pointwise within delta of the inflated
/// gauge up to time k.
struct NeighborhoodOptions {
  double inflate_scale = 3;
  double inflate_shift = 3;
};

inline bool combinatorial_neighborhood(const TreeBall& tree, const SpaceBall& space, const BallMetric& m,
                                       const CombinatorialRay& r, const CombinatorialRay& r2, int k,
                                       const MorseGauge& M, const NeighborhoodOptions& opts = {}) {
  if (tree.radius != space.radius || m.radius() != space.radius)
    throw Error(ErrorCode::ScaleMismatch, "tree, space and metric balls have different radii");
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  validate_ray(tree, r);
  validate_ray(tree, r2);
  if (r.kind == CombinatorialRay::Kind::InfinitePrefix) {
    if (r.length() < k) throw Error(ErrorCode::ScaleMismatch, "ray prefix shorter than k inside the ball");
    return r2.length() >= k && r2.edges[k - 1] == r.edges[k - 1];
  }
  int n = r.length();
  if (r2.length() < n) return false;
  for (int i = 0; i < n; ++i)
    if (r2.edges[i] != r.edges[i]) return false;
  auto a = realisation(tree, space, m, r);
  auto b = realisation(tree, space, m, r2);
  int sa = a.tail_start;
  int sb = n == 0 ? 0 : b.piece_start[n - 1];
  if (path_length(a.path) - sa < k || path_length(b.path) - sb < k)
    throw Error(ErrorCode::ScaleMismatch, "realisations shorter than k inside the ball");
  double delta = delta_M(M.inflated(opts.inflate_scale, opts.inflate_shift));
  for (int t = 0; t <= k; ++t) {
    int d = m.distance(a.path[sa + t], b.path[sb + t]);
    if (d < 0 || d >= delta - detail::kSlack) return false;
  }
  return true;
}

/// Random combinatorial ray of either kind; tails are freely reduced with a
/// cyclically reduced period so that they read geodesics in free factors.
inline CombinatorialRay random_ray(const TreeBall& tree, const SpaceBall& space, std::mt19937& rng) {
  CombinatorialRay r;
  bool finite = rng() % 2;
  r.kind = finite ? CombinatorialRay::Kind::Finite : CombinatorialRay::Kind::InfinitePrefix;
  int cap = std::max(0, tree.depth - (finite ? 1 : 0));
  int want = finite ? static_cast<int>(rng() % (cap + 1)) : 1 + static_cast<int>(rng() % std::max(1, cap));
  int at = tree.root;
  while (r.length() < want) {
    std::vector<EdgeId> out;
    for (EdgeId e : tree.graph.out_edges(at))
      if (tree.outgoing[e]) out.push_back(e);
    if (out.empty()) break;
    EdgeId e = out[rng() % out.size()];
    r.edges.push_back(e);
    at = tree.graph.target(e);
  }
  if (!finite && r.edges.empty()) r.kind = CombinatorialRay::Kind::Finite;
  if (r.kind == CombinatorialRay::Kind::Finite) {
    VertexId v = tree.gamma_vertex[at];
    int gens = static_cast<int>(space.generating_sets[v].size());
    auto letter = [&] { return static_cast<Letter>(1 + rng() % gens) * (rng() % 2 ? 1 : -1); };
    TailSpec t;
    do {
      t.period.clear();
      int len = 1 + static_cast<int>(rng() % 2);
      for (int i = 0; i < len; ++i) t.period.push_back(letter());
    } while (free_reduce(t.period) != t.period || (t.period.size() > 1 && t.period.front() == -t.period.back()));
    int plen = static_cast<int>(rng() % 3);
    for (int i = 0; i < plen; ++i) t.prefix.push_back(letter());
    t.prefix = free_reduce(t.prefix);
    while (!t.prefix.empty() && t.prefix.back() == -t.period.front()) t.prefix.pop_back();
    r.tail = t;
  }
  return r;
}

}  // namespace morse_atlas
