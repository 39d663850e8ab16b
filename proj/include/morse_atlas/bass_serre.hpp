#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "graph_of_groups.hpp"
#include "group.hpp"
#include "word.hpp"

namespace morse_atlas {

/// Z^n modulo the sublattice spanned by `images`, with canonical coset
/// representatives from a column echelon form.
class LatticeCosets {
 public:
  LatticeCosets() = default;

  LatticeCosets(int n, const std::vector<std::vector<int64_t>>& images)
      : n_(n), m_(static_cast<int>(images.size())) {
    cols_ = images;
    transform_.assign(m_, std::vector<int64_t>(m_, 0));
    for (int i = 0; i < m_; ++i) transform_[i][i] = 1;
    int c = 0;
    for (int r = 0; r < n_ && c < m_; ++r) {
      while (true) {
        int best = -1;
        for (int j = c; j < m_; ++j)
          if (cols_[j][r] != 0 && (best < 0 || std::llabs(cols_[j][r]) < std::llabs(cols_[best][r]))) best = j;
        if (best < 0) break;
        swap_cols(c, best);
        bool clean = true;
        for (int j = c + 1; j < m_; ++j) {
          if (cols_[j][r] == 0) continue;
          add_col(j, c, -(cols_[j][r] / cols_[c][r]));
          if (cols_[j][r] != 0) clean = false;
        }
        if (clean) break;
      }
      if (c < m_ && cols_[c][r] != 0) {
        if (cols_[c][r] < 0) negate_col(c);
        pivot_row_.push_back(r);
        ++c;
      }
    }
    for (int j = c; j < m_; ++j)
      if (std::any_of(cols_[j].begin(), cols_[j].end(), [](int64_t x) { return x != 0; }))
        throw Error(ErrorCode::InvalidInput, "lattice reduction failed");
    if (c < m_) throw Error(ErrorCode::InvalidInput, "edge group images are not independent (injection not injective)");
  }

  /// Splits v = rep + sum_j x_j images[j]; rep is canonical for the coset.
  std::pair<std::vector<int64_t>, std::vector<int64_t>> split(std::vector<int64_t> v) const {
    std::vector<int64_t> y(m_, 0);
    for (int c = 0; c < m_; ++c) {
      int r = pivot_row_[c];
      int64_t p = cols_[c][r];
      int64_t q = v[r] / p;
      if (v[r] % p != 0 && v[r] < 0) --q;
      if (q == 0) continue;
      for (int i = 0; i < n_; ++i) v[i] -= q * cols_[c][i];
      y[c] = q;
    }
    std::vector<int64_t> x(m_, 0);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) x[i] += transform_[i][j] * y[j];
    return {v, x};
  }

 private:
  void swap_cols(int a, int b) {
    std::swap(cols_[a], cols_[b]);
    for (auto& row : transform_) std::swap(row[a], row[b]);
  }
  void add_col(int dst, int src, int64_t q) {
    for (int i = 0; i < n_; ++i) cols_[dst][i] += q * cols_[src][i];
    for (auto& row : transform_) row[dst] += q * row[src];
  }
  void negate_col(int c) {
    for (auto& x : cols_[c]) x = -x;
    for (auto& row : transform_) row[c] = -row[c];
  }

  int n_ = 0, m_ = 0;
  std::vector<std::vector<int64_t>> cols_;
  std::vector<std::vector<int64_t>> transform_;  // original coefficients = transform * echelon coefficients
  std::vector<int> pivot_row_;
};

/// Node of the normal-form trie: the coset c_0 e_1 c_1 ... c_{k-1} e_k G_v.
struct CosetNode {
  int parent = -1;
  EdgeId edge = -1;      // Γ half-edge e_k
  Word rep;              // c_{k-1} in G_{source(edge)}
  VertexId vertex = 0;   // Γ vertex v = target(edge), 0 at the root
  int length = 0;        // k
};

/// Reduced words in the fundamental groupoid based at vertex 0. A point
/// (node, h) stands for the Bass-Serre space vertex (g, v) with g the product
/// of the node's letters and h.
class GroupoidNormalForm {
 public:
  explicit GroupoidNormalForm(const GraphOfGroups& gog) : gog_(&gog) {
    gog.validate();
    const Graph& g = gog.graph;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      try {
        models_.push_back(make_model(gog.vertex_group[v]));
      } catch (const Error& e) {
        throw Error(ErrorCode::WordProblemUnavailable,
                    "vertex " + gog.vertex_name[v] + ": " + std::string(e.what()));
      }
      gens_.push_back(vertex_generating_set(gog, v, models_.back().get()));
    }
    lattice_.resize(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (gog.edge_trivial(e)) continue;
      auto* ab = dynamic_cast<const AbelianModel*>(models_[g.target(e)].get());
      bool free_abelian = ab && std::all_of(ab->orders().begin(), ab->orders().end(),
                                            [](int64_t o) { return o == 0; });
      if (!free_abelian)
        throw Error(ErrorCode::WordProblemUnavailable,
                    "nontrivial edge group into " + gog.vertex_name[g.target(e)] +
                        ": coset normal forms need a free abelian vertex group");
      std::vector<std::vector<int64_t>> images;
      for (const Word& w : gog.injection[e]) images.push_back(ab->exponents(w));
      lattice_[e] = std::make_shared<LatticeCosets>(ab->generator_count(), images);
    }
    nodes_.push_back(CosetNode{});
    offsets_ = fundamental_presentation(gog).layout;
  }

  const GraphOfGroups& gog() const { return *gog_; }
  const GroupModel& model(VertexId v) const { return *models_[v]; }
  const std::vector<Word>& generating_set(VertexId v) const { return gens_[v]; }
  const CosetNode& node(int id) const { return nodes_[id]; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const PresentationLayout& layout() const { return offsets_; }

  Word multiply(VertexId v, const Word& h, const Word& s) const { return models_[v]->normal_form(concat(h, s)); }

  /// Crossing Γ half-edge `a` (source must be the node's vertex). Returns the
  /// new (node, h); `create` = false returns node -1 when the node is new.
  std::pair<int, Word> cross(int node, const Word& h, EdgeId a, bool create) {
    const Graph& g = gog_->graph;
    VertexId v = nodes_[node].vertex;
    if (g.source(a) != v) throw Error(ErrorCode::InvalidInput, "edge does not start at the current vertex");
    Word c;
    std::vector<int64_t> x;
    EdgeId back = Graph::reverse(a);
    if (lattice_[back]) {
      auto* ab = static_cast<const AbelianModel*>(models_[v].get());
      auto [rep, coeff] = lattice_[back]->split(ab->exponents(h));
      c = ab->word_of(rep);
      x = std::move(coeff);
    } else {
      c = h;
    }
    VertexId w = g.target(a);
    Word image;
    for (size_t j = 0; j < x.size(); ++j) image = concat(image, power(gog_->injection[a][j], static_cast<int>(x[j])));
    const CosetNode& cur = nodes_[node];
    if (c.empty() && cur.parent >= 0 && cur.edge == back) {
      Word nh = models_[w]->normal_form(concat(cur.rep, image));
      return {cur.parent, nh};
    }
    auto key = std::make_tuple(node, a, c);
    auto it = index_.find(key);
    int id;
    if (it != index_.end()) {
      id = it->second;
    } else if (!create) {
      id = -1;
    } else {
      id = static_cast<int>(nodes_.size());
      nodes_.push_back(CosetNode{node, a, c, w, cur.length + 1});
      index_.emplace(key, id);
    }
    return {id, models_[w]->normal_form(image)};
  }

  /// Element of pi_1 (letters of the fundamental presentation) for (node, h).
  Word underlying(int node, const Word& h) const {
    std::vector<int> chain;
    for (int n = node; n > 0; n = nodes_[n].parent) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    const Graph& g = gog_->graph;
    Word out;
    for (int n : chain) {
      const CosetNode& cn = nodes_[n];
      out = concat(out, shift(cn.rep, offsets_.vertex_offset[g.source(cn.edge)]));
      int t = offsets_.stable_letter[Graph::pair_of(cn.edge)];
      if (t >= 0) out.push_back(cn.edge % 2 == 0 ? t + 1 : -(t + 1));
    }
    out = concat(out, shift(h, offsets_.vertex_offset[nodes_[node].vertex]));
    return free_reduce(out);
  }

 private:
  const GraphOfGroups* gog_;
  std::vector<std::shared_ptr<const GroupModel>> models_;
  std::vector<std::vector<Word>> gens_;
  std::vector<std::shared_ptr<LatticeCosets>> lattice_;  // per half-edge, in G_target
  std::vector<CosetNode> nodes_;
  std::map<std::tuple<int, EdgeId, Word>, int> index_;
  PresentationLayout offsets_;
};

/// Radius-R ball around (1, 0) in the Bass-Serre space. Generator edges carry
/// letter +(i+1) for the i-th element of S_v; crossing edges carry the Γ
/// half-edge in `edge_gamma` (and letter 0).
struct SpaceBall {
  Graph graph;
  std::vector<Word> underlying_element;
  std::vector<VertexId> gamma_vertex;
  std::vector<int> tree_label;
  std::vector<Word> local_element;  // h, relative to the coset's normal-form prefix
  std::vector<int> depth;
  std::vector<Letter> edge_letter;
  std::vector<EdgeId> edge_gamma;  // -1 for generator edges
  std::vector<CosetNode> cosets;   // indexed by tree label
  std::vector<std::vector<Word>> generating_sets;
  std::vector<std::string> generator_names;  // letters of the fundamental presentation
  std::vector<std::string> vertex_names;
  int basepoint = 0;
  int radius = 0;

  int vertex_count() const { return graph.vertex_count(); }

  int find(int label, const Word& h) const {
    auto it = index.find({label, h});
    return it == index.end() ? -1 : it->second;
  }

  // Order for tie-breaking: shortlex on the underlying element, then Γ vertex.
  bool vertex_less(int a, int b) const {
    if (underlying_element[a] != underlying_element[b])
      return shortlex_less(underlying_element[a], underlying_element[b]);
    return gamma_vertex[a] < gamma_vertex[b];
  }

  std::string vertex_string(int x) const {
    return "(" + format_word(underlying_element[x], generator_names) + ", " + vertex_names[gamma_vertex[x]] + ")";
  }

  std::map<std::pair<int, Word>, int> index;
};

/// Breadth-first ball; generators before crossings, S_v in order, each letter
/// before its inverse, crossings in the vertex's out-edge order.
inline SpaceBall bass_serre_ball(const GraphOfGroups& gog, int radius, const BallLimits& limits = {}) {
  if (radius < 0) throw Error(ErrorCode::InvalidInput, "negative radius");
  if (radius > limits.max_radius)
    throw Error(ErrorCode::BallTooLarge,
                "radius " + std::to_string(radius) + " exceeds cap " + std::to_string(limits.max_radius));
  GroupoidNormalForm nf(gog);
  const Graph& g = gog.graph;
  SpaceBall ball;
  ball.radius = radius;
  std::vector<int> node_of;
  std::deque<int> queue;
  auto visit = [&](int node, Word h, int d) {
    auto [it, fresh] = ball.index.emplace(std::make_pair(node, h), ball.vertex_count());
    if (!fresh) return;
    if (static_cast<size_t>(ball.vertex_count()) >= limits.max_cells)
      throw Error(ErrorCode::BallTooLarge, "more than " + std::to_string(limits.max_cells) + " cells");
    ball.graph.add_vertex();
    ball.gamma_vertex.push_back(nf.node(node).vertex);
    ball.tree_label.push_back(node);
    ball.local_element.push_back(std::move(h));
    ball.depth.push_back(d);
    queue.push_back(it->second);
  };
  visit(0, {}, 0);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    if (ball.depth[x] == radius) continue;
    int node = ball.tree_label[x];
    VertexId v = ball.gamma_vertex[x];
    for (const Word& s : nf.generating_set(v)) {
      Word hx = ball.local_element[x];
      visit(node, nf.multiply(v, hx, s), ball.depth[x] + 1);
      visit(node, nf.multiply(v, hx, inverse(s)), ball.depth[x] + 1);
    }
    for (EdgeId a : g.out_edges(v)) {
      auto [n2, h2] = nf.cross(node, ball.local_element[x], a, true);
      visit(n2, std::move(h2), ball.depth[x] + 1);
    }
  }
  for (int x = 0; x < ball.vertex_count(); ++x) {
    int node = ball.tree_label[x];
    VertexId v = ball.gamma_vertex[x];
    const auto& gens = nf.generating_set(v);
    for (size_t i = 0; i < gens.size(); ++i) {
      int y = ball.find(node, nf.multiply(v, ball.local_element[x], gens[i]));
      if (y < 0) continue;
      ball.graph.add_edge(x, y);
      ball.edge_letter.push_back(static_cast<Letter>(i) + 1);
      ball.edge_letter.push_back(-static_cast<Letter>(i) - 1);
      ball.edge_gamma.push_back(-1);
      ball.edge_gamma.push_back(-1);
    }
    for (EdgeId a : g.out_edges(v)) {
      if (a % 2 != 0) continue;
      auto [n2, h2] = nf.cross(node, ball.local_element[x], a, false);
      if (n2 < 0) continue;
      int y = ball.find(n2, h2);
      if (y < 0) continue;
      ball.graph.add_edge(x, y);
      ball.edge_letter.push_back(0);
      ball.edge_letter.push_back(0);
      ball.edge_gamma.push_back(a);
      ball.edge_gamma.push_back(a ^ 1);
    }
  }
  for (int x = 0; x < ball.vertex_count(); ++x)
    ball.underlying_element.push_back(nf.underlying(ball.tree_label[x], ball.local_element[x]));
  for (int i = 0; i < nf.node_count(); ++i) ball.cosets.push_back(nf.node(i));
  for (VertexId v = 0; v < g.vertex_count(); ++v) ball.generating_sets.push_back(nf.generating_set(v));
  ball.generator_names = fundamental_presentation(gog).presentation.generators;
  ball.vertex_names = gog.vertex_name;
  return ball;
}

/// Quotient of a space ball by tree label. Half-edge 2k of `graph` is the
/// outgoing orientation of its pair.
struct TreeBall {
  Graph graph;
  int root = 0;
  std::vector<char> outgoing;          // per half-edge
  std::vector<EdgeId> gamma_edge;      // per half-edge
  std::vector<VertexId> gamma_vertex;  // per tree vertex
  std::vector<int> distance;           // d_T(root, .)
  std::vector<int> edge_star;          // per half-edge: alpha* in the space ball
  std::vector<int> vertex_star;        // per tree vertex: v*
  std::vector<EdgeId> incoming;        // per tree vertex: outgoing edge ending there, -1 at root
  int depth = 0;
  int radius = 0;

  int vertex_count() const { return graph.vertex_count(); }

  /// Outgoing edges from the root to v, in order.
  std::vector<EdgeId> root_path(int v) const {
    std::vector<EdgeId> path;
    for (; incoming[v] >= 0; v = graph.source(incoming[v])) path.push_back(incoming[v]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// True iff v lies in T_e for the outgoing edge e.
  bool in_subtree(EdgeId e, int v) const {
    int top = graph.target(e);
    while (distance[v] > distance[top]) v = graph.source(incoming[v]);
    return v == top;
  }
};

inline TreeBall project_tree(const SpaceBall& ball) {
  int L = static_cast<int>(ball.cosets.size());
  for (int label : ball.tree_label)
    if (label < 0 || label >= L) throw Error(ErrorCode::MalformedBall, "tree label out of range");
  // quotient edges, deduplicated by label pair
  std::map<std::pair<int, int>, std::vector<EdgeId>> crossing;
  for (EdgeId e = 0; e < ball.graph.edge_count(); ++e) {
    if (ball.edge_gamma[e] < 0) {
      if (ball.tree_label[ball.graph.source(e)] != ball.tree_label[ball.graph.target(e)])
        throw Error(ErrorCode::MalformedBall, "generator edge changes coset");
      continue;
    }
    int a = ball.tree_label[ball.graph.source(e)], b = ball.tree_label[ball.graph.target(e)];
    if (a == b) throw Error(ErrorCode::MalformedBall, "crossing edge stays in one coset");
    crossing[{a, b}].push_back(e);
  }
  std::vector<std::vector<int>> adj(L);
  for (const auto& [key, edges] : crossing)
    if (key.first < key.second) {
      adj[key.first].push_back(key.second);
      adj[key.second].push_back(key.first);
    }
  TreeBall tree;
  tree.radius = ball.radius;
  tree.root = ball.tree_label[ball.basepoint];
  tree.distance.assign(L, -1);
  std::deque<int> queue{tree.root};
  tree.distance[tree.root] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : adj[v])
      if (tree.distance[w] < 0) {
        tree.distance[w] = tree.distance[v] + 1;
        queue.push_back(w);
      }
  }
  int pairs = 0;
  for (const auto& row : adj) pairs += static_cast<int>(row.size());
  pairs /= 2;
  if (std::any_of(tree.distance.begin(), tree.distance.end(), [](int d) { return d < 0; }))
    throw Error(ErrorCode::MalformedBall, "tree quotient is disconnected");
  if (pairs != L - 1) throw Error(ErrorCode::MalformedBall, "tree quotient has a cycle");

  tree.graph = Graph(L);
  tree.gamma_vertex.resize(L);
  for (int i = 0; i < L; ++i) tree.gamma_vertex[i] = ball.cosets[i].vertex;
  tree.incoming.assign(L, -1);
  tree.vertex_star.assign(L, -1);
  tree.vertex_star[tree.root] = ball.basepoint;
  for (int v = 0; v < L; ++v) tree.depth = std::max(tree.depth, tree.distance[v]);
  // add edges in order of their far endpoint so ids follow the BFS layers
  std::vector<int> order(L);
  for (int i = 0; i < L; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tree.distance[a] < tree.distance[b]; });
  for (int b : order) {
    if (b == tree.root) continue;
    int a = -1;
    for (int w : adj[b])
      if (tree.distance[w] == tree.distance[b] - 1) a = w;
    EdgeId te = tree.graph.add_edge(a, b);
    tree.incoming[b] = te;
    const auto& xs = crossing.at({a, b});
    // alpha*: closest endpoint on the far side, ties by shortlex
    int best = -1, across = -1;
    for (EdgeId xe : xs) {
      int y = ball.graph.target(xe);
      if (best < 0 || ball.depth[y] < ball.depth[best] ||
          (ball.depth[y] == ball.depth[best] && ball.vertex_less(y, best))) {
        best = y;
        across = ball.graph.source(xe);
      }
    }
    tree.outgoing.push_back(1);
    tree.outgoing.push_back(0);
    tree.gamma_edge.push_back(ball.edge_gamma[xs.front()]);
    tree.gamma_edge.push_back(Graph::reverse(ball.edge_gamma[xs.front()]));
    tree.edge_star.push_back(best);
    tree.edge_star.push_back(across);
    tree.vertex_star[b] = best;
  }
  return tree;
}

/// Result of comparing one coset fiber with a Cayley ball of its vertex group.
struct FiberCheck {
  int label = 0;
  VertexId gamma_vertex = 0;
  int entry = 0;          // space-ball vertex of least depth (shortlex ties)
  int vertex_count = 0;
  bool embedded = false;  // translation is an injective label-preserving graph map
  bool exact_ball = false;  // and its image is the Cayley ball of radius R - depth(entry)
};

/// Translates each fiber by the inverse of its entry point and compares it
/// with the Cayley ball of G_v for the generating set S_v.
inline std::vector<FiberCheck> check_fibers(const GraphOfGroups& gog, const SpaceBall& ball) {
  std::vector<std::shared_ptr<const GroupModel>> models;
  for (const auto& d : gog.vertex_group) models.push_back(make_model(d));
  std::map<int, std::vector<int>> members;
  for (int x = 0; x < ball.vertex_count(); ++x) members[ball.tree_label[x]].push_back(x);
  std::map<std::pair<VertexId, int>, CayleyBall> cache;
  std::vector<FiberCheck> out;
  for (const auto& [label, xs] : members) {
    FiberCheck fc;
    fc.label = label;
    fc.gamma_vertex = ball.cosets[label].vertex;
    fc.vertex_count = static_cast<int>(xs.size());
    int entry = xs.front();
    for (int x : xs)
      if (ball.depth[x] < ball.depth[entry] || (ball.depth[x] == ball.depth[entry] && ball.vertex_less(x, entry)))
        entry = x;
    fc.entry = entry;
    const GroupModel& model = *models[fc.gamma_vertex];
    int r = ball.radius - ball.depth[entry];
    auto key = std::make_pair(fc.gamma_vertex, r);
    if (!cache.count(key))
      cache.emplace(key, cayley_ball(model, ball.generating_sets[fc.gamma_vertex], r));
    const CayleyBall& cb = cache.at(key);
    Word shift_back = inverse(ball.local_element[entry]);
    std::map<int, int> image;  // space vertex -> Cayley-ball vertex or -1
    std::set<Word> seen;
    bool injective = true;
    for (int x : xs) {
      Word k = model.normal_form(concat(shift_back, ball.local_element[x]));
      if (!seen.insert(k).second) injective = false;
      image[x] = cb.find(k);
    }
    bool maps_edges = injective;
    int fiber_edges = 0;
    for (int x : xs)
      for (EdgeId e : ball.graph.out_edges(x)) {
        if (ball.edge_gamma[e] >= 0 || e % 2 != 0) continue;
        ++fiber_edges;
        Word kx = model.normal_form(concat(shift_back, ball.local_element[x]));
        Word s = ball.generating_sets[fc.gamma_vertex][gen_index(ball.edge_letter[e])];
        Word expect = model.normal_form(concat(kx, s));
        Word got = model.normal_form(concat(shift_back, ball.local_element[ball.graph.target(e)]));
        if (expect != got) maps_edges = false;
      }
    fc.embedded = maps_edges;
    bool all_in = std::all_of(xs.begin(), xs.end(), [&](int x) { return image[x] >= 0; });
    fc.exact_ball = fc.embedded && all_in && static_cast<int>(xs.size()) == cb.graph.vertex_count() &&
                    fiber_edges == cb.graph.pair_count();
    out.push_back(fc);
  }
  return out;
}

inline const std::vector<std::string>& fiber_palette() {
  static const std::vector<std::string> colors = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors;
}

/// DOT for a space ball; vertices colored by tree label.
inline std::string to_dot(const SpaceBall& ball) {
  std::ostringstream os;
  const auto& colors = fiber_palette();
  os << "graph X {\n  node [style=filled, fontcolor=white];\n";
  for (int x = 0; x < ball.vertex_count(); ++x)
    os << "  " << x << " [label=\"" << dot_escape(ball.vertex_string(x)) << "\", fillcolor=\""
       << colors[ball.tree_label[x] % colors.size()] << "\"" << (x == ball.basepoint ? ", shape=doublecircle" : "")
       << "];\n";
  for (EdgeId e = 0; e < ball.graph.edge_count(); e += 2) {
    os << "  " << ball.graph.source(e) << " -- " << ball.graph.target(e);
    if (ball.edge_gamma[e] >= 0)
      os << " [style=bold, label=\"e" << Graph::pair_of(ball.edge_gamma[e]) << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

/// DOT for a tree ball; each vertex labelled by its star point and colored
/// like its fiber in the space ball.
inline std::string to_dot(const TreeBall& tree, const SpaceBall& ball) {
  std::ostringstream os;
  const auto& colors = fiber_palette();
  os << "digraph T {\n  node [style=filled, fontcolor=white];\n";
  for (int v = 0; v < tree.vertex_count(); ++v)
    os << "  " << v << " [label=\"" << dot_escape(ball.vertex_string(tree.vertex_star[v])) << "\", fillcolor=\""
       << colors[v % colors.size()] << "\"" << (v == tree.root ? ", shape=doublecircle" : "") << "];\n";
  for (EdgeId e = 0; e < tree.graph.edge_count(); e += 2)
    os << "  " << tree.graph.source(e) << " -> " << tree.graph.target(e) << " [label=\"e"
       << Graph::pair_of(tree.gamma_edge[e]) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace morse_atlas
