#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "group.hpp"
#include "smith.hpp"
#include "word.hpp"

namespace morse_atlas {

/// Finite connected graph with a group on every vertex and edge pair. For a
/// half-edge e, injection[e] lists the images in G_{target(e)} of the edge
/// group generators, and host[e] is the vertex group at target(e) before any
/// collapse (facts about the edge group are looked up against it).
class GraphOfGroups {
 public:
  Graph graph;
  std::vector<GroupDescriptor> vertex_group;
  std::vector<std::string> vertex_name;
  std::vector<GroupDescriptor> edge_group;  // per edge pair
  std::vector<std::vector<Word>> injection;  // per half-edge
  std::vector<GroupDescriptor> host;         // per half-edge

  VertexId add_vertex(GroupDescriptor g, std::string name = {}) {
    VertexId v = graph.add_vertex();
    if (name.empty()) name = "v" + std::to_string(v);
    vertex_group.push_back(std::move(g));
    vertex_name.push_back(std::move(name));
    return v;
  }

  /// Edge s -> t. `into_source` and `into_target` give the generator images
  /// in G_s and G_t. Returns the half-edge from s to t.
  EdgeId add_edge(VertexId s, VertexId t, GroupDescriptor h, std::vector<Word> into_source,
                  std::vector<Word> into_target) {
    EdgeId e = graph.add_edge(s, t);
    edge_group.push_back(std::move(h));
    injection.push_back(std::move(into_target));
    injection.push_back(std::move(into_source));
    host.push_back(vertex_group[t]);
    host.push_back(vertex_group[s]);
    return e;
  }

  /// Parses injection words against the vertex generator names; unknown names
  /// are added as generators of incomplete (symbolic) vertex groups.
  EdgeId add_edge_named(VertexId s, VertexId t, GroupDescriptor h,
                        const std::vector<std::string>& into_source,
                        const std::vector<std::string>& into_target) {
    auto parse_all = [&](VertexId v, const std::vector<std::string>& words) {
      std::vector<Word> out;
      auto& g = vertex_group[v];
      for (const auto& w : words) out.push_back(parse_word(w, g.generators, !g.complete));
      return out;
    };
    auto src = parse_all(s, into_source);
    auto tgt = parse_all(t, into_target);
    return add_edge(s, t, std::move(h), std::move(src), std::move(tgt));
  }

  int vertex_count() const { return graph.vertex_count(); }
  int pair_count() const { return graph.pair_count(); }

  const GroupDescriptor& edge_group_of(EdgeId e) const { return edge_group[Graph::pair_of(e)]; }

  bool edge_trivial(EdgeId e) const { return edge_group_of(e).generator_count() == 0; }

  bool all_edges_trivial() const {
    for (int p = 0; p < pair_count(); ++p)
      if (edge_group[p].generator_count() != 0) return false;
    return true;
  }

  void validate() const {
    if (vertex_count() == 0) throw Error(ErrorCode::InvalidInput, "graph of groups has no vertices");
    if (!graph.connected()) throw Error(ErrorCode::DisconnectedGraph, "underlying graph is not connected");
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      const auto& h = edge_group_of(e);
      const auto& g = vertex_group[graph.target(e)];
      if (static_cast<int>(injection[e].size()) != h.generator_count())
        throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(e) + ": injection has " +
                                                 std::to_string(injection[e].size()) + " images for " +
                                                 std::to_string(h.generator_count()) + " generators");
      for (const Word& w : injection[e])
        for (Letter x : w)
          if (gen_index(x) >= g.generator_count())
            throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(e) + ": image uses unknown generator");
      check_relators_map(e);
    }
  }

  /// Image of an edge-group word under injection[e].
  Word map_word(EdgeId e, const Word& w) const {
    Word out;
    for (Letter x : w) {
      const Word& img = injection[e][gen_index(x)];
      out = concat(out, x > 0 ? img : inverse(img));
    }
    return out;
  }

 private:
  // Relators of the edge group must map to the identity where the target has
  // a usable normal form.
  void check_relators_map(EdgeId e) const {
    const auto& h = edge_group_of(e);
    if (h.relators.empty()) return;
    const auto& g = vertex_group[graph.target(e)];
    std::shared_ptr<const GroupModel> model;
    try {
      model = make_model(g);
    } catch (const Error&) {
      return;
    }
    for (const Word& r : h.relators)
      if (!model->normal_form(map_word(e, r)).empty())
        throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(e) +
                                                 ": injection is not a homomorphism (relator " +
                                                 format_word(r, h.generators) + ")");
  }
};

/// Generator layout of the fundamental group presentation.
struct PresentationLayout {
  std::vector<int> vertex_offset;  // first generator index of each vertex group
  std::vector<int> stable_letter;  // per edge pair; -1 for spanning-tree pairs
  std::vector<EdgeId> tree;        // the spanning tree used
};

struct FundamentalPresentation {
  GroupDescriptor presentation;
  PresentationLayout layout;
};

/// Presentation of pi_1 relative to the spanning tree `st` (one half-edge per
/// tree pair). Relators: vertex relators, then per edge pair and edge-group
/// generator h the word f_{rev}(h) t f(h)^-1 t^-1 with t omitted on the tree.
inline FundamentalPresentation fundamental_presentation(const GraphOfGroups& gog,
                                                        const std::vector<EdgeId>& st) {
  const Graph& g = gog.graph;
  if (!is_spanning_tree(g, st)) throw Error(ErrorCode::InvalidSpanningTree, "edges do not form a spanning tree");
  FundamentalPresentation out;
  auto& layout = out.layout;
  layout.tree = st;
  std::vector<std::string> names;
  std::vector<Word> relators;
  bool complete = true;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& G = gog.vertex_group[v];
    layout.vertex_offset.push_back(static_cast<int>(names.size()));
    for (const auto& n : G.generators) names.push_back(gog.vertex_name[v] + "." + n);
    complete = complete && G.complete;
  }
  auto in_tree = pair_mask(g, st);
  layout.stable_letter.assign(g.pair_count(), -1);
  for (int p = 0; p < g.pair_count(); ++p) {
    if (in_tree[p]) continue;
    layout.stable_letter[p] = static_cast<int>(names.size());
    names.push_back("t" + std::to_string(p));
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (const Word& r : gog.vertex_group[v].relators)
      relators.push_back(shift(r, layout.vertex_offset[v]));
  for (int p = 0; p < g.pair_count(); ++p) {
    EdgeId a = 2 * p;  // from source(a) to target(a)
    const auto& H = gog.edge_group[p];
    int off_src = layout.vertex_offset[g.source(a)];
    int off_tgt = layout.vertex_offset[g.target(a)];
    for (int j = 0; j < H.generator_count(); ++j) {
      Word lhs = shift(gog.injection[a ^ 1][j], off_src);
      Word rhs = shift(gog.injection[a][j], off_tgt);
      Word rel = lhs;
      Letter t = layout.stable_letter[p] + 1;
      if (layout.stable_letter[p] >= 0) rel.push_back(t);
      rel = concat(rel, inverse(rhs));
      if (layout.stable_letter[p] >= 0) rel.push_back(-t);
      relators.push_back(rel);
    }
  }
  out.presentation = GroupDescriptor::presentation(std::move(names), std::move(relators), complete);
  return out;
}

inline FundamentalPresentation fundamental_presentation(const GraphOfGroups& gog) {
  return fundamental_presentation(gog, spanning_tree(gog.graph));
}

inline AbelianInvariants abelianization(const GroupDescriptor& d) {
  return abelianization(d.generator_count(), d.relators);
}

/// Restriction of gog to the induced subgraph on U (vertices renumbered in
/// increasing order).
inline GraphOfGroups restrict_to(const GraphOfGroups& gog, const std::vector<VertexId>& U) {
  auto sub = induced_subgraph(gog.graph, U);
  GraphOfGroups out;
  for (VertexId v : sub.parent_vertex) out.add_vertex(gog.vertex_group[v], gog.vertex_name[v]);
  for (EdgeId e = 0; e < sub.graph.edge_count(); e += 2) {
    EdgeId pe = sub.parent_edge[e];
    out.add_edge(sub.graph.source(e), sub.graph.target(e), gog.edge_group_of(pe), gog.injection[pe ^ 1],
                 gog.injection[pe]);
    out.host[e] = gog.host[pe];
    out.host[e + 1] = gog.host[pe ^ 1];
  }
  return out;
}

/// Free product descriptor for a collapsed set whose internal edges are all
/// trivial: the vertex groups, then one Z per off-tree pair. Its generator
/// layout coincides with the fundamental presentation of the restriction.
inline std::optional<GroupDescriptor> recognize_free_product(const GraphOfGroups& restricted) {
  if (!restricted.all_edges_trivial()) return std::nullopt;
  std::vector<GroupDescriptor> factors = restricted.vertex_group;
  int loops = restricted.pair_count() - (restricted.vertex_count() - 1);
  for (int i = 0; i < loops; ++i) factors.push_back(GroupDescriptor::integers());
  if (factors.size() == 1) return factors[0];
  return GroupDescriptor::free_product(std::move(factors));
}

struct CollapseOptions {
  // Replace the fresh presentation by a FreeProduct descriptor when possible.
  bool recognize_free_products = false;
};

/// Contracts each set in `sets` to one vertex. Sets must be disjoint and
/// connected. The new vertex for a set takes the position of its least
/// member; other vertices keep their relative order.
inline GraphOfGroups collapse_many(const GraphOfGroups& gog, const std::vector<std::vector<VertexId>>& sets,
                                   const CollapseOptions& opts = {}) {
  const Graph& g = gog.graph;
  std::vector<int> owner(g.vertex_count(), -1);
  for (size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) throw Error(ErrorCode::NotConnected, "empty vertex set");
    for (VertexId v : sets[i]) {
      g.check_vertex(v);
      if (owner[v] >= 0 && owner[v] != static_cast<int>(i))
        throw Error(ErrorCode::OverlappingSets, "vertex " + std::to_string(v) + " in two sets");
      owner[v] = static_cast<int>(i);
    }
    if (!is_connected_set(g, sets[i]))
      throw Error(ErrorCode::NotConnected, "vertex set " + std::to_string(i) + " is not connected");
  }

  // Per set: the collapsed group and generator offsets of members. A set with
  // no internal edges keeps its vertex group.
  struct Collapsed {
    std::vector<VertexId> members;
    GroupDescriptor group;
    std::map<VertexId, int> offset;
  };
  std::vector<Collapsed> collapsed(sets.size());
  for (size_t i = 0; i < sets.size(); ++i) {
    auto& c = collapsed[i];
    c.members = sets[i];
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
    auto restricted = restrict_to(gog, c.members);
    if (restricted.pair_count() == 0) {
      c.group = gog.vertex_group[c.members[0]];
      c.offset[c.members[0]] = 0;
      continue;
    }
    auto fp = fundamental_presentation(restricted);
    c.group = fp.presentation;
    if (opts.recognize_free_products)
      if (auto fpd = recognize_free_product(restricted)) c.group = *fpd;
    for (size_t k = 0; k < c.members.size(); ++k) c.offset[c.members[k]] = fp.layout.vertex_offset[k];
  }

  GraphOfGroups out;
  std::vector<VertexId> new_id(g.vertex_count(), -1);
  std::vector<VertexId> set_vertex(sets.size(), -1);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (owner[v] < 0) {
      new_id[v] = out.add_vertex(gog.vertex_group[v], gog.vertex_name[v]);
      continue;
    }
    int i = owner[v];
    if (set_vertex[i] < 0) {
      const auto& c = collapsed[i];
      std::string name;
      if (c.members.size() == 1) {
        name = gog.vertex_name[c.members[0]];
      } else {
        name = "[";
        for (size_t k = 0; k < c.members.size(); ++k) name += (k ? "," : "") + gog.vertex_name[c.members[k]];
        name += "]";
      }
      set_vertex[i] = out.add_vertex(c.group, name);
    }
    new_id[v] = set_vertex[i];
  }
  auto rewrite = [&](EdgeId e) {
    VertexId t = g.target(e);
    if (owner[t] < 0) return gog.injection[e];
    int off = collapsed[owner[t]].offset.at(t);
    std::vector<Word> img;
    for (const Word& w : gog.injection[e]) img.push_back(shift(w, off));
    return img;
  };
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    VertexId s = g.source(e), t = g.target(e);
    if (owner[s] >= 0 && owner[s] == owner[t]) continue;  // absorbed into a collapsed group
    EdgeId ne = out.add_edge(new_id[s], new_id[t], gog.edge_group_of(e), rewrite(e ^ 1), rewrite(e));
    out.host[ne] = gog.host[e];
    out.host[ne ^ 1] = gog.host[e ^ 1];
  }
  return out;
}

inline GraphOfGroups collapse(const GraphOfGroups& gog, const std::vector<VertexId>& Y,
                              const CollapseOptions& opts = {}) {
  return collapse_many(gog, {Y}, opts);
}

/// Vertex generating set used by the Bass-Serre space: declared generators,
/// then images of incident edge-group generators not already present (up to
/// inversion), deduplicated by normal form when one is available.
inline std::vector<Word> vertex_generating_set(const GraphOfGroups& gog, VertexId v,
                                               const GroupModel* model = nullptr) {
  std::vector<Word> gens;
  std::set<Word> seen;
  auto key = [&](const Word& w) { return model ? model->normal_form(w) : free_reduce(w); };
  auto add = [&](const Word& w) {
    Word k = key(w);
    if (k.empty()) return;
    if (seen.count(k) || seen.count(key(inverse(w)))) return;
    seen.insert(k);
    gens.push_back(w);
  };
  for (int i = 1; i <= gog.vertex_group[v].generator_count(); ++i) add({i});
  for (EdgeId e = 0; e < gog.graph.edge_count(); ++e)
    if (gog.graph.target(e) == v)
      for (const Word& w : gog.injection[e]) add(w);
  return gens;
}

}  // namespace morse_atlas
