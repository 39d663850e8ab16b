#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bass_serre.hpp"
#include "error.hpp"
#include "gauge.hpp"
#include "graph_of_groups.hpp"
#include "io.hpp"
#include "kb.hpp"

namespace morse_atlas {

// ------------------------------------------------------------ star checks

struct EdgeCheck {
  EdgeId edge = 0;  // even half-edge of the pair
  std::string group;
  Truth undistorted = Truth::Unknown;  // True = declared in the KB
  bool wide = false;
  Truth infinite_index = Truth::Unknown;
  bool peripheral_at_center = false;  // may serve as a peripheral subgroup of the center

  bool passes() const { return undistorted == Truth::True && wide && infinite_index == Truth::True; }
};

struct StarReport {
  bool star_shape = false;
  VertexId center = -1;
  std::vector<EdgeCheck> edges;
  bool morseless_star = false;
  bool relatively_hyperbolic = false;  // center hyperbolic relative to its edge groups
  std::vector<std::string> failures;

  Json to_json() const {
    Json es = Json::array();
    for (const auto& e : edges)
      es.push_back({{"edge", e.edge / 2},
                    {"group", e.group},
                    {"undistorted", e.undistorted == Truth::True ? "declared" : std::string(truth_name(e.undistorted))},
                    {"wide", e.wide},
                    {"infinite_index", std::string(truth_name(e.infinite_index))},
                    {"peripheral_at_center", e.peripheral_at_center}});
    return {{"star_shape", star_shape},       {"center", center},
            {"edges", es},                    {"morseless_star", morseless_star},
            {"relatively_hyperbolic", relatively_hyperbolic}, {"failures", failures}};
  }
};

namespace detail {

inline Truth both(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}

// Wide in the KB sense, or finite (asymptotic cones are points).
inline bool wide_or_finite(const KnowledgeBase& kb, const GroupDescriptor& h) {
  auto p = kb.properties_of(h);
  return p.is_wide == Truth::True || p.is_infinite == Truth::False;
}

inline std::string edge_text(const GraphOfGroups& gog, EdgeId e) {
  return "edge " + std::to_string(e / 2) + " (" + gog.vertex_name[gog.graph.source(e)] + "--" +
         gog.vertex_name[gog.graph.target(e)] + ")";
}

}  // namespace detail

inline EdgeCheck check_edge(const GraphOfGroups& gog, EdgeId e, VertexId center,
                            const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  e &= ~1;
  const auto& h = gog.edge_group_of(e);
  EdgeCheck c;
  c.edge = e;
  c.group = h.to_string();
  c.undistorted = detail::both(kb.undistorted(h, gog.host[e]), kb.undistorted(h, gog.host[e ^ 1]));
  c.wide = detail::wide_or_finite(kb, h);
  c.infinite_index = detail::both(kb.infinite_index(h, gog.host[e]), kb.infinite_index(h, gog.host[e ^ 1]));
  c.peripheral_at_center = true;
  for (EdgeId a : {e, e ^ 1})
    if (gog.graph.target(a) == center) c.peripheral_at_center = c.peripheral_at_center && kb.peripheral_kind(gog.host[a], h);
  return c;
}

/// Star shape (every edge meets the center), per-edge checks, and whether the
/// center is hyperbolic relative to its edge groups. With center < 0 the
/// least vertex meeting every edge is used.
inline StarReport validate_morseless_star(const GraphOfGroups& gog, VertexId center = -1,
                                          const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  const Graph& g = gog.graph;
  StarReport r;
  auto meets_all = [&](VertexId v) {
    for (EdgeId e = 0; e < g.edge_count(); e += 2)
      if (g.source(e) != v && g.target(e) != v) return false;
    return true;
  };
  if (center >= 0) {
    g.check_vertex(center);
    r.star_shape = meets_all(center);
  } else {
    for (VertexId v = 0; v < g.vertex_count() && center < 0; ++v)
      if (meets_all(v)) center = v;
    r.star_shape = center >= 0;
  }
  r.center = center;
  if (!r.star_shape) r.failures.push_back("not star-shaped: no vertex meets every edge");
  bool all_pass = true, all_peripheral = true;
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    auto c = check_edge(gog, e, center, kb);
    std::string where = detail::edge_text(gog, e) + " group " + c.group;
    if (c.undistorted != Truth::True)
      r.failures.push_back(where + ": undistortedness " +
                           (c.undistorted == Truth::Unknown ? "not declared" : "fails"));
    if (!c.wide) r.failures.push_back(where + ": not wide");
    if (c.infinite_index != Truth::True)
      r.failures.push_back(where + ": infinite index " + std::string(truth_name(c.infinite_index)));
    if (!c.peripheral_at_center && r.star_shape)
      r.failures.push_back(where + ": center is not hyperbolic relative to it");
    all_pass = all_pass && c.passes();
    all_peripheral = all_peripheral && c.peripheral_at_center;
    r.edges.push_back(c);
  }
  r.morseless_star = r.star_shape && all_pass;
  r.relatively_hyperbolic = r.star_shape && all_peripheral;
  return r;
}

// -------------------------------------------------------- peripheral sets

struct Peripheral {
  enum class Family { A, H1, H2 };
  Family family;
  GroupDescriptor group;
  VertexId vertex = -1;  // leaf vertex for H1
  EdgeId edge = -1;      // half-edge for A and H2

  std::string family_name() const { return family == Family::A ? "A" : family == Family::H1 ? "H1" : "H2"; }
};

/// The peripheral collection of the fundamental group of a relatively
/// hyperbolic Morseless star: the edge-group images at the center (A), the
/// leaf groups across spanning-tree edges (H1), and one edge group per
/// remaining edge pair in the chosen orientation (H2).
inline std::vector<Peripheral> peripheral_structure(const GraphOfGroups& gog, std::vector<EdgeId> orientation = {},
                                                    std::vector<EdgeId> tree = {},
                                                    const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  auto report = validate_morseless_star(gog, -1, kb);
  if (!report.morseless_star || !report.relatively_hyperbolic)
    throw Error(ErrorCode::NotRelHypStar, report.failures.empty() ? "not a star" : report.failures.front());
  const Graph& g = gog.graph;
  VertexId c = report.center;
  if (orientation.empty())
    for (EdgeId e = 0; e < g.edge_count(); e += 2) orientation.push_back(e);
  if (static_cast<int>(orientation.size()) != g.pair_count())
    throw Error(ErrorCode::InvalidInput, "orientation needs one half-edge per edge pair");
  std::vector<char> oriented(g.pair_count(), 0);
  for (EdgeId e : orientation) {
    if (e < 0 || e >= g.edge_count() || oriented[e / 2]++)
      throw Error(ErrorCode::InvalidInput, "orientation repeats or misses an edge pair");
  }
  if (tree.empty() && g.vertex_count() > 1) tree = spanning_tree(g);
  if (!is_spanning_tree(g, tree)) throw Error(ErrorCode::InvalidSpanningTree, "not a spanning tree");
  auto in_tree = pair_mask(g, tree);

  std::vector<Peripheral> out;
  for (EdgeId a = 0; a < g.edge_count(); ++a)
    if (g.target(a) == c && !gog.edge_trivial(a)) out.push_back({Peripheral::Family::A, gog.edge_group_of(a), -1, a});
  for (EdgeId e : tree) {
    VertexId leaf = g.source(e) == c ? g.target(e) : g.source(e);
    out.push_back({Peripheral::Family::H1, gog.vertex_group[leaf], leaf, -1});
  }
  for (EdgeId e : orientation)
    if (!in_tree[e / 2]) out.push_back({Peripheral::Family::H2, gog.edge_group_of(e), -1, e});
  return out;
}

// ------------------------------------------------------------ derivations

struct TraceStep {
  std::string op;
  Json args = Json::object();
  std::string rule;
  std::string input_hash;
  std::string output_hash;
};

struct DerivationTrace {
  std::string initial_hash;
  std::string final_hash;
  std::vector<TraceStep> steps;

  Json to_json() const {
    Json ss = Json::array();
    for (const auto& s : steps)
      ss.push_back({{"op", s.op}, {"args", s.args}, {"rule", s.rule}, {"input_hash", s.input_hash},
                    {"output_hash", s.output_hash}});
    return {{"initial_hash", initial_hash}, {"final_hash", final_hash}, {"steps", ss}};
  }

  static DerivationTrace from_json(const Json& j) {
    DerivationTrace t;
    try {
      t.initial_hash = j.at("initial_hash");
      t.final_hash = j.at("final_hash");
      for (const auto& s : j.at("steps"))
        t.steps.push_back({s.at("op"), s.at("args"), s.at("rule"), s.at("input_hash"), s.at("output_hash")});
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("trace: ") + e.what());
    }
    return t;
  }
};

namespace rules {
inline constexpr const char* kHypotheses =
    "edge groups undistorted, wide, of infinite index; W vertices hyperbolic relative to adjacent edge groups; "
    "every edge meets W";
inline constexpr const char* kCollapse =
    "contract each component of the graph minus the center to one vertex (fundamental group unchanged)";
inline constexpr const char* kTrivialize =
    "a Morseless star whose center is hyperbolic relative to its edge groups has the Morse boundary of the "
    "same star with trivial edge groups";
inline constexpr const char* kRestore = "expand the contracted components, keeping the trivialized center edges";
}  // namespace rules

inline GraphOfGroups with_trivial_edges(const GraphOfGroups& gog, const std::function<bool(EdgeId)>& pick) {
  GraphOfGroups out = gog;
  for (EdgeId e = 0; e < gog.graph.edge_count(); e += 2)
    if (pick(e)) {
      out.edge_group[e / 2] = GroupDescriptor::trivial();
      out.injection[e].clear();
      out.injection[e ^ 1].clear();
    }
  return out;
}

namespace detail {

inline std::vector<std::vector<VertexId>> center_components(const GraphOfGroups& gog, VertexId w) {
  return components_minus_vertex(gog.graph, w);
}

// Index of the center after collapsing the components around it.
inline VertexId collapsed_center(const std::vector<std::vector<VertexId>>& comps, VertexId w) {
  VertexId c = 0;
  for (const auto& comp : comps)
    if (*std::min_element(comp.begin(), comp.end()) < w) ++c;
  return c;
}

inline VertexId require_star(const GraphOfGroups& star, VertexId center, const KnowledgeBase& kb) {
  if (star.all_edges_trivial()) return center < 0 ? 0 : center;
  auto rep = validate_morseless_star(star, center, kb);
  if (!rep.morseless_star || !rep.relatively_hyperbolic)
    throw Error(ErrorCode::HypothesisViolated,
                "star trivialization needs a relatively hyperbolic Morseless star: " +
                    (rep.failures.empty() ? std::string("unknown") : rep.failures.front()));
  return rep.center;
}

}  // namespace detail

/// The same star with every edge group trivial.
inline std::pair<GraphOfGroups, DerivationTrace> trivialize_star(const GraphOfGroups& gog, VertexId center = -1,
                                                                 const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  gog.validate();
  center = detail::require_star(gog, center, kb);
  auto out = with_trivial_edges(gog, [](EdgeId) { return true; });
  DerivationTrace t;
  t.initial_hash = gog_hash(gog);
  t.final_hash = gog_hash(out);
  t.steps.push_back(
      {"trivialize_star", {{"center", gog.vertex_name[center]}}, rules::kTrivialize, t.initial_hash, t.final_hash});
  return {out, t};
}

/// Checks the reduction hypotheses in order; throws HypothesisViolated with
/// detail() = the failing assumption number.
inline void check_reduction_hypotheses(const GraphOfGroups& gog, const std::vector<VertexId>& W,
                                       const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  const Graph& g = gog.graph;
  std::set<VertexId> inW;
  for (VertexId w : W) {
    g.check_vertex(w);
    if (!inW.insert(w).second) throw Error(ErrorCode::InvalidInput, "W lists a vertex twice");
  }
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    auto c = check_edge(gog, e, -1, kb);
    std::string where = detail::edge_text(gog, e) + " with edge group " + c.group;
    if (c.undistorted != Truth::True)
      throw Error(ErrorCode::HypothesisViolated,
                  "assumption (1): " + where + " is not declared undistorted", 1);
    if (!c.wide) throw Error(ErrorCode::HypothesisViolated, "assumption (1): " + where + " is not wide", 1);
    if (c.infinite_index != Truth::True)
      throw Error(ErrorCode::HypothesisViolated, "assumption (1): " + where + " does not have infinite index", 1);
  }
  for (VertexId w : W)
    for (EdgeId a = 0; a < g.edge_count(); ++a)
      if (g.target(a) == w && !kb.peripheral_kind(gog.host[a], gog.edge_group_of(a)))
        throw Error(ErrorCode::HypothesisViolated,
                    "assumption (2): " + gog.vertex_name[w] + " (" + gog.vertex_group[w].to_string() +
                        ") is not hyperbolic relative to the group of " + detail::edge_text(gog, a),
                    2);
  for (EdgeId e = 0; e < g.edge_count(); e += 2)
    if (!inW.count(g.source(e)) && !inW.count(g.target(e)))
      throw Error(ErrorCode::HypothesisViolated,
                  "assumption (3): " + detail::edge_text(gog, e) + " has no endpoint in W", 3);
}

/// For each w in W in order: contract the components around w, trivialize
/// the resulting star, and expand again. The result is the input with all
/// edge groups trivial.
inline std::pair<GraphOfGroups, DerivationTrace> reduce_graph_of_groups(
    const GraphOfGroups& gog, const std::vector<VertexId>& W, const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  gog.validate();
  check_reduction_hypotheses(gog, W, kb);
  DerivationTrace t;
  t.initial_hash = gog_hash(gog);
  Json wj = Json::array();
  for (VertexId w : W) wj.push_back(gog.vertex_name[w]);
  t.steps.push_back({"check_hypotheses", {{"W", wj}}, rules::kHypotheses, t.initial_hash, t.initial_hash});
  GraphOfGroups cur = gog;
  for (VertexId w : W) {
    std::string before = gog_hash(cur);
    auto comps = detail::center_components(cur, w);
    auto star = collapse_many(cur, comps);
    VertexId c = detail::collapsed_center(comps, w);
    std::string star_hash = gog_hash(star);
    t.steps.push_back({"collapse_components", {{"center", gog.vertex_name[w]}}, rules::kCollapse, before, star_hash});
    detail::require_star(star, c, kb);
    auto trivial = with_trivial_edges(star, [](EdgeId) { return true; });
    std::string trivial_hash = gog_hash(trivial);
    t.steps.push_back({"trivialize_star", {{"center", gog.vertex_name[w]}}, rules::kTrivialize, star_hash, trivial_hash});
    cur = with_trivial_edges(cur, [&](EdgeId e) { return cur.graph.source(e) == w || cur.graph.target(e) == w; });
    t.steps.push_back({"restore_components", {{"center", gog.vertex_name[w]}}, rules::kRestore, trivial_hash, gog_hash(cur)});
  }
  t.final_hash = gog_hash(cur);
  return {cur, t};
}

/// Re-executes a trace from `initial`, checking every recorded hash.
inline GraphOfGroups replay(const GraphOfGroups& initial, const DerivationTrace& trace,
                            const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  auto mismatch = [](size_t k, const std::string& what) {
    throw Error(ErrorCode::InvalidInput, "trace step " + std::to_string(k) + ": " + what + " hash mismatch");
  };
  if (gog_hash(initial) != trace.initial_hash) mismatch(0, "initial");
  GraphOfGroups cur = initial, saved;
  auto vertex_named = [&](const GraphOfGroups& g, const Json& name) {
    auto it = std::find(g.vertex_name.begin(), g.vertex_name.end(), name.get<std::string>());
    if (it == g.vertex_name.end()) throw Error(ErrorCode::InvalidInput, "trace names an unknown vertex");
    return static_cast<VertexId>(it - g.vertex_name.begin());
  };
  for (size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    if (gog_hash(cur) != s.input_hash) mismatch(k, "input");
    if (s.op == "check_hypotheses") {
      std::vector<VertexId> W;
      for (const auto& n : s.args.at("W")) W.push_back(vertex_named(cur, n));
      check_reduction_hypotheses(cur, W, kb);
    } else if (s.op == "collapse_components") {
      VertexId w = vertex_named(cur, s.args.at("center"));
      saved = cur;
      cur = collapse_many(cur, detail::center_components(cur, w));
    } else if (s.op == "trivialize_star") {
      detail::require_star(cur, vertex_named(cur, s.args.at("center")), kb);
      cur = with_trivial_edges(cur, [](EdgeId) { return true; });
    } else if (s.op == "restore_components") {
      VertexId w = vertex_named(saved, s.args.at("center"));
      cur = with_trivial_edges(saved, [&](EdgeId e) { return saved.graph.source(e) == w || saved.graph.target(e) == w; });
    } else {
      throw Error(ErrorCode::InvalidInput, "trace step " + std::to_string(k) + ": unknown op '" + s.op + "'");
    }
    if (gog_hash(cur) != s.output_hash) mismatch(k, "output");
  }
  if (gog_hash(cur) != trace.final_hash) mismatch(trace.steps.size(), "final");
  return cur;
}

// ------------------------------------------------------------- tree maps

struct ConditionVerdict {
  std::string name;
  std::string status;  // pass | fail | not checkable at finite scale | reported
  std::string detail;

  bool failed() const { return status == "fail"; }
};

inline Json verdicts_json(const std::vector<ConditionVerdict>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back({{"condition", v.name}, {"status", v.status}, {"detail", v.detail}});
  return out;
}

/// Partial vertex map between tree balls plus the optional finite data the
/// conditions refer to.
struct TreeMapInput {
  const TreeBall* domain = nullptr;
  const TreeBall* codomain = nullptr;
  std::vector<int> phi;                         // per domain vertex, -1 where undefined
  std::vector<Truth> codomain_boundary_nonempty;  // per codomain graph vertex (gamma), optional
  std::vector<double> domain_edge_morse;        // per domain half-edge, < 0 unknown, optional
  std::vector<double> codomain_edge_morse;      // per codomain half-edge, optional
  std::optional<MorseGauge> edge_gauge_map;     // f11 for the edge transfer check
  bool identity_boundary_stubs = false;
};

struct TreeMapReport {
  std::vector<ConditionVerdict> conditions;
  int coarse_constant = 0;  // C4 witnessed at this scale
  std::optional<std::pair<int, int>> injectivity_witness;
  std::optional<std::pair<int, int>> nestedness_witness;

  bool ok() const {
    return std::none_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.failed(); });
  }
};

namespace detail {
// v lies in T_w (the subtree hanging below w; T_root is the whole tree).
inline bool below(const TreeBall& t, int w, int v) {
  if (w == t.root) return true;
  return t.in_subtree(t.incoming[w], v);
}
}  // namespace detail

inline TreeMapReport check_tree_map(const TreeMapInput& in) {
  if (!in.domain || !in.codomain) throw Error(ErrorCode::BadMap, "missing tree balls");
  const TreeBall& T = *in.domain;
  const TreeBall& U = *in.codomain;
  if (static_cast<int>(in.phi.size()) != T.vertex_count()) throw Error(ErrorCode::BadMap, "phi has the wrong size");
  std::vector<int> dom;
  for (int v = 0; v < T.vertex_count(); ++v) {
    int x = in.phi[v];
    if (x < -1 || x >= U.vertex_count()) throw Error(ErrorCode::BadMap, "phi(" + std::to_string(v) + ") out of range");
    if (x < 0) continue;
    if (v != T.root && in.phi[T.graph.source(T.incoming[v])] < 0)
      throw Error(ErrorCode::BadMap, "domain is not a subtree containing the root");
    dom.push_back(v);
  }
  if (dom.empty() || in.phi[T.root] < 0) throw Error(ErrorCode::BadMap, "phi undefined at the root");
  TreeMapReport rep;
  auto add = [&](std::string name, bool pass, std::string detail) {
    rep.conditions.push_back({std::move(name), pass ? "pass" : "fail", std::move(detail)});
  };

  add("(1) root", in.phi[T.root] == U.root, "phi(root) = " + std::to_string(in.phi[T.root]));

  std::map<int, int> seen;
  for (int v : dom) {
    auto [it, fresh] = seen.emplace(in.phi[v], v);
    if (!fresh && !rep.injectivity_witness) rep.injectivity_witness = {it->second, v};
  }
  add("(2) injectivity", !rep.injectivity_witness,
      rep.injectivity_witness ? "vertices " + std::to_string(rep.injectivity_witness->first) + " and " +
                                    std::to_string(rep.injectivity_witness->second) + " share an image"
                              : std::to_string(dom.size()) + " vertices");

  bool forward = true, backward = true;
  for (int w : dom)
    for (int v : dom) {
      bool a = detail::below(T, w, v), b = detail::below(U, in.phi[w], in.phi[v]);
      if (a && !b) forward = false;
      if (b && !a) backward = false;
      if (a != b && !rep.nestedness_witness) rep.nestedness_witness = {v, w};
    }
  std::string nw = rep.nestedness_witness ? "pair (v, w) = (" + std::to_string(rep.nestedness_witness->first) + ", " +
                                                std::to_string(rep.nestedness_witness->second) + ")"
                                          : "all pairs";
  add("(3) nestedness", forward, nw);
  add("(3) nestedness converse", backward, nw);

  // C4: one more than the farthest codomain vertex below phi(v) not below
  // the image of a child of v, over vertices whose children are all mapped.
  int reach = 0;
  for (int v : dom) reach = std::max(reach, U.distance[in.phi[v]]);
  int c4 = 0;
  for (int v : dom) {
    std::vector<int> kids;
    bool complete = true;
    for (EdgeId e : T.graph.out_edges(v))
      if (T.outgoing[e]) {
        int k = T.graph.target(e);
        if (in.phi[k] < 0) complete = false;
        kids.push_back(k);
      }
    if (!complete || kids.empty()) continue;
    int pv = in.phi[v];
    for (int x = 0; x < U.vertex_count(); ++x) {
      if (U.distance[x] > reach || !detail::below(U, pv, x)) continue;
      bool covered = std::any_of(kids.begin(), kids.end(), [&](int k) { return detail::below(U, in.phi[k], x); });
      if (!covered) c4 = std::max(c4, U.distance[x] - U.distance[pv] + 1);
    }
  }
  rep.coarse_constant = c4;
  rep.conditions.push_back({"(4) coarse surjectivity", "pass", "C4 = " + std::to_string(c4) + " at this scale"});

  if (in.codomain_boundary_nonempty.empty()) {
    rep.conditions.push_back({"(5) partial surjectivity", "not checkable at finite scale", "no boundary flags given"});
  } else {
    std::set<int> image;
    for (int v : dom) image.insert(in.phi[v]);
    int miss = -1;
    for (int x = 0; x < U.vertex_count() && miss < 0; ++x)
      if (U.distance[x] <= reach && in.codomain_boundary_nonempty.at(U.gamma_vertex[x]) == Truth::True &&
          !image.count(x))
        miss = x;
    add("(5) partial surjectivity", miss < 0, miss < 0 ? "within distance " + std::to_string(reach)
                                                       : "vertex " + std::to_string(miss) + " missed");
  }

  rep.conditions.push_back({"(6) boundary homeomorphisms",
                            in.identity_boundary_stubs ? "pass" : "not checkable at finite scale",
                            in.identity_boundary_stubs ? "identity stubs" : "needs boundary maps"});

  if (in.domain_edge_morse.empty() || in.codomain_edge_morse.empty() || !in.edge_gauge_map) {
    rep.conditions.push_back({"(7a) edge Morseness", "not checkable at finite scale", "no edge Morse data"});
  } else {
    const auto& f = *in.edge_gauge_map;
    auto path_max = [&](int a, int b) {
      // edges on the codomain geodesic between images a and b
      double m = 0;
      while (a != b) {
        int& deeper = U.distance[a] >= U.distance[b] ? a : b;
        EdgeId e = U.incoming[deeper];
        double c = in.codomain_edge_morse.at(e);
        if (c < 0) return -1.0;
        m = std::max(m, c);
        deeper = U.graph.source(e);
      }
      return m;
    };
    std::string bad;
    for (int v : dom) {
      if (v == T.root) continue;
      EdgeId e = T.incoming[v];
      double m = in.domain_edge_morse.at(e);
      double mp = path_max(in.phi[T.graph.source(e)], in.phi[v]);
      if (m < 0 || mp < 0) continue;
      if (mp > f(m, 0) + 1e-9 || m > f(mp, 0) + 1e-9) bad = "edge into " + std::to_string(v);
    }
    add("(7a) edge Morseness", bad.empty(), bad.empty() ? "gauge map " + f.to_string() : bad);
  }
  rep.conditions.push_back({"(7b) tail Morseness", in.identity_boundary_stubs ? "pass" : "not checkable at finite scale",
                            in.identity_boundary_stubs ? "identity stubs" : "needs boundary maps"});
  return rep;
}

// -------------------------------------------- empty-boundary local bijection

struct CosetClass {
  EdgeId edge;                      // half-edge leaving the vertex
  std::vector<Word> coset_rep;      // shortlex-least representative, in order
  std::vector<Word> image;          // nu(coset)
};

struct LocalBijection {
  VertexId vertex = 0;
  int radius = 0;
  std::vector<CosetClass> classes;
  std::vector<ConditionVerdict> conditions;
  // Morseness transfer table: (representative length, image length, count)
  std::map<std::pair<int, int>, int> length_table;
};

/// For a vertex whose group has empty Morse boundary, pairs the cosets of
/// each incident edge group with group elements: the k-th coset (ordered by
/// shortlex-least representative) goes to the k-th element in shortlex
/// order, so the trivial coset goes to 1. This yields the local map from the
/// children of the vertex in the tree to the children in the tree with
/// trivial edge groups. Conditions are checked on cosets whose least
/// representative lies within `radius`.
inline LocalBijection build_empty_boundary_bijection(const GraphOfGroups& gog, VertexId v, int radius,
                                                     const BallLimits& limits = {},
                                                     const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  gog.validate();
  gog.graph.check_vertex(v);
  const auto& G = gog.vertex_group[v];
  if (kb.properties_of(G).has_empty_morse_boundary != Truth::True)
    throw Error(ErrorCode::WrongCase, gog.vertex_name[v] + " does not have empty Morse boundary");
  if (radius > limits.max_radius)
    throw Error(ErrorCode::ScaleExceeded, "radius " + std::to_string(radius) + " exceeds cap");
  auto model = make_model(G);
  CayleyBall ball;
  try {
    ball = cayley_ball(*model, radius, limits);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BallTooLarge) throw Error(ErrorCode::ScaleExceeded, e.what());
    throw;
  }
  std::vector<int> order(ball.graph.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return shortlex_less(ball.element[a], ball.element[b]); });

  LocalBijection out;
  out.vertex = v;
  out.radius = radius;
  const auto* abelian = dynamic_cast<const AbelianModel*>(model.get());
  for (EdgeId a = 0; a < gog.graph.edge_count(); ++a) {
    if (gog.graph.source(a) != v) continue;
    const auto& images = gog.injection[a ^ 1];  // edge group inside G_v
    std::function<Word(const Word&)> coset_key;
    if (images.empty()) {
      coset_key = [](const Word& h) { return h; };
    } else if (abelian && std::all_of(abelian->orders().begin(), abelian->orders().end(), [](int64_t o) { return o == 0; })) {
      std::vector<std::vector<int64_t>> cols;
      for (const Word& w : images) cols.push_back(abelian->exponents(w));
      auto lattice = std::make_shared<LatticeCosets>(G.generator_count(), cols);
      coset_key = [lattice, abelian](const Word& h) {
        return abelian->word_of(lattice->split(abelian->exponents(h)).first);
      };
    } else {
      throw Error(ErrorCode::WordProblemUnavailable, "coset enumeration needs a free abelian vertex group");
    }
    CosetClass cls;
    cls.edge = a;
    std::set<Word> seen;
    for (int x : order) {
      Word key = coset_key(ball.element[x]);
      if (seen.insert(key).second) cls.coset_rep.push_back(ball.element[x]);
    }
    for (size_t k = 0; k < cls.coset_rep.size(); ++k) cls.image.push_back(ball.element[order[k]]);
    for (size_t k = 0; k < cls.coset_rep.size(); ++k)
      ++out.length_table[{static_cast<int>(cls.coset_rep[k].size()), static_cast<int>(cls.image[k].size())}];
    out.classes.push_back(std::move(cls));
  }

  bool identity_ok = true, injective = true;
  size_t total = 0;
  for (const auto& c : out.classes) {
    identity_ok = identity_ok && !c.image.empty() && c.image[0].empty();
    std::set<Word> im(c.image.begin(), c.image.end());
    injective = injective && im.size() == c.image.size();
    total += c.coset_rep.size();
  }
  std::string cosets = std::to_string(total) + " cosets in " + std::to_string(out.classes.size()) + " edge classes";
  // Images are children of the target vertex, one per element of G_v and
  // edge class, so (I) holds and (III) reduces to injectivity.
  out.conditions.push_back({"(I) nestedness", identity_ok ? "pass" : "fail", "images are children of q(v); trivial coset to 1"});
  // every element of length < L is hit, where L bounds the ordered prefix
  int covered = radius;
  for (const auto& c : out.classes) {
    int L = 0;
    if (c.image.size() < order.size()) L = static_cast<int>(ball.element[order[c.image.size()]].size());
    else L = radius + 1;
    covered = std::min(covered, L - 1);
  }
  out.conditions.push_back({"(II) coarse surjectivity", "pass",
                            "depth 1; every child of q(v) with element length <= " + std::to_string(std::max(covered, 0)) +
                                " is an image"});
  out.conditions.push_back({"(III) non-nestedness", injective ? "pass" : "fail", cosets});
  out.conditions.push_back({"(IV) partial surjectivity", "pass", "images are children of q(v)"});
  out.conditions.push_back({"(V) Morse condition", "reported", "see length table"});
  return out;
}

}  // namespace morse_atlas
