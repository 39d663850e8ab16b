#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "error.hpp"
#include "graph_of_groups.hpp"
#include "io.hpp"
#include "kb.hpp"
#include "star.hpp"

namespace morse_atlas {

enum class Geometry { S3, R3, H3, S2xR, H2xR, Nil, Sol, PSL2Rtilde };

inline constexpr std::array<std::string_view, 8> kGeometryNames = {"S3",  "R3",  "H3",  "S2xR",
                                                                   "H2xR", "Nil", "Sol", "PSL2Rtilde"};

inline std::string_view geometry_name(Geometry g) { return kGeometryNames[static_cast<int>(g)]; }

inline Geometry parse_geometry(std::string_view s) {
  for (size_t i = 0; i < kGeometryNames.size(); ++i)
    if (kGeometryNames[i] == s) return static_cast<Geometry>(i);
  throw Error(ErrorCode::ParseError, "unknown geometry '" + std::string(s) + "'");
}

enum class PieceKind { FiniteVolumeHyperbolic, SeifertFibered };

struct JsjPiece {
  std::string name;
  PieceKind kind;
};

/// A prime factor: either geometric, or a JSJ graph of hyperbolic and
/// Seifert-fibered pieces glued along tori.
struct PrimeFactor {
  bool geometric = true;
  Geometry geometry = Geometry::S3;
  int64_t pi1_order = 1;  // S3 geometry only: order of the finite fundamental group (2 for RP3)
  std::vector<JsjPiece> pieces;
  std::vector<std::pair<int, int>> tori;  // piece indices

  static PrimeFactor of(Geometry g, int64_t order = 1) {
    PrimeFactor p;
    p.geometry = g;
    p.pi1_order = order;
    return p;
  }
  static PrimeFactor rp3() { return of(Geometry::S3, 2); }
  static PrimeFactor jsj(std::vector<JsjPiece> pieces, std::vector<std::pair<int, int>> tori) {
    PrimeFactor p;
    p.geometric = false;
    p.pieces = std::move(pieces);
    p.tori = std::move(tori);
    return p;
  }

  int hyperbolic_pieces() const {
    return static_cast<int>(std::count_if(pieces.begin(), pieces.end(),
                                          [](const auto& x) { return x.kind == PieceKind::FiniteVolumeHyperbolic; }));
  }

  std::string label() const {
    if (geometric) {
      if (geometry == Geometry::S3 && pi1_order == 2) return "RP3";
      if (geometry == Geometry::S3 && pi1_order > 2) return "S3/Z" + std::to_string(pi1_order);
      return std::string(geometry_name(geometry));
    }
    return "JSJ(" + std::to_string(hyperbolic_pieces()) + "H," + std::to_string(pieces.size() - hyperbolic_pieces()) +
           "S," + std::to_string(tori.size()) + "T)";
  }

  void validate() const {
    if (geometric) {
      if (pi1_order < 1) throw Error(ErrorCode::InvalidInput, "fundamental group order must be >= 1");
      if (pi1_order != 1 && geometry != Geometry::S3)
        throw Error(ErrorCode::InvalidInput, "only S3-geometry primes have finite fundamental group");
      return;
    }
    if (tori.empty())
      throw Error(ErrorCode::InvalidInput, "non-geometric prime needs at least one torus (a single piece is geometric)");
    std::set<std::string> names;
    for (const auto& p : pieces)
      if (!names.insert(p.name).second) throw Error(ErrorCode::InvalidInput, "duplicate piece '" + p.name + "'");
    Graph g;
    for (size_t i = 0; i < pieces.size(); ++i) g.add_vertex();
    for (auto [a, b] : tori) {
      if (a < 0 || b < 0 || a >= static_cast<int>(pieces.size()) || b >= static_cast<int>(pieces.size()))
        throw Error(ErrorCode::InvalidInput, "torus names an unknown piece");
      g.add_edge(a, b);
    }
    if (!g.connected()) throw Error(ErrorCode::DisconnectedGraph, "JSJ graph is not connected");
  }
};

struct ManifoldDecomposition {
  std::vector<PrimeFactor> primes;
  std::string name;
  bool oriented = true;

  void validate() const {
    if (primes.empty()) throw Error(ErrorCode::InvalidInput, "decomposition has no primes");
    for (const auto& p : primes) p.validate();
  }
};

// ----------------------------------------------------------------- JSON

namespace detail {
inline std::string text_field(const Json& j, const std::string& key, const std::string& where) {
  return get_as<std::string>(field(j, key, where), where + "/" + key);
}
}  // namespace detail

inline Json prime_to_json(const PrimeFactor& p) {
  if (p.geometric) {
    Json j = {{"kind", "geometric"}, {"geometry", geometry_name(p.geometry)}};
    if (p.pi1_order != 1) j["pi1_order"] = p.pi1_order;
    return j;
  }
  Json pieces = Json::array(), tori = Json::array();
  for (const auto& x : p.pieces)
    pieces.push_back({{"name", x.name}, {"kind", x.kind == PieceKind::FiniteVolumeHyperbolic ? "hyperbolic" : "seifert"}});
  for (auto [a, b] : p.tori) tori.push_back({p.pieces[a].name, p.pieces[b].name});
  return {{"kind", "non_geometric"}, {"pieces", pieces}, {"tori", tori}};
}

inline Json decomposition_to_json(const ManifoldDecomposition& m) {
  Json primes = Json::array();
  for (const auto& p : m.primes) primes.push_back(prime_to_json(p));
  Json j = {{"schema_version", kSchemaVersion}, {"kind", "decomposition"}, {"oriented", m.oriented}, {"primes", primes}};
  if (!m.name.empty()) j["name"] = m.name;
  return j;
}

inline PrimeFactor prime_from_json(const Json& j, const std::string& where) {
  std::string kind = detail::text_field(j, "kind", where);
  if (kind == "geometric") {
    auto name = detail::text_field(j, "geometry", where);
    Geometry g;
    try {
      g = parse_geometry(name);
    } catch (const Error&) {
      detail::schema_fail(where + "/geometry", "unknown geometry '" + name + "'");
    }
    auto p = PrimeFactor::of(g);
    if (j.contains("pi1_order")) p.pi1_order = detail::get_int(j, "pi1_order", where);
    return p;
  }
  if (kind != "non_geometric") detail::schema_fail(where, "kind must be 'geometric' or 'non_geometric'");
  std::vector<JsjPiece> pieces;
  std::map<std::string, int> index;
  for (const auto& x : detail::field(j, "pieces", where)) {
    std::string name = detail::text_field(x, "name", where + ".pieces");
    std::string k = detail::text_field(x, "kind", where + ".pieces");
    if (k != "hyperbolic" && k != "seifert") detail::schema_fail(where + ".pieces", "kind must be 'hyperbolic' or 'seifert'");
    index[name] = static_cast<int>(pieces.size());
    pieces.push_back({name, k == "hyperbolic" ? PieceKind::FiniteVolumeHyperbolic : PieceKind::SeifertFibered});
  }
  std::vector<std::pair<int, int>> tori;
  for (const auto& t : detail::field(j, "tori", where)) {
    if (!t.is_array() || t.size() != 2) detail::schema_fail(where + ".tori", "each torus is a pair of piece names");
    auto look = [&](const Json& n) {
      if (!n.is_string() || !index.count(n.get<std::string>()))
        detail::schema_fail(where + ".tori", "unknown piece " + n.dump());
      return index.at(n.get<std::string>());
    };
    tori.emplace_back(look(t[0]), look(t[1]));
  }
  return PrimeFactor::jsj(std::move(pieces), std::move(tori));
}

inline ManifoldDecomposition decomposition_from_json(const Json& j) {
  check_header(j, "decomposition");
  ManifoldDecomposition m;
  if (j.contains("name")) m.name = detail::text_field(j, "name", "decomposition");
  if (j.contains("oriented")) m.oriented = detail::get_as<bool>(j.at("oriented"), "decomposition/oriented");
  const Json& ps = detail::field(j, "primes", "decomposition");
  if (!ps.is_array()) detail::schema_fail("decomposition.primes", "expected an array");
  for (size_t i = 0; i < ps.size(); ++i) m.primes.push_back(prime_from_json(ps[i], "primes[" + std::to_string(i) + "]"));
  m.validate();
  return m;
}

// ------------------------------------------------------------ classifier

/// JSJ graph of groups: piece groups as symbolic descriptors with two
/// peripheral generators per incident torus, ZPow(2) edge groups, and W the
/// hyperbolic pieces.
inline std::pair<GraphOfGroups, std::vector<VertexId>> to_graph_of_groups(const PrimeFactor& p) {
  if (p.geometric) throw Error(ErrorCode::InvalidInput, "geometric primes have no JSJ graph");
  p.validate();
  std::vector<std::vector<std::string>> gens(p.pieces.size());
  std::vector<std::pair<std::vector<Word>, std::vector<Word>>> images;
  for (size_t j = 0; j < p.tori.size(); ++j) {
    // meridian and longitude of torus j on each side
    auto peripheral = [&](int piece, const std::string& side) {
      auto& g = gens[piece];
      g.push_back("m" + std::to_string(j) + side);
      g.push_back("l" + std::to_string(j) + side);
      Letter a = static_cast<Letter>(g.size()) - 1;
      return std::vector<Word>{{a}, {static_cast<Letter>(a + 1)}};
    };
    auto src = peripheral(p.tori[j].first, "s");
    auto tgt = peripheral(p.tori[j].second, "t");
    images.emplace_back(src, tgt);
  }
  GraphOfGroups gog;
  std::vector<VertexId> W;
  for (size_t i = 0; i < p.pieces.size(); ++i) {
    bool hyp = p.pieces[i].kind == PieceKind::FiniteVolumeHyperbolic;
    VertexId v = gog.add_vertex(
        GroupDescriptor::symbolic(hyp ? GroupTag::FiniteVolumeHyperbolic3Mfld : GroupTag::SeifertFibered, gens[i]),
        p.pieces[i].name);
    if (hyp) W.push_back(v);
  }
  for (size_t j = 0; j < p.tori.size(); ++j)
    gog.add_edge(p.tori[j].first, p.tori[j].second, GroupDescriptor::zpow(2), images[j].first, images[j].second);
  gog.validate();
  return {gog, W};
}

struct ClassificationStep {
  std::string rule;
  std::string detail;
};

struct PrimeBoundary {
  GroupDescriptor group;             // free product the boundary is read from
  BoundaryType type;
  std::vector<Factor> factors;       // free factors it contributes
  std::vector<ClassificationStep> trace;
  std::optional<DerivationTrace> reduction;
};

namespace rules {
inline constexpr const char* kGeometricTable = "geometric-prime-table";
inline constexpr const char* kOmegaCantor = "seifert-graph-omega-cantor";
inline constexpr const char* kJsjReduction = "relatively-hyperbolic-reduction";
inline constexpr const char* kTrivialEdgeFreeProduct = "trivial-edge-free-product";
inline constexpr const char* kNotInfinitelyEnded = "not-infinitely-ended";
inline constexpr const char* kNormalize = "free-product-normalization";
inline constexpr const char* kReadingNote = "reading-note";
}  // namespace rules

namespace detail {

inline GroupDescriptor geometric_group(const PrimeFactor& p) {
  switch (p.geometry) {
    case Geometry::S3: return p.pi1_order == 1 ? GroupDescriptor::trivial() : GroupDescriptor::cyclic(static_cast<int>(p.pi1_order));
    case Geometry::R3: return GroupDescriptor::zpow(3);
    case Geometry::H3: return GroupDescriptor::symbolic(GroupTag::ClosedHyperbolic3Mfld);
    case Geometry::S2xR: return GroupDescriptor::symbolic(GroupTag::S2xR);
    case Geometry::H2xR: return GroupDescriptor::symbolic(GroupTag::H2xR);
    case Geometry::Nil: return GroupDescriptor::symbolic(GroupTag::Nil);
    case Geometry::Sol: return GroupDescriptor::symbolic(GroupTag::Sol);
    case Geometry::PSL2Rtilde: return GroupDescriptor::symbolic(GroupTag::PSL2Rtilde);
  }
  throw Error(ErrorCode::InternalTableError, "unknown geometry");
}

inline Factor known_factor(const GroupDescriptor& d, const std::string& name, const KnowledgeBase& kb) {
  auto props = kb.properties_of(d);
  if (props.estimated || !props.morse_boundary || props.is_infinite == Truth::Unknown)
    throw Error(ErrorCode::RefusesEstimate, "properties of " + d.to_string() + " are not exactly known");
  Factor f = KnowledgeBase::factor_of(d, props);
  f.name = name;
  return f;
}

inline Factor free_factor(int rank, const std::string& name) {
  Factor f;
  f.name = name;
  f.boundary = rank == 1 ? BoundaryType::TwoPoints : BoundaryType::Cantor;
  f.infinite = true;
  f.virtually_cyclic = rank == 1;
  f.hyperbolic = true;
  f.free_rank = rank;
  return f;
}

inline Factor omega_cantor_factor(const std::string& name) {
  Factor f;
  f.name = name;
  f.boundary = BoundaryType::OmegaCantor;
  f.infinite = true;
  f.virtually_cyclic = false;
  f.hyperbolic = false;
  return f;
}

}  // namespace detail

/// Morse boundary of one prime and the free factors it contributes to the
/// connected sum.
inline PrimeBoundary prime_boundary(const PrimeFactor& p, const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  p.validate();
  PrimeBoundary out;
  if (p.geometric) {
    out.group = detail::geometric_group(p);
    Factor f = detail::known_factor(out.group, p.label(), kb);
    out.type = f.boundary;
    out.factors = {f};
    out.trace.push_back({rules::kGeometricTable, p.label() + " has boundary " + std::string(boundary_name(f.boundary))});
    return out;
  }
  auto [gog, W] = to_graph_of_groups(p);
  if (W.empty()) {
    out.group = fundamental_presentation(gog).presentation;
    Factor f = detail::omega_cantor_factor(p.label());
    out.type = BoundaryType::OmegaCantor;
    out.factors = {f};
    out.trace.push_back({rules::kOmegaCantor, "Seifert pieces glued along " + std::to_string(p.tori.size()) +
                                                  " tori: omega-Cantor boundary"});
    return out;
  }
  // Contract the components of the graph minus the hyperbolic pieces.
  std::set<VertexId> inW(W.begin(), W.end());
  Graph rest;
  std::vector<VertexId> others, local(gog.vertex_count(), -1);
  for (VertexId v = 0; v < gog.vertex_count(); ++v)
    if (!inW.count(v)) {
      local[v] = rest.add_vertex();
      others.push_back(v);
    }
  for (EdgeId e = 0; e < gog.graph.edge_count(); e += 2) {
    VertexId a = gog.graph.source(e), b = gog.graph.target(e);
    if (!inW.count(a) && !inW.count(b)) rest.add_edge(local[a], local[b]);
  }
  std::vector<std::vector<VertexId>> comps;
  {
    std::vector<int> seen(rest.vertex_count(), 0);
    for (VertexId s = 0; s < rest.vertex_count(); ++s) {
      if (seen[s]) continue;
      std::vector<VertexId> comp, stack{s};
      seen[s] = 1;
      while (!stack.empty()) {
        VertexId x = stack.back();
        stack.pop_back();
        comp.push_back(others[x]);
        for (EdgeId e : rest.out_edges(x))
          if (!seen[rest.target(e)]) {
            seen[rest.target(e)] = 1;
            stack.push_back(rest.target(e));
          }
      }
      comps.push_back(comp);
    }
  }
  auto collapsed = collapse_many(gog, comps);
  std::vector<VertexId> Wc;
  for (VertexId v = 0; v < collapsed.vertex_count(); ++v)
    if (collapsed.vertex_group[v].tag == GroupTag::FiniteVolumeHyperbolic3Mfld) Wc.push_back(v);
  auto [reduced, trace] = reduce_graph_of_groups(collapsed, Wc, kb);
  out.reduction = trace;
  out.trace.push_back({rules::kJsjReduction, std::to_string(Wc.size()) + " hyperbolic vertices, " +
                                                 std::to_string(comps.size()) + " Seifert components; trace " +
                                                 trace.final_hash});

  std::vector<GroupDescriptor> parts;
  for (VertexId v = 0; v < reduced.vertex_count(); ++v) {
    const auto& name = reduced.vertex_name[v];
    if (reduced.vertex_group[v].tag == GroupTag::FiniteVolumeHyperbolic3Mfld) {
      out.factors.push_back(detail::known_factor(reduced.vertex_group[v], name, kb));
      parts.push_back(reduced.vertex_group[v]);
      continue;
    }
    if (reduced.vertex_group[v].tag == GroupTag::SeifertFibered) {
      out.factors.push_back(detail::known_factor(reduced.vertex_group[v], name, kb));
    } else {
      out.factors.push_back(detail::omega_cantor_factor(name));
      out.trace.push_back({rules::kOmegaCantor, "component " + name + ": omega-Cantor boundary"});
    }
    parts.push_back(reduced.vertex_group[v]);
  }
  int rank = reduced.pair_count() - reduced.vertex_count() + 1;
  if (rank > 0) {
    out.factors.push_back(detail::free_factor(rank, "F" + std::to_string(rank)));
    parts.push_back(rank == 1 ? GroupDescriptor::integers() : GroupDescriptor::free(rank));
  }
  out.trace.push_back({rules::kTrivialEdgeFreeProduct,
                       std::to_string(reduced.vertex_count()) + " vertex groups and a free group of rank " +
                           std::to_string(rank)});
  out.group = GroupDescriptor::free_product(parts);
  auto norm = normalize(out.factors);
  out.type = norm.type;
  return out;
}

struct Classification {
  BoundaryType type;
  std::vector<ClassificationStep> trace;
  std::vector<PrimeBoundary> primes;

  Json to_json() const {
    Json steps = Json::array();
    for (const auto& s : trace) steps.push_back({{"rule", s.rule}, {"detail", s.detail}});
    Json reductions = Json::array();
    for (const auto& p : primes)
      if (p.reduction) reductions.push_back(p.reduction->to_json());
    const auto& pr = predicates(type);
    return {{"boundary", boundary_name(type)},
            {"trace", steps},
            {"reductions", reductions},
            {"predicates",
             {{"totally_disconnected", pr.totally_disconnected},
              {"compact", pr.compact},
              {"connected", tri_name(pr.connected)},
              {"components", component_name(pr.component_kind)},
              {"finite", pr.finite}}}};
  }
};

/// Morse boundary type of the fundamental group of a closed oriented
/// 3-manifold given by its prime and JSJ decomposition.
inline Classification classify(const ManifoldDecomposition& m, const KnowledgeBase& kb = KnowledgeBase::builtin()) {
  m.validate();
  Classification c;
  std::vector<Factor> factors;
  for (const auto& p : m.primes) {
    auto pb = prime_boundary(p, kb);
    for (const auto& s : pb.trace) c.trace.push_back(s);
    factors.insert(factors.end(), pb.factors.begin(), pb.factors.end());
    c.primes.push_back(std::move(pb));
  }
  auto res = normalize(factors);
  for (const auto& s : res.trace) {
    bool special = s.rfind("single factor", 0) == 0 || s.rfind("Z/2 * Z/2", 0) == 0 || s.rfind("trivial group", 0) == 0;
    c.trace.push_back({special ? rules::kNotInfinitelyEnded : rules::kNormalize, s});
  }
  c.type = res.type;
  if (c.type == BoundaryType::OmegaSierpFPOmegaSierp)
    c.trace.push_back({rules::kReadingNote,
                       "omega-Sierpinski free product read as: a finite volume hyperbolic JSJ piece and no H3 prime"});
  if (c.type == BoundaryType::OmegaSierpinski)
    throw Error(ErrorCode::UnclassifiedCombination, "a single omega-Sierpinski factor is not a classified outcome");
  return c;
}

}  // namespace morse_atlas
