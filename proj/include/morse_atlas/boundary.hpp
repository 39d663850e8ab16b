#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace morse_atlas {

/// The nine Morse boundary types of closed 3-manifold groups, plus the
/// omega-Sierpinski curve, which only occurs as the boundary of a factor.
enum class BoundaryType {
  Empty,
  TwoPoints,
  Cantor,
  OmegaCantor,
  Sphere2,
  Sphere2FPSphere2,
  Sphere2FPEmpty,
  OmegaSierpFPOmegaSierp,
  Sphere2FPOmegaSierp,
  OmegaSierpinski,
};

inline constexpr int kClassifiedTypeCount = 9;
inline constexpr int kBoundaryTypeCount = 10;

inline constexpr std::array<BoundaryType, kClassifiedTypeCount> kClassifiedTypes = {
    BoundaryType::Empty,           BoundaryType::TwoPoints,
    BoundaryType::Cantor,          BoundaryType::OmegaCantor,
    BoundaryType::Sphere2,         BoundaryType::Sphere2FPSphere2,
    BoundaryType::Sphere2FPEmpty,  BoundaryType::OmegaSierpFPOmegaSierp,
    BoundaryType::Sphere2FPOmegaSierp,
};

inline constexpr std::string_view boundary_name(BoundaryType t) {
  switch (t) {
    case BoundaryType::Empty: return "Empty";
    case BoundaryType::TwoPoints: return "TwoPoints";
    case BoundaryType::Cantor: return "Cantor";
    case BoundaryType::OmegaCantor: return "OmegaCantor";
    case BoundaryType::Sphere2: return "Sphere2";
    case BoundaryType::Sphere2FPSphere2: return "Sphere2FPSphere2";
    case BoundaryType::Sphere2FPEmpty: return "Sphere2FPEmpty";
    case BoundaryType::OmegaSierpFPOmegaSierp: return "OmegaSierpFPOmegaSierp";
    case BoundaryType::Sphere2FPOmegaSierp: return "Sphere2FPOmegaSierp";
    case BoundaryType::OmegaSierpinski: return "OmegaSierpinski";
  }
  return "?";
}

inline BoundaryType parse_boundary(std::string_view name) {
  for (int i = 0; i < kBoundaryTypeCount; ++i) {
    auto t = static_cast<BoundaryType>(i);
    if (boundary_name(t) == name) return t;
  }
  throw Error(ErrorCode::ParseError, "unknown boundary type '" + std::string(name) + "'");
}

enum class Tri { False, True, NotApplicable };
enum class ComponentKind { None, Point, Sphere, Sierpinski, Mixed };

inline constexpr std::string_view tri_name(Tri t) {
  return t == Tri::True ? "true" : t == Tri::False ? "false" : "n/a";
}

inline constexpr std::string_view component_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::None: return "none";
    case ComponentKind::Point: return "point";
    case ComponentKind::Sphere: return "sphere";
    case ComponentKind::Sierpinski: return "sierpinski";
    case ComponentKind::Mixed: return "mixed";
  }
  return "?";
}

struct BoundaryPredicates {
  bool totally_disconnected;
  bool compact;
  Tri connected;
  ComponentKind component_kind;
  bool finite;
  // Realized as the boundary of some infinitely-ended group. The free-product
  // types and the Cantor sets are; the others are not. Externally sourced.
  bool infinitely_ended_realizable;

  constexpr bool operator==(const BoundaryPredicates&) const = default;
};

inline constexpr std::array<BoundaryPredicates, kBoundaryTypeCount> kPredicateTable = {{
    // td     compact connected          components                 finite inf-ended
    {true, true, Tri::NotApplicable, ComponentKind::None, true, false},        // Empty
    {true, true, Tri::False, ComponentKind::Point, true, false},               // TwoPoints
    {true, true, Tri::False, ComponentKind::Point, false, true},               // Cantor
    {true, false, Tri::False, ComponentKind::Point, false, true},              // OmegaCantor
    {false, true, Tri::True, ComponentKind::Sphere, false, false},             // Sphere2
    {false, true, Tri::False, ComponentKind::Sphere, false, true},             // S2 * S2
    {false, false, Tri::False, ComponentKind::Sphere, false, true},            // S2 * empty
    {false, false, Tri::False, ComponentKind::Sierpinski, false, true},        // wS * wS
    {false, false, Tri::False, ComponentKind::Mixed, false, true},             // S2 * wS
    {false, false, Tri::True, ComponentKind::Sierpinski, false, false},        // wS
}};

inline constexpr const BoundaryPredicates& predicates(BoundaryType t) {
  return kPredicateTable[static_cast<int>(t)];
}

/// Predicates in the order used to name separation witnesses.
inline constexpr std::array<std::string_view, 5> kWitnessOrder = {
    "totally_disconnected", "compact", "connected", "component_kind", "finite"};

/// Index into kWitnessOrder of the first predicate separating a and b, or -1.
inline constexpr int separating_predicate(BoundaryType a, BoundaryType b) {
  const auto& p = predicates(a);
  const auto& q = predicates(b);
  if (p.totally_disconnected != q.totally_disconnected) return 0;
  if (p.compact != q.compact) return 1;
  if (p.connected != q.connected) return 2;
  if (p.component_kind != q.component_kind) return 3;
  if (p.finite != q.finite) return 4;
  return -1;
}

inline constexpr bool table_separates_all_types() {
  for (int i = 0; i < kClassifiedTypeCount; ++i)
    for (int j = i + 1; j < kClassifiedTypeCount; ++j)
      if (separating_predicate(kClassifiedTypes[i], kClassifiedTypes[j]) < 0) return false;
  return true;
}

// The first four types are exactly the totally disconnected ones; Sphere2
// and S2 * S2 are compact while S2 * empty is not.
inline constexpr bool table_matches_separation_statements() {
  for (int i = 0; i < kClassifiedTypeCount; ++i)
    if (predicates(kClassifiedTypes[i]).totally_disconnected != (i < 4)) return false;
  return predicates(BoundaryType::Sphere2).compact &&
         predicates(BoundaryType::Sphere2FPSphere2).compact &&
         !predicates(BoundaryType::Sphere2FPEmpty).compact &&
         predicates(BoundaryType::Sphere2).connected == Tri::True &&
         predicates(BoundaryType::Sphere2FPSphere2).connected == Tri::False;
}

static_assert(table_separates_all_types(), "boundary predicate table fails to separate types");
static_assert(table_matches_separation_statements(), "boundary predicate table inconsistent");

struct SeparationWitness {
  BoundaryType a;
  BoundaryType b;
  std::string_view predicate;
};

/// One witness per unordered pair of the nine classified types (36 entries).
inline std::vector<SeparationWitness> distinctness_matrix() {
  std::vector<SeparationWitness> out;
  for (int i = 0; i < kClassifiedTypeCount; ++i)
    for (int j = i + 1; j < kClassifiedTypeCount; ++j) {
      int k = separating_predicate(kClassifiedTypes[i], kClassifiedTypes[j]);
      if (k < 0)
        throw Error(ErrorCode::InternalTableError,
                    std::string(boundary_name(kClassifiedTypes[i])) + " vs " +
                        std::string(boundary_name(kClassifiedTypes[j])));
      out.push_back({kClassifiedTypes[i], kClassifiedTypes[j], kWitnessOrder[k]});
    }
  return out;
}

/// A free factor as seen by the normalizer.
struct Factor {
  std::string name;
  BoundaryType boundary = BoundaryType::Empty;
  bool infinite = true;
  bool virtually_cyclic = false;
  bool hyperbolic = false;
  int64_t order = 0;   // group order when finite
  int free_rank = 0;   // > 0 for a free group of that rank
};

struct NormalizeResult {
  BoundaryType type;
  std::vector<std::string> trace;
};

namespace detail {

// Composite types expand to the boundary types of the factors producing them.
inline std::optional<std::vector<BoundaryType>> constituents(BoundaryType t) {
  using B = BoundaryType;
  switch (t) {
    case B::Cantor: return std::vector<B>{};
    case B::OmegaCantor: return std::vector<B>{B::Empty, B::Empty};
    case B::Sphere2FPSphere2: return std::vector<B>{B::Sphere2, B::Sphere2};
    case B::Sphere2FPEmpty: return std::vector<B>{B::Sphere2, B::Empty};
    case B::OmegaSierpFPOmegaSierp: return std::vector<B>{B::OmegaSierpinski, B::OmegaSierpinski};
    case B::Sphere2FPOmegaSierp: return std::vector<B>{B::Sphere2, B::OmegaSierpinski};
    default: return std::nullopt;
  }
}

}  // namespace detail

/// Morse boundary type of the free product of `factors`, with the list of
/// rewrite rules applied.
inline NormalizeResult normalize(const std::vector<Factor>& factors) {
  using B = BoundaryType;
  NormalizeResult res{B::Empty, {}};
  auto& trace = res.trace;

  std::vector<Factor> live;
  int nontrivial_count = 0;
  for (const Factor& f : factors) {
    if (!f.infinite && f.order == 1) {
      trace.push_back("drop trivial factor " + f.name);
      continue;
    }
    live.push_back(f);
    nontrivial_count += f.free_rank > 0 ? f.free_rank : 1;
  }

  if (nontrivial_count == 0) {
    trace.push_back("trivial group: empty boundary");
    res.type = B::Empty;
    return res;
  }
  if (nontrivial_count == 1) {
    trace.push_back("single factor " + live[0].name + ": boundary of the factor");
    res.type = live[0].boundary;
    return res;
  }
  if (nontrivial_count == 2 && live.size() == 2 && !live[0].infinite && !live[1].infinite &&
      live[0].order == 2 && live[1].order == 2) {
    trace.push_back("Z/2 * Z/2 is virtually cyclic: two points");
    res.type = B::TwoPoints;
    return res;
  }
  trace.push_back("infinitely ended free product of " + std::to_string(nontrivial_count) +
                  " factors");

  // Entries of the type multiset with hyperbolicity of the producing factor.
  struct Entry {
    B type;
    bool hyperbolic;
    bool infinite;
  };
  std::vector<Entry> entries;
  for (const Factor& f : live) {
    if (f.free_rank > 0) {
      trace.push_back("expand " + f.name + " into " + std::to_string(f.free_rank) +
                      " infinite cyclic factors");
      continue;
    }
    if (f.virtually_cyclic || !f.infinite) {
      trace.push_back("drop virtually cyclic factor " + f.name);
      continue;
    }
    if (auto parts = detail::constituents(f.boundary)) {
      if (f.boundary == B::OmegaCantor)
        trace.push_back("rewrite omega-Cantor factor " + f.name + " as two empty-boundary factors");
      else
        trace.push_back("expand " + std::string(boundary_name(f.boundary)) + " factor " + f.name +
                        " into its free factors");
      for (B p : *parts) entries.push_back({p, p == B::Sphere2, true});
      continue;
    }
    entries.push_back({f.boundary, f.hyperbolic, f.infinite});
  }

  bool absorbing = std::any_of(entries.begin(), entries.end(), [](const Entry& e) {
    return e.type != B::Empty && !e.hyperbolic && e.infinite;
  });
  std::set<B> types;
  for (const Entry& e : entries) {
    if (e.type == B::Empty && absorbing) continue;
    types.insert(e.type);
  }
  if (absorbing && std::any_of(entries.begin(), entries.end(),
                               [](const Entry& e) { return e.type == B::Empty; }))
    trace.push_back("absorb empty-boundary factors into a non-hyperbolic factor");

  std::string set_text = "{";
  for (B t : types) set_text += (set_text.size() > 1 ? "," : "") + std::string(boundary_name(t));
  set_text += "}";

  const std::set<B> S2{B::Sphere2}, WS{B::OmegaSierpinski}, E{B::Empty},
      S2E{B::Empty, B::Sphere2}, S2WS{B::Sphere2, B::OmegaSierpinski};
  if (types.empty())
    res.type = B::Cantor;
  else if (types == E)
    res.type = B::OmegaCantor;
  else if (types == S2)
    res.type = B::Sphere2FPSphere2;
  else if (types == WS)
    res.type = B::OmegaSierpFPOmegaSierp;
  else if (types == S2E)
    res.type = B::Sphere2FPEmpty;
  else if (types == S2WS)
    res.type = B::Sphere2FPOmegaSierp;
  else if (types.size() == 1 && predicates(*types.begin()).infinitely_ended_realizable)
    res.type = *types.begin();
  else
    throw Error(ErrorCode::UnclassifiedCombination, "type set " + set_text);
  trace.push_back("type set " + set_text + " -> " + std::string(boundary_name(res.type)));
  return res;
}

}  // namespace morse_atlas
