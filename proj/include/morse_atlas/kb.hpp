#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boundary.hpp"
#include "error.hpp"
#include "group.hpp"

namespace morse_atlas {

enum class Truth { False, True, Unknown };

inline std::string_view truth_name(Truth t) {
  return t == Truth::True ? "true" : t == Truth::False ? "false" : "unknown";
}
inline Truth truth_of(bool b) { return b ? Truth::True : Truth::False; }

struct GroupProperties {
  Truth is_infinite = Truth::Unknown;
  Truth is_virtually_cyclic = Truth::Unknown;
  Truth is_hyperbolic = Truth::Unknown;
  Truth is_wide = Truth::Unknown;
  Truth has_empty_morse_boundary = Truth::Unknown;
  std::optional<BoundaryType> morse_boundary;
  std::vector<std::string> relative_peripheral_kinds;
  std::optional<int64_t> order;  // for finite groups
  // is_infinite came from ball growth rather than the table.
  bool estimated = false;
  int estimate_radius = 0;
};

// Shipped copy of data/group_kb.json; a test keeps the two identical.
inline constexpr const char* kBuiltinGroupKb = R"KB({
  "schema_version": 1,
  "kb_version": "1.0.0",
  "groups": {
    "Trivial": {"infinite": false, "virtually_cyclic": true, "hyperbolic": true, "wide": false, "morse_boundary": "Empty", "peripheral_kinds": []},
    "FiniteCyclic": {"infinite": false, "virtually_cyclic": true, "hyperbolic": true, "wide": false, "morse_boundary": "Empty", "peripheral_kinds": []},
    "Z": {"infinite": true, "virtually_cyclic": true, "hyperbolic": true, "wide": false, "morse_boundary": "TwoPoints", "peripheral_kinds": []},
    "ZPow": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": []},
    "Free": {"infinite": true, "virtually_cyclic": false, "hyperbolic": true, "wide": false, "morse_boundary": "Cantor", "peripheral_kinds": []},
    "ClosedHyperbolic3Mfld": {"infinite": true, "virtually_cyclic": false, "hyperbolic": true, "wide": false, "morse_boundary": "Sphere2", "peripheral_kinds": []},
    "FiniteVolumeHyperbolic3Mfld": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": false, "morse_boundary": "OmegaSierpinski", "peripheral_kinds": ["ZPow"],
      "note": "hyperbolic relative to its rank-2 cusp subgroups"},
    "SeifertFibered": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": [],
      "note": "JSJ piece with non-hyperbolic geometry; satisfies a law up to finite index"},
    "Sol": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": []},
    "Nil": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": []},
    "H2xR": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": []},
    "PSL2Rtilde": {"infinite": true, "virtually_cyclic": false, "hyperbolic": false, "wide": true, "morse_boundary": "Empty", "peripheral_kinds": []},
    "S2xR": {"infinite": true, "virtually_cyclic": true, "hyperbolic": true, "wide": false, "morse_boundary": "TwoPoints", "peripheral_kinds": [],
      "note": "fundamental group of a prime S2xR manifold is virtually infinite cyclic"}
  },
  "undistorted": [
    {"subgroup": "Trivial", "host": "*"},
    {"subgroup": "FiniteCyclic", "host": "*"},
    {"subgroup": "Z", "host": "Z"},
    {"subgroup": "Z", "host": "ZPow"},
    {"subgroup": "ZPow", "host": "ZPow"},
    {"subgroup": "Z", "host": "Free"},
    {"subgroup": "Z", "host": "ClosedHyperbolic3Mfld"},
    {"subgroup": "ZPow", "host": "SeifertFibered", "note": "JSJ tori are undistorted in 3-manifold groups"},
    {"subgroup": "ZPow", "host": "FiniteVolumeHyperbolic3Mfld", "note": "cusp subgroups are undistorted"}
  ],
  "infinite_index": [
    {"subgroup": "Trivial", "host": "*", "rule": "host_infinite"},
    {"subgroup": "FiniteCyclic", "host": "*", "rule": "host_infinite"},
    {"subgroup": "Z", "host": "Z", "rule": "never"},
    {"subgroup": "Z", "host": "ZPow", "rule": "always"},
    {"subgroup": "ZPow", "host": "ZPow", "rule": "rank_less"},
    {"subgroup": "Z", "host": "Free", "rule": "always"},
    {"subgroup": "Z", "host": "ClosedHyperbolic3Mfld", "rule": "always"},
    {"subgroup": "ZPow", "host": "SeifertFibered", "rule": "always"},
    {"subgroup": "ZPow", "host": "FiniteVolumeHyperbolic3Mfld", "rule": "always"}
  ]
})KB";

class KnowledgeBase {
 public:
  struct Entry {
    bool infinite, virtually_cyclic, hyperbolic, wide;
    BoundaryType boundary;
    std::vector<std::string> peripheral_kinds;
  };
  struct PairRule {
    std::string subgroup, host, rule;
  };

  static KnowledgeBase from_json(const nlohmann::json& j) {
    KnowledgeBase kb;
    try {
      if (j.at("schema_version").get<int>() != 1)
        throw Error(ErrorCode::InvalidInput, "unsupported KB schema_version");
      kb.version_ = j.at("kb_version").get<std::string>();
      for (auto& [name, v] : j.at("groups").items()) {
        GroupTag tag = parse_tag(name);
        kb.table_[tag] = Entry{v.at("infinite").get<bool>(), v.at("virtually_cyclic").get<bool>(),
                               v.at("hyperbolic").get<bool>(), v.at("wide").get<bool>(),
                               parse_boundary(v.at("morse_boundary").get<std::string>()),
                               v.at("peripheral_kinds").get<std::vector<std::string>>()};
      }
      for (auto& r : j.at("undistorted"))
        kb.undistorted_.push_back({r.at("subgroup"), r.at("host"), "declared"});
      for (auto& r : j.at("infinite_index"))
        kb.infinite_index_.push_back({r.at("subgroup"), r.at("host"), r.at("rule")});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("group KB: ") + e.what());
    }
    kb.check();
    return kb;
  }

  static KnowledgeBase load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
  }

  static const KnowledgeBase& builtin() {
    static const KnowledgeBase kb = from_json(nlohmann::json::parse(kBuiltinGroupKb));
    return kb;
  }

  const std::string& version() const { return version_; }

  GroupProperties properties_of(const GroupDescriptor& d) const {
    switch (d.tag) {
      case GroupTag::Presentation: return presentation_properties(d);
      case GroupTag::FreeProduct: return free_product_properties(d);
      case GroupTag::DirectProduct: return direct_product_properties(d);
      default: break;
    }
    auto it = table_.find(d.tag);
    if (it == table_.end()) return {};
    const Entry& e = it->second;
    GroupProperties p;
    p.is_infinite = truth_of(e.infinite);
    p.is_virtually_cyclic = truth_of(e.virtually_cyclic);
    p.is_hyperbolic = truth_of(e.hyperbolic);
    p.is_wide = truth_of(e.wide);
    p.morse_boundary = e.boundary;
    p.has_empty_morse_boundary = truth_of(e.boundary == BoundaryType::Empty);
    p.relative_peripheral_kinds = e.peripheral_kinds;
    if (d.tag == GroupTag::Trivial) p.order = 1;
    if (d.tag == GroupTag::FiniteCyclic) p.order = d.param;
    return p;
  }

  /// Declared fact: `sub` is undistorted in `host`. Unknown when undeclared.
  Truth undistorted(const GroupDescriptor& sub, const GroupDescriptor& host) const {
    for (const auto& r : undistorted_)
      if (matches(r.subgroup, sub) && matches(r.host, host)) return Truth::True;
    return Truth::Unknown;
  }

  Truth infinite_index(const GroupDescriptor& sub, const GroupDescriptor& host) const {
    for (const auto& r : infinite_index_) {
      if (!matches(r.subgroup, sub) || !matches(r.host, host)) continue;
      if (r.rule == "always") return Truth::True;
      if (r.rule == "never") return Truth::False;
      if (r.rule == "rank_less") return truth_of(rank(sub) < rank(host));
      if (r.rule == "host_infinite") return properties_of(host).is_infinite;
    }
    return Truth::Unknown;
  }

  /// `sub` can be one of the peripheral subgroups `host` is hyperbolic
  /// relative to.
  bool peripheral_kind(const GroupDescriptor& host, const GroupDescriptor& sub) const {
    if (sub.tag == GroupTag::Trivial) return true;
    auto p = properties_of(host);
    for (const auto& k : p.relative_peripheral_kinds)
      if (k == tag_name(sub.tag)) return true;
    return false;
  }

  nlohmann::json to_json() const { return nlohmann::json::parse(kBuiltinGroupKb); }

 private:
  static bool matches(const std::string& pattern, const GroupDescriptor& d) {
    return pattern == "*" || pattern == tag_name(d.tag);
  }

  static int rank(const GroupDescriptor& d) {
    switch (d.tag) {
      case GroupTag::Z: return 1;
      case GroupTag::ZPow: return d.param;
      default: return 0;
    }
  }

  void check() const {
    for (const auto& [tag, e] : table_) {
      if (e.wide && e.infinite && e.hyperbolic)
        throw Error(ErrorCode::InternalTableError, std::string(tag_name(tag)) + " wide and hyperbolic");
      if (!e.infinite && e.boundary != BoundaryType::Empty)
        throw Error(ErrorCode::InternalTableError, std::string(tag_name(tag)) + " finite with boundary");
    }
  }

  GroupProperties presentation_properties(const GroupDescriptor& d) const {
    GroupProperties p;
    std::shared_ptr<const GroupModel> model;
    try {
      model = make_model(d);
    } catch (const Error&) {
      return p;
    }
    constexpr int kRadius = 8;
    BallLimits limits;
    limits.max_cells = 200000;
    try {
      auto ball = cayley_ball(*model, kRadius, limits);
      int max_depth = *std::max_element(ball.depth.begin(), ball.depth.end());
      if (max_depth < kRadius) {
        // the ball closed up: the group is finite and fully enumerated
        p.is_infinite = Truth::False;
        p.order = static_cast<int64_t>(ball.element.size());
        p.is_virtually_cyclic = Truth::True;
        p.is_hyperbolic = Truth::True;
        p.is_wide = Truth::False;
        p.morse_boundary = BoundaryType::Empty;
        p.has_empty_morse_boundary = Truth::True;
        return p;
      }
    } catch (const Error&) {
      // too many cells within the radius: certainly not closed up
    }
    p.is_infinite = Truth::True;
    p.estimated = true;
    p.estimate_radius = kRadius;
    return p;
  }

  GroupProperties free_product_properties(const GroupDescriptor& d) const {
    std::vector<Factor> factors;
    GroupProperties p;
    bool all_known = true;
    for (const auto& f : d.factors) {
      auto q = properties_of(f);
      if (q.estimated || !q.morse_boundary || q.is_infinite == Truth::Unknown) all_known = false;
      if (!all_known) break;
      factors.push_back(factor_of(f, q));
    }
    if (!all_known) return p;
    auto res = normalize(factors);
    int nontrivial = 0;
    bool all_hyperbolic = true;
    bool z2z2 = factors.size() == 2;
    for (const Factor& f : factors) {
      if (f.infinite || f.order > 1) nontrivial += f.free_rank ? f.free_rank : 1;
      all_hyperbolic = all_hyperbolic && f.hyperbolic;
      z2z2 = z2z2 && !f.infinite && f.order == 2;
    }
    p.morse_boundary = res.type;
    p.has_empty_morse_boundary = truth_of(res.type == BoundaryType::Empty);
    p.is_hyperbolic = truth_of(all_hyperbolic);
    if (nontrivial <= 1) {
      for (size_t i = 0; i < factors.size(); ++i)
        if (factors[i].infinite || factors[i].order > 1) return properties_of(d.factors[i]);
      p.is_infinite = Truth::False;
      p.order = 1;
      p.is_virtually_cyclic = Truth::True;
      p.is_wide = Truth::False;
      return p;
    }
    p.is_infinite = Truth::True;
    p.is_virtually_cyclic = truth_of(z2z2);
    p.is_wide = Truth::False;
    return p;
  }

  GroupProperties direct_product_properties(const GroupDescriptor& d) const {
    GroupProperties p;
    int infinite = 0;
    int64_t order = 1;
    for (const auto& f : d.factors) {
      auto q = properties_of(f);
      if (q.is_infinite == Truth::Unknown || q.estimated) return GroupProperties{};
      if (q.is_infinite == Truth::True)
        ++infinite;
      else
        order *= q.order.value_or(1);
    }
    if (infinite == 0) {
      p.is_infinite = Truth::False;
      p.order = order;
      p.is_virtually_cyclic = Truth::True;
      p.is_hyperbolic = Truth::True;
      p.is_wide = Truth::False;
      p.morse_boundary = BoundaryType::Empty;
      p.has_empty_morse_boundary = Truth::True;
      return p;
    }
    if (infinite == 1) {
      // finite extension of the infinite factor: same coarse geometry
      for (const auto& f : d.factors) {
        auto q = properties_of(f);
        if (q.is_infinite == Truth::True) {
          q.order.reset();
          return q;
        }
      }
    }
    // a product of two infinite groups is wide
    p.is_infinite = Truth::True;
    p.is_virtually_cyclic = Truth::False;
    p.is_hyperbolic = Truth::False;
    p.is_wide = Truth::True;
    p.morse_boundary = BoundaryType::Empty;
    p.has_empty_morse_boundary = Truth::True;
    return p;
  }

 public:
  static Factor factor_of(const GroupDescriptor& d, const GroupProperties& p) {
    Factor f;
    f.name = d.to_string();
    f.boundary = p.morse_boundary.value_or(BoundaryType::Empty);
    f.infinite = p.is_infinite == Truth::True;
    f.virtually_cyclic = p.is_virtually_cyclic == Truth::True;
    f.hyperbolic = p.is_hyperbolic == Truth::True;
    f.order = p.order.value_or(0);
    f.free_rank = d.tag == GroupTag::Free ? d.param : 0;
    return f;
  }

 private:
  std::string version_;
  std::map<GroupTag, Entry> table_;
  std::vector<PairRule> undistorted_;
  std::vector<PairRule> infinite_index_;
};

inline GroupProperties properties_of(const GroupDescriptor& d) {
  return KnowledgeBase::builtin().properties_of(d);
}

}  // namespace morse_atlas
