#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rewriting.hpp"
#include "word.hpp"

namespace morse_atlas {

enum class GroupTag {
  Trivial,
  FiniteCyclic,
  Z,
  ZPow,
  Free,
  ClosedHyperbolic3Mfld,
  FiniteVolumeHyperbolic3Mfld,
  SeifertFibered,
  Sol,
  Nil,
  H2xR,
  PSL2Rtilde,
  S2xR,
  Presentation,
  FreeProduct,
  DirectProduct,
};

inline constexpr std::array<std::string_view, 16> kGroupTagNames = {
    "Trivial", "FiniteCyclic", "Z",    "ZPow", "Free",       "ClosedHyperbolic3Mfld",
    "FiniteVolumeHyperbolic3Mfld",     "SeifertFibered", "Sol", "Nil", "H2xR", "PSL2Rtilde",
    "S2xR",    "Presentation", "FreeProduct", "DirectProduct"};

inline std::string_view tag_name(GroupTag t) { return kGroupTagNames[static_cast<int>(t)]; }

inline GroupTag parse_tag(std::string_view name) {
  for (size_t i = 0; i < kGroupTagNames.size(); ++i)
    if (kGroupTagNames[i] == name) return static_cast<GroupTag>(i);
  throw Error(ErrorCode::ParseError, "unknown group tag '" + std::string(name) + "'");
}

// Tags standing for a 3-manifold group known only by its geometry.
inline bool is_symbolic(GroupTag t) {
  switch (t) {
    case GroupTag::ClosedHyperbolic3Mfld:
    case GroupTag::FiniteVolumeHyperbolic3Mfld:
    case GroupTag::SeifertFibered:
    case GroupTag::Sol:
    case GroupTag::Nil:
    case GroupTag::H2xR:
    case GroupTag::PSL2Rtilde:
    case GroupTag::S2xR:
      return true;
    default:
      return false;
  }
}

inline std::vector<std::string> default_generator_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i)
    names.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i + 1));
  return names;
}

/// A group given by tag, with generator names and whatever relators are known.
/// `complete` is false when the relators do not present the group (symbolic
/// tags, where generators only name elements used by edge injections).
struct GroupDescriptor {
  GroupTag tag = GroupTag::Trivial;
  int param = 0;
  std::vector<std::string> generators;
  std::vector<Word> relators;
  bool complete = true;
  std::vector<Rule> rules;
  std::vector<GroupDescriptor> factors;

  int generator_count() const { return static_cast<int>(generators.size()); }

  static GroupDescriptor trivial() { return {}; }

  static GroupDescriptor cyclic(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidInput, "FiniteCyclic order must be >= 1");
    if (n == 1) return trivial();
    GroupDescriptor d;
    d.tag = GroupTag::FiniteCyclic;
    d.param = n;
    d.generators = {"a"};
    d.relators = {Word(n, 1)};
    return d;
  }

  static GroupDescriptor integers() {
    GroupDescriptor d;
    d.tag = GroupTag::Z;
    d.param = 1;
    d.generators = {"a"};
    return d;
  }

  static GroupDescriptor zpow(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidInput, "ZPow rank must be >= 2");
    GroupDescriptor d;
    d.tag = GroupTag::ZPow;
    d.param = n;
    d.generators = default_generator_names(n);
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) d.relators.push_back(commutator(i, j));
    return d;
  }

  static GroupDescriptor free(int rank) {
    if (rank < 2) throw Error(ErrorCode::InvalidInput, "Free rank must be >= 2");
    GroupDescriptor d;
    d.tag = GroupTag::Free;
    d.param = rank;
    d.generators = default_generator_names(rank);
    return d;
  }

  static GroupDescriptor symbolic(GroupTag tag, std::vector<std::string> generators = {}) {
    if (!is_symbolic(tag))
      throw Error(ErrorCode::InvalidInput, std::string(tag_name(tag)) + " is not a symbolic tag");
    GroupDescriptor d;
    d.tag = tag;
    d.generators = std::move(generators);
    d.complete = false;
    return d;
  }

  static GroupDescriptor presentation(std::vector<std::string> generators, std::vector<Word> relators,
                                      bool complete = true) {
    GroupDescriptor d;
    d.tag = GroupTag::Presentation;
    d.generators = std::move(generators);
    d.relators = std::move(relators);
    d.complete = complete;
    return d;
  }

  static GroupDescriptor product(GroupTag tag, std::vector<GroupDescriptor> factors) {
    GroupDescriptor d;
    d.tag = tag;
    d.factors = std::move(factors);
    int offset = 0;
    for (size_t i = 0; i < d.factors.size(); ++i) {
      const auto& f = d.factors[i];
      for (const auto& g : f.generators) d.generators.push_back("f" + std::to_string(i) + "." + g);
      for (const Word& r : f.relators) d.relators.push_back(shift(r, offset));
      d.complete = d.complete && f.complete;
      offset += f.generator_count();
    }
    if (tag == GroupTag::DirectProduct) {
      int a = 0;
      for (size_t i = 0; i < d.factors.size(); ++i) {
        int b = a + d.factors[i].generator_count();
        for (int j = b; j < offset; ++j)
          for (int x = a; x < b; ++x) d.relators.push_back(commutator(x + 1, j + 1));
        a = b;
      }
    }
    return d;
  }

  static GroupDescriptor free_product(std::vector<GroupDescriptor> factors) {
    return product(GroupTag::FreeProduct, std::move(factors));
  }
  static GroupDescriptor direct_product(std::vector<GroupDescriptor> factors) {
    return product(GroupTag::DirectProduct, std::move(factors));
  }

  std::string to_string() const {
    switch (tag) {
      case GroupTag::FiniteCyclic:
      case GroupTag::ZPow:
      case GroupTag::Free:
        return std::string(tag_name(tag)) + "(" + std::to_string(param) + ")";
      case GroupTag::Presentation: {
        std::string s = "<";
        for (size_t i = 0; i < generators.size(); ++i) s += (i ? "," : "") + generators[i];
        s += " | ";
        for (size_t i = 0; i < relators.size(); ++i)
          s += (i ? ", " : "") + format_word(relators[i], generators);
        return s + ">";
      }
      case GroupTag::FreeProduct:
      case GroupTag::DirectProduct: {
        std::string s = std::string(tag_name(tag)) + "(";
        for (size_t i = 0; i < factors.size(); ++i) s += (i ? ", " : "") + factors[i].to_string();
        return s + ")";
      }
      default:
        return std::string(tag_name(tag));
    }
  }

  // Same group up to generator naming.
  bool same_kind(const GroupDescriptor& o) const {
    if (tag != o.tag || param != o.param || factors.size() != o.factors.size()) return false;
    if (tag == GroupTag::Presentation)
      return generators.size() == o.generators.size() && relators == o.relators;
    for (size_t i = 0; i < factors.size(); ++i)
      if (!factors[i].same_kind(o.factors[i])) return false;
    return true;
  }

  bool operator==(const GroupDescriptor& o) const {
    return tag == o.tag && param == o.param && generators == o.generators &&
           relators == o.relators && complete == o.complete && factors == o.factors &&
           rules.size() == o.rules.size() &&
           std::equal(rules.begin(), rules.end(), o.rules.begin(), [](const Rule& a, const Rule& b) {
             return a.lhs == b.lhs && a.rhs == b.rhs;
           });
  }
};

/// Solves the word problem by a canonical geodesic representative.
class GroupModel {
 public:
  virtual ~GroupModel() = default;
  virtual int generator_count() const = 0;
  virtual Word normal_form(const Word& w) const = 0;
  virtual bool abelian() const { return false; }
};

/// Finitely generated abelian group Z^a x prod Z/n_i with one generator per
/// cyclic factor; order 0 means infinite.
class AbelianModel : public GroupModel {
 public:
  explicit AbelianModel(std::vector<int64_t> orders) : orders_(std::move(orders)) {}

  int generator_count() const override { return static_cast<int>(orders_.size()); }
  bool abelian() const override { return true; }
  const std::vector<int64_t>& orders() const { return orders_; }

  std::vector<int64_t> exponents(const Word& w) const {
    std::vector<int64_t> e(orders_.size(), 0);
    for (Letter x : w) e[gen_index(x)] += x > 0 ? 1 : -1;
    return canonical(e);
  }

  // Representative of each coordinate in (-n/2, n/2].
  std::vector<int64_t> canonical(std::vector<int64_t> e) const {
    for (size_t i = 0; i < e.size(); ++i) {
      int64_t n = orders_[i];
      if (n == 0) continue;
      e[i] %= n;
      if (e[i] < 0) e[i] += n;
      if (2 * e[i] > n) e[i] -= n;
    }
    return e;
  }

  Word word_of(const std::vector<int64_t>& e) const {
    Word out;
    for (size_t i = 0; i < e.size(); ++i) {
      Letter x = static_cast<Letter>(i) + 1;
      for (int64_t k = 0; k < std::llabs(e[i]); ++k) out.push_back(e[i] > 0 ? x : -x);
    }
    return out;
  }

  Word normal_form(const Word& w) const override { return word_of(exponents(w)); }

 private:
  std::vector<int64_t> orders_;
};

class FreeModel : public GroupModel {
 public:
  explicit FreeModel(int rank) : rank_(rank) {}
  int generator_count() const override { return rank_; }
  Word normal_form(const Word& w) const override { return free_reduce(w); }

 private:
  int rank_;
};

class RewritingModel : public GroupModel {
 public:
  explicit RewritingModel(RewritingSystem rs) : rs_(std::move(rs)) {}
  int generator_count() const override { return rs_.generator_count(); }
  Word normal_form(const Word& w) const override { return rs_.reduce(w); }
  const RewritingSystem& system() const { return rs_; }

 private:
  RewritingSystem rs_;
};

/// Alphabet is the concatenation of the factor alphabets.
class ProductModel : public GroupModel {
 public:
  ProductModel(std::vector<std::shared_ptr<const GroupModel>> factors, bool direct)
      : factors_(std::move(factors)), direct_(direct) {
    int offset = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(offset);
      offset += f->generator_count();
    }
    total_ = offset;
    for (size_t i = 0; i < factors_.size(); ++i)
      for (int j = 0; j < factors_[i]->generator_count(); ++j) owner_.push_back(static_cast<int>(i));
  }

  int generator_count() const override { return total_; }
  bool abelian() const override {
    return direct_ && std::all_of(factors_.begin(), factors_.end(),
                                  [](const auto& f) { return f->abelian(); });
  }

  Word normal_form(const Word& w) const override {
    if (direct_) {
      std::vector<Word> parts(factors_.size());
      for (Letter x : w) {
        int i = owner_[gen_index(x)];
        parts[i].push_back(x > 0 ? x - offsets_[i] : x + offsets_[i]);
      }
      Word out;
      for (size_t i = 0; i < factors_.size(); ++i)
        out = concat(out, shift(factors_[i]->normal_form(parts[i]), offsets_[i]));
      return out;
    }
    // free product: stack of reduced syllables
    std::vector<std::pair<int, Word>> syllables;
    for (Letter x : w) {
      int i = owner_[gen_index(x)];
      Letter local = x > 0 ? x - offsets_[i] : x + offsets_[i];
      if (!syllables.empty() && syllables.back().first == i) {
        Word s = factors_[i]->normal_form(concat(syllables.back().second, {local}));
        if (s.empty())
          syllables.pop_back();
        else
          syllables.back().second = std::move(s);
      } else {
        Word s = factors_[i]->normal_form({local});
        if (!s.empty()) syllables.push_back({i, std::move(s)});
      }
    }
    Word out;
    for (auto& [i, s] : syllables) out = concat(out, shift(s, offsets_[i]));
    return out;
  }

 private:
  std::vector<std::shared_ptr<const GroupModel>> factors_;
  std::vector<int> offsets_;
  std::vector<int> owner_;
  int total_ = 0;
  bool direct_;
};

/// Model with a usable normal form, or WordProblemUnavailable.
inline std::shared_ptr<const GroupModel> make_model(const GroupDescriptor& d,
                                                    const CompletionLimits& limits = {}) {
  switch (d.tag) {
    case GroupTag::Trivial:
      if (d.generator_count() == 0) return std::make_shared<AbelianModel>(std::vector<int64_t>{});
      return std::make_shared<AbelianModel>(std::vector<int64_t>(d.generator_count(), 1));
    case GroupTag::FiniteCyclic:
      return std::make_shared<AbelianModel>(std::vector<int64_t>{d.param});
    case GroupTag::Z:
      return std::make_shared<AbelianModel>(std::vector<int64_t>{0});
    case GroupTag::ZPow:
      return std::make_shared<AbelianModel>(std::vector<int64_t>(d.param, 0));
    case GroupTag::Free:
      return std::make_shared<FreeModel>(d.param);
    case GroupTag::FreeProduct:
    case GroupTag::DirectProduct: {
      std::vector<std::shared_ptr<const GroupModel>> parts;
      for (const auto& f : d.factors) parts.push_back(make_model(f, limits));
      return std::make_shared<ProductModel>(std::move(parts), d.tag == GroupTag::DirectProduct);
    }
    case GroupTag::Presentation: {
      if (!d.complete)
        throw Error(ErrorCode::WordProblemUnavailable, "presentation is incomplete");
      if (!d.rules.empty()) {
        auto rs = RewritingSystem::from_rules(d.generator_count(), d.rules);
        if (!rs.validate())
          throw Error(ErrorCode::NotConfluent, "declared rewriting rules are not confluent");
        return std::make_shared<RewritingModel>(std::move(rs));
      }
      auto rs = RewritingSystem::from_relators(d.generator_count(), d.relators, limits);
      if (!rs.confluent())
        throw Error(ErrorCode::WordProblemUnavailable,
                    "completion did not produce a confluent system for " + d.to_string());
      return std::make_shared<RewritingModel>(std::move(rs));
    }
    default:
      throw Error(ErrorCode::WordProblemUnavailable,
                  std::string(tag_name(d.tag)) + " has no built-in normal form");
  }
}

struct BallLimits {
  int max_radius = 64;
  size_t max_cells = 1000000;
};

/// Ball in a Cayley graph: one vertex per element, one edge pair per
/// (element, positive generator). edge_letter[e] is the letter read along e.
struct CayleyBall {
  Graph graph;
  std::vector<Word> element;
  std::vector<Letter> edge_letter;
  std::vector<int> depth;
  std::vector<std::string> generators;
  int basepoint = 0;
  int radius = 0;

  int find(const Word& nf) const {
    for (size_t i = 0; i < element.size(); ++i)
      if (element[i] == nf) return static_cast<int>(i);
    return -1;
  }
};

/// Ball with respect to the generating set `gens` (elements given as words);
/// edge_letter[e] = +(i+1) when e multiplies by gens[i] on the right.
inline CayleyBall cayley_ball(const GroupModel& model, const std::vector<Word>& gens, int radius,
                              const BallLimits& limits = {}, std::vector<std::string> names = {}) {
  if (radius < 0) throw Error(ErrorCode::InvalidInput, "negative radius");
  if (radius > limits.max_radius)
    throw Error(ErrorCode::BallTooLarge, "radius " + std::to_string(radius) + " exceeds cap " +
                                             std::to_string(limits.max_radius));
  CayleyBall ball;
  ball.radius = radius;
  ball.generators = std::move(names);
  std::unordered_map<Word, int, WordHash> index;
  std::deque<int> queue;
  auto visit = [&](const Word& w, int d) {
    auto [it, fresh] = index.emplace(w, static_cast<int>(ball.element.size()));
    if (fresh) {
      if (ball.element.size() >= limits.max_cells)
        throw Error(ErrorCode::BallTooLarge, "more than " + std::to_string(limits.max_cells) + " cells");
      ball.element.push_back(w);
      ball.depth.push_back(d);
      ball.graph.add_vertex();
      queue.push_back(it->second);
    }
  };
  std::vector<Word> moves;
  for (const Word& s : gens) {
    moves.push_back(s);
    moves.push_back(inverse(s));
  }
  visit({}, 0);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (ball.depth[v] == radius) continue;
    for (const Word& m : moves) visit(model.normal_form(concat(ball.element[v], m)), ball.depth[v] + 1);
  }
  for (int v = 0; v < static_cast<int>(ball.element.size()); ++v) {
    for (size_t i = 0; i < gens.size(); ++i) {
      auto it = index.find(model.normal_form(concat(ball.element[v], gens[i])));
      if (it == index.end()) continue;
      ball.graph.add_edge(v, it->second);
      ball.edge_letter.push_back(static_cast<Letter>(i) + 1);
      ball.edge_letter.push_back(-static_cast<Letter>(i) - 1);
    }
  }
  return ball;
}

inline std::vector<Word> standard_generators(int n) {
  std::vector<Word> gens;
  for (int i = 1; i <= n; ++i) gens.push_back({i});
  return gens;
}

inline CayleyBall cayley_ball(const GroupModel& model, int radius, const BallLimits& limits = {},
                              std::vector<std::string> names = {}) {
  return cayley_ball(model, standard_generators(model.generator_count()), radius, limits, std::move(names));
}

inline CayleyBall cayley_ball(const GroupDescriptor& d, int radius, const BallLimits& limits = {}) {
  return cayley_ball(*make_model(d), radius, limits, d.generators);
}

}  // namespace morse_atlas
