#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "word.hpp"

namespace morse_atlas {

struct WordHash {
  size_t operator()(const Word& w) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (Letter x : w) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct Rule {
  Word lhs;
  Word rhs;
};

struct CompletionLimits {
  size_t max_rules = 2000;
  size_t max_lhs_length = 40;
  int max_rounds = 50;
};

/// Length-reducing-or-shortlex-decreasing string rewriting over the letters
/// of a group presentation. Free cancellation rules are always present.
class RewritingSystem {
 public:
  RewritingSystem() = default;
  explicit RewritingSystem(int generator_count) : gens_(generator_count) {
    for (int i = 1; i <= gens_; ++i) {
      insert({i, -i}, {});
      insert({-i, i}, {});
    }
  }

  /// Seeds with relator -> 1 and runs bounded Knuth-Bendix completion.
  static RewritingSystem from_relators(int generator_count, const std::vector<Word>& relators,
                                       const CompletionLimits& limits = {}) {
    RewritingSystem rs(generator_count);
    for (const Word& r : relators) rs.add_equation(r, {});
    rs.complete(limits);
    return rs;
  }

  /// Explicit rules; each must decrease in shortlex. Not completed.
  static RewritingSystem from_rules(int generator_count, const std::vector<Rule>& rules) {
    RewritingSystem rs(generator_count);
    for (const Rule& r : rules) {
      if (!shortlex_less(r.rhs, r.lhs))
        throw Error(ErrorCode::InvalidInput, "rewriting rule does not decrease in shortlex order");
      rs.insert(r.lhs, r.rhs);
    }
    return rs;
  }

  int generator_count() const { return gens_; }
  const std::vector<Rule>& rules() const { return rules_; }
  bool confluent() const { return confluent_; }

  Word reduce(const Word& w) const {
    Word out;
    Word pending(w.rbegin(), w.rend());
    while (!pending.empty()) {
      out.push_back(pending.back());
      pending.pop_back();
      size_t limit = std::min(max_lhs_, out.size());
      for (size_t len = 1; len <= limit; ++len) {
        Word suffix(out.end() - static_cast<long>(len), out.end());
        auto it = index_.find(suffix);
        if (it == index_.end()) continue;
        const Word& rhs = rules_[it->second].rhs;
        out.resize(out.size() - len);
        pending.insert(pending.end(), rhs.rbegin(), rhs.rend());
        break;
      }
    }
    return out;
  }

  /// Adds u = v oriented by shortlex after reducing both sides. Returns true if
  /// a rule was added.
  bool add_equation(const Word& u, const Word& v) {
    Word a = reduce(u), b = reduce(v);
    if (a == b) return false;
    if (shortlex_less(a, b)) std::swap(a, b);
    insert(a, b);
    return true;
  }

  /// Every critical pair (overlap or inclusion of left-hand sides) joins.
  bool check_confluent() const { return !first_unjoinable().has_value(); }

  /// Bounded completion. Sets confluent() when it terminates cleanly.
  bool complete(const CompletionLimits& limits = {}) {
    for (int round = 0; round < limits.max_rounds; ++round) {
      interreduce();
      bool added = false;
      const size_t n = rules_.size();
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
          for (auto& [x, y] : critical_pairs(rules_[i], rules_[j])) {
            Word a = reduce(x), b = reduce(y);
            if (a == b) continue;
            if (shortlex_less(a, b)) std::swap(a, b);
            if (a.size() > limits.max_lhs_length) return confluent_ = false;
            insert(a, b);
            added = true;
            if (rules_.size() > limits.max_rules) return confluent_ = false;
          }
        }
      }
      if (!added) {
        interreduce();
        confluent_ = check_confluent();
        return confluent_;
      }
    }
    return confluent_ = false;
  }

  /// Marks the system confluent after an explicit critical-pair check.
  bool validate() {
    confluent_ = check_confluent();
    return confluent_;
  }

 private:
  // Both rewrites of the overlap/inclusion words of l1 and l2.
  static std::vector<std::pair<Word, Word>> critical_pairs(const Rule& r1, const Rule& r2) {
    std::vector<std::pair<Word, Word>> out;
    const Word& l1 = r1.lhs;
    const Word& l2 = r2.lhs;
    // suffix of l1 equals prefix of l2
    for (size_t k = 1; k < l1.size() && k < l2.size() + 1; ++k) {
      if (k >= l2.size()) break;
      if (!std::equal(l1.end() - static_cast<long>(k), l1.end(), l2.begin())) continue;
      Word via1 = concat(r1.rhs, Word(l2.begin() + static_cast<long>(k), l2.end()));
      Word via2 = concat(Word(l1.begin(), l1.end() - static_cast<long>(k)), r2.rhs);
      out.emplace_back(std::move(via1), std::move(via2));
    }
    // l2 occurs strictly inside l1
    if (&r1 != &r2 && l2.size() <= l1.size()) {
      for (size_t p = 0; p + l2.size() <= l1.size(); ++p) {
        if (!std::equal(l2.begin(), l2.end(), l1.begin() + static_cast<long>(p))) continue;
        Word via2(l1.begin(), l1.begin() + static_cast<long>(p));
        via2.insert(via2.end(), r2.rhs.begin(), r2.rhs.end());
        via2.insert(via2.end(), l1.begin() + static_cast<long>(p + l2.size()), l1.end());
        out.emplace_back(r1.rhs, std::move(via2));
      }
    }
    return out;
  }

  std::optional<std::pair<Word, Word>> first_unjoinable() const {
    for (const Rule& a : rules_)
      for (const Rule& b : rules_)
        for (auto& [x, y] : critical_pairs(a, b))
          if (reduce(x) != reduce(y)) return std::make_pair(x, y);
    return std::nullopt;
  }

  void insert(const Word& lhs, const Word& rhs) {
    auto it = index_.find(lhs);
    if (it != index_.end()) {
      // keep the smaller right-hand side, the other becomes an equation
      Word old = rules_[it->second].rhs;
      if (old == rhs) return;
      if (shortlex_less(rhs, old)) rules_[it->second].rhs = rhs;
      pending_.push_back({old, rhs});
      return;
    }
    index_[lhs] = rules_.size();
    rules_.push_back({lhs, rhs});
    max_lhs_ = std::max(max_lhs_, lhs.size());
  }

  // Drops rules whose lhs contains another lhs, normalizes right-hand sides,
  // then re-adds the dropped rules and pending equations as equations.
  void interreduce() {
    for (;;) {
      std::vector<std::pair<Word, Word>> equations = std::move(pending_);
      pending_.clear();
      std::vector<Rule> keep;
      for (size_t i = 0; i < rules_.size(); ++i) {
        const Word& li = rules_[i].lhs;
        bool reducible = false;
        for (size_t j = 0; j < rules_.size() && !reducible; ++j) {
          const Word& lj = rules_[j].lhs;
          if (i == j || lj.size() > li.size()) continue;
          reducible = std::search(li.begin(), li.end(), lj.begin(), lj.end()) != li.end();
        }
        if (reducible)
          equations.push_back({li, rules_[i].rhs});
        else
          keep.push_back(rules_[i]);
      }
      rebuild(keep);
      for (Rule& r : rules_) r.rhs = reduce(r.rhs);
      bool added = false;
      for (auto& [u, v] : equations) added = add_equation(u, v) || added;
      if (!added && pending_.empty()) return;
    }
  }

  void rebuild(const std::vector<Rule>& rules) {
    rules_.clear();
    index_.clear();
    max_lhs_ = 0;
    for (const Rule& r : rules) insert(r.lhs, r.rhs);
  }

  int gens_ = 0;
  std::vector<Rule> rules_;
  std::unordered_map<Word, size_t, WordHash> index_;
  std::vector<std::pair<Word, Word>> pending_;
  size_t max_lhs_ = 0;
  bool confluent_ = false;
};

}  // namespace morse_atlas
