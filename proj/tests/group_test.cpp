#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <fstream>
#include <random>
#include <set>

#include "morse_atlas/group.hpp"
#include "morse_atlas/kb.hpp"
#include "morse_atlas/smith.hpp"

using namespace morse_atlas;

namespace {

// Closed form for the number of reduced words of length <= r in F_k.
long free_ball_size(int k, int r) {
  long total = 1, sphere = 2 * k;
  for (int i = 1; i <= r; ++i) {
    total += sphere;
    sphere *= 2 * k - 1;
  }
  return total;
}

// Brute-force BFS over reduced words, independent of the library.
long free_ball_bfs(int k, int r) {
  std::set<Word> seen{{}};
  std::vector<Word> frontier{{}};
  for (int d = 0; d < r; ++d) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (int g = 1; g <= k; ++g)
        for (int x : {g, -g}) {
          if (!w.empty() && w.back() == -x) continue;
          Word u = w;
          u.push_back(x);
          if (seen.insert(u).second) next.push_back(u);
        }
    frontier = next;
  }
  return static_cast<long>(seen.size());
}

// gcd of all k x k minors, for small matrices.
int64_t det(std::vector<std::vector<int64_t>> m) {
  size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  int64_t total = 0;
  for (size_t c = 0; c < n; ++c) {
    std::vector<std::vector<int64_t>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<int64_t> row;
      for (size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(row);
    }
    total += (c % 2 ? -1 : 1) * m[0][c] * det(minor);
  }
  return total;
}

int64_t gcd_of_minors(const IntMatrix& m, size_t k) {
  size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  int64_t g = 0;
  std::vector<size_t> rsel, csel;
  std::function<void(size_t, size_t)> pick_rows, pick_cols;
  pick_cols = [&](size_t start, size_t left) {
    if (left == 0) {
      std::vector<std::vector<int64_t>> sub;
      for (size_t r : rsel) {
        std::vector<int64_t> row;
        for (size_t c : csel) row.push_back(m[r][c]);
        sub.push_back(row);
      }
      g = std::gcd(g, std::llabs(det(sub)));
      return;
    }
    for (size_t c = start; c + left <= cols; ++c) {
      csel.push_back(c);
      pick_cols(c + 1, left - 1);
      csel.pop_back();
    }
  };
  pick_rows = [&](size_t start, size_t left) {
    if (left == 0) {
      pick_cols(0, k);
      return;
    }
    for (size_t r = start; r + left <= rows; ++r) {
      rsel.push_back(r);
      pick_rows(r + 1, left - 1);
      rsel.pop_back();
    }
  };
  pick_rows(0, k);
  return g;
}

}  // namespace

TEST(Word, ParseAndFormat) {
  std::vector<std::string> names{"a", "b"};
  Word w = parse_word("a b^-1 a^2", names);
  EXPECT_EQ(w, (Word{1, -2, 1, 1}));
  EXPECT_EQ(format_word(w, names), "a b^-1 a a");
  EXPECT_TRUE(parse_word("1", names).empty());
  EXPECT_THROW(parse_word("c", names), Error);
  std::vector<std::string> grow{"a"};
  EXPECT_EQ(parse_word("a*c", grow, true), (Word{1, 2}));
  EXPECT_EQ(grow.size(), 2u);
}

TEST(Word, ShortlexOrder) {
  EXPECT_TRUE(shortlex_less({1}, {-1}));
  EXPECT_TRUE(shortlex_less({-1}, {2}));
  EXPECT_TRUE(shortlex_less({2, 2}, {1, 1, 1}));
}

TEST(Rewriting, FreeAbelianCompletes) {
  auto rs = RewritingSystem::from_relators(2, {commutator(1, 2)});
  EXPECT_TRUE(rs.confluent());
  EXPECT_EQ(rs.reduce({2, 1, -2}), (Word{1}));
  EXPECT_EQ(rs.reduce({2, 1}), (Word{1, 2}));
}

TEST(Rewriting, FiniteGroupCompletes) {
  // S3 = <a, b | a^3, b^2, (ab)^2>
  auto rs = RewritingSystem::from_relators(2, {{1, 1, 1}, {2, 2}, {1, 2, 1, 2}});
  ASSERT_TRUE(rs.confluent());
  auto model = RewritingModel(rs);
  auto ball = cayley_ball(model, 10);
  EXPECT_EQ(ball.element.size(), 6u);
}

TEST(Rewriting, DeclaredRulesAreValidated) {
  GroupDescriptor bad = GroupDescriptor::presentation({"a", "b"}, {commutator(1, 2)});
  bad.rules = {{{2, 1}, {1, 2}}};  // missing the inverse-letter rules
  EXPECT_THROW(make_model(bad), Error);
  GroupDescriptor good = bad;
  good.rules = {{{2, 1}, {1, 2}}, {{2, -1}, {-1, 2}}, {{-2, 1}, {1, -2}}, {{-2, -1}, {-1, -2}}};
  auto model = make_model(good);
  EXPECT_EQ(model->normal_form({2, 1, -2, -1}), Word{});
}

TEST(CayleyBall, Examples) {
  EXPECT_EQ(cayley_ball(GroupDescriptor::integers(), 3).element.size(), 7u);
  EXPECT_EQ(cayley_ball(GroupDescriptor::zpow(2), 1).element.size(), 5u);
  EXPECT_EQ(cayley_ball(GroupDescriptor::free(2), 2).element.size(), 17u);
  EXPECT_EQ(free_ball_bfs(2, 2), 17);
}

TEST(CayleyBall, FreeGroupClosedForm) {
  for (int k = 2; k <= 3; ++k)
    for (int r = 0; r <= 5; ++r) {
      long expected = free_ball_size(k, r);
      EXPECT_EQ(free_ball_bfs(k, r), expected);
      EXPECT_EQ(static_cast<long>(cayley_ball(GroupDescriptor::free(k), r).element.size()), expected);
    }
}

TEST(CayleyBall, MonotoneAndEdgesChangeLengthByAtMostOne) {
  std::vector<GroupDescriptor> groups = {
      GroupDescriptor::integers(), GroupDescriptor::zpow(2), GroupDescriptor::zpow(3),
      GroupDescriptor::free(2), GroupDescriptor::cyclic(5),
      GroupDescriptor::free_product({GroupDescriptor::integers(), GroupDescriptor::cyclic(2)}),
      GroupDescriptor::direct_product({GroupDescriptor::free(2), GroupDescriptor::integers()})};
  for (const auto& d : groups) {
    size_t prev = 0;
    for (int r = 0; r <= 4; ++r) {
      auto ball = cayley_ball(d, r);
      EXPECT_GE(ball.element.size(), prev) << d.to_string();
      prev = ball.element.size();
      for (EdgeId e = 0; e < ball.graph.edge_count(); ++e) {
        int a = ball.depth[ball.graph.source(e)], b = ball.depth[ball.graph.target(e)];
        EXPECT_LE(std::abs(a - b), 1);
        EXPECT_EQ(ball.element[ball.graph.source(e)].size(), static_cast<size_t>(a));
      }
    }
  }
}

TEST(CayleyBall, CapsEnforced) {
  BallLimits limits;
  limits.max_radius = 3;
  try {
    cayley_ball(GroupDescriptor::integers(), 4, limits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BallTooLarge);
  }
  limits.max_radius = 10;
  limits.max_cells = 100;
  EXPECT_THROW(cayley_ball(GroupDescriptor::free(2), 6, limits), Error);
  try {
    cayley_ball(GroupDescriptor::symbolic(GroupTag::Sol), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WordProblemUnavailable);
  }
}

TEST(Smith, KnownAbelianizations) {
  EXPECT_EQ(abelianization(2, {commutator(1, 2)}).to_string(), "Z^2");
  EXPECT_EQ(abelianization(1, {Word(6, 1)}).to_string(), "Z/6");
  // <a,b | a^2 b^4, a^4 b^2> -> diag(2, 6)
  auto inv = abelianization(2, {{1, 1, 2, 2, 2, 2}, {1, 1, 1, 1, 2, 2}});
  EXPECT_EQ(inv.rank, 0);
  EXPECT_EQ(inv.torsion, (std::vector<int64_t>{2, 6}));
}

TEST(Smith, MatchesDeterminantalDivisors) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    size_t rows = 1 + rng() % 3, cols = 1 + rng() % 3;
    IntMatrix m(rows, std::vector<int64_t>(cols));
    for (auto& row : m)
      for (auto& x : row) x = static_cast<int64_t>(rng() % 13) - 6;
    auto diag = smith_diagonal(m);
    int64_t prod = 1;
    size_t k = 1;
    for (; k <= std::min(rows, cols); ++k) {
      int64_t d = gcd_of_minors(m, k);
      if (d == 0) break;
      ASSERT_LT(k - 1, diag.size());
      prod *= diag[k - 1];
      EXPECT_EQ(prod, d);
    }
    EXPECT_EQ(diag.size(), k - 1);
    for (size_t i = 1; i < diag.size(); ++i) EXPECT_EQ(diag[i] % diag[i - 1], 0);
  }
}

TEST(KnowledgeBase, PinnedFacts) {
  auto hyp = properties_of(GroupDescriptor::symbolic(GroupTag::ClosedHyperbolic3Mfld));
  EXPECT_EQ(hyp.morse_boundary, BoundaryType::Sphere2);
  auto cusped = properties_of(GroupDescriptor::symbolic(GroupTag::FiniteVolumeHyperbolic3Mfld));
  EXPECT_EQ(cusped.morse_boundary, BoundaryType::OmegaSierpinski);
  EXPECT_EQ(cusped.relative_peripheral_kinds, (std::vector<std::string>{"ZPow"}));
  auto z2 = properties_of(GroupDescriptor::zpow(2));
  EXPECT_EQ(z2.is_wide, Truth::True);
  EXPECT_EQ(z2.morse_boundary, BoundaryType::Empty);
  auto s2r = properties_of(GroupDescriptor::symbolic(GroupTag::S2xR));
  EXPECT_EQ(s2r.is_virtually_cyclic, Truth::True);
  EXPECT_EQ(s2r.morse_boundary, BoundaryType::TwoPoints);
}

TEST(KnowledgeBase, TableInvariants) {
  for (size_t i = 0; i < kGroupTagNames.size(); ++i) {
    auto tag = static_cast<GroupTag>(i);
    if (!is_symbolic(tag)) continue;
    auto p = properties_of(GroupDescriptor::symbolic(tag));
    ASSERT_TRUE(p.morse_boundary.has_value());
    EXPECT_EQ(p.has_empty_morse_boundary == Truth::True, *p.morse_boundary == BoundaryType::Empty);
    if (p.is_infinite == Truth::True && p.is_wide == Truth::True) {
      EXPECT_EQ(p.is_hyperbolic, Truth::False);
    }
  }
}

TEST(KnowledgeBase, ShippedFileMatchesBuiltin) {
  auto file = KnowledgeBase::load(std::string(MORSE_ATLAS_DATA_DIR) + "/group_kb.json");
  std::ifstream in(std::string(MORSE_ATLAS_DATA_DIR) + "/group_kb.json");
  EXPECT_EQ(nlohmann::json::parse(in), KnowledgeBase::builtin().to_json());
  EXPECT_EQ(file.version(), KnowledgeBase::builtin().version());
}

TEST(KnowledgeBase, DeclaredEdgeFacts) {
  const auto& kb = KnowledgeBase::builtin();
  auto z2 = GroupDescriptor::zpow(2);
  auto seifert = GroupDescriptor::symbolic(GroupTag::SeifertFibered);
  EXPECT_EQ(kb.undistorted(z2, seifert), Truth::True);
  EXPECT_EQ(kb.infinite_index(z2, seifert), Truth::True);
  EXPECT_EQ(kb.infinite_index(z2, z2), Truth::False);
  EXPECT_EQ(kb.infinite_index(GroupDescriptor::integers(), z2), Truth::True);
  EXPECT_EQ(kb.undistorted(z2, GroupDescriptor::symbolic(GroupTag::Sol)), Truth::Unknown);
  EXPECT_TRUE(kb.peripheral_kind(GroupDescriptor::symbolic(GroupTag::FiniteVolumeHyperbolic3Mfld), z2));
  EXPECT_FALSE(kb.peripheral_kind(z2, z2));
}

TEST(KnowledgeBase, PresentationEstimates) {
  auto z2 = GroupDescriptor::presentation({"a", "b"}, {commutator(1, 2)});
  auto p = properties_of(z2);
  EXPECT_EQ(p.is_infinite, Truth::True);
  EXPECT_TRUE(p.estimated);
  EXPECT_EQ(p.is_wide, Truth::Unknown);
  auto s3 = GroupDescriptor::presentation({"a", "b"}, {{1, 1, 1}, {2, 2}, {1, 2, 1, 2}});
  auto q = properties_of(s3);
  EXPECT_EQ(q.is_infinite, Truth::False);
  EXPECT_EQ(q.order, 6);
  EXPECT_FALSE(q.estimated);
}
