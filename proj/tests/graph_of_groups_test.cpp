#include <gtest/gtest.h>

#include <random>
#include <set>

#include "morse_atlas/graph_of_groups.hpp"

using namespace morse_atlas;

namespace {

GroupDescriptor renamed(GroupDescriptor d, std::vector<std::string> names) {
  d.generators = std::move(names);
  return d;
}

// <a,b | [a,b]> amalgamated with <b,c | [b,c]> over <b>.
GraphOfGroups g1() {
  GraphOfGroups gog;
  gog.add_vertex(renamed(GroupDescriptor::zpow(2), {"a", "b"}));
  gog.add_vertex(renamed(GroupDescriptor::zpow(2), {"b", "c"}));
  gog.add_edge_named(0, 1, GroupDescriptor::integers(), {"b"}, {"b"});
  return gog;
}

GraphOfGroups z_path(int n) {
  GraphOfGroups gog;
  for (int i = 0; i < n; ++i) gog.add_vertex(GroupDescriptor::integers());
  for (int i = 0; i + 1 < n; ++i) gog.add_edge(i, i + 1, GroupDescriptor::trivial(), {}, {});
  return gog;
}

GroupDescriptor random_group(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0:
      return GroupDescriptor::integers();
    case 1:
      return GroupDescriptor::zpow(2);
    default:
      return GroupDescriptor::free(2);
  }
}

Word random_nontrivial(std::mt19937& rng, int gens) {
  Word w;
  int len = 1 + static_cast<int>(rng() % 2);
  for (int i = 0; i < len; ++i) {
    Letter x = 1 + static_cast<Letter>(rng() % gens);
    w.push_back(rng() % 2 ? x : -x);
  }
  w = free_reduce(w);
  return w.empty() ? Word{1} : w;
}

GraphOfGroups random_gog(std::mt19937& rng) {
  GraphOfGroups gog;
  int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) gog.add_vertex(random_group(rng));
  auto add = [&](int s, int t) {
    if (rng() % 2) {
      gog.add_edge(s, t, GroupDescriptor::trivial(), {}, {});
    } else {
      gog.add_edge(s, t, GroupDescriptor::integers(),
                   {random_nontrivial(rng, gog.vertex_group[s].generator_count())},
                   {random_nontrivial(rng, gog.vertex_group[t].generator_count())});
    }
  };
  for (int v = 1; v < n; ++v) add(static_cast<int>(rng() % v), v);
  int extra = static_cast<int>(rng() % 2);
  for (int k = 0; k < extra; ++k) add(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
  return gog;
}

// Random connected vertex set grown from a random seed vertex.
std::vector<VertexId> random_connected_set(std::mt19937& rng, const Graph& g) {
  std::vector<VertexId> set{static_cast<VertexId>(rng() % g.vertex_count())};
  int target = 1 + static_cast<int>(rng() % g.vertex_count());
  while (static_cast<int>(set.size()) < target) {
    std::vector<VertexId> frontier;
    for (VertexId v : set)
      for (EdgeId e : g.out_edges(v))
        if (std::find(set.begin(), set.end(), g.target(e)) == set.end()) frontier.push_back(g.target(e));
    if (frontier.empty()) break;
    set.push_back(frontier[rng() % frontier.size()]);
  }
  return set;
}

}  // namespace

TEST(FundamentalPresentation, SingleVertex) {
  GraphOfGroups gog;
  gog.add_vertex(GroupDescriptor::integers());
  auto fp = fundamental_presentation(gog);
  EXPECT_EQ(fp.presentation.generator_count(), 1);
  EXPECT_TRUE(fp.presentation.relators.empty());
}

TEST(FundamentalPresentation, TrivialEdgeIsFreeProduct) {
  auto fp = fundamental_presentation(z_path(2));
  EXPECT_EQ(fp.presentation.generators, (std::vector<std::string>{"v0.a", "v1.a"}));
  EXPECT_TRUE(fp.presentation.relators.empty());
}

TEST(FundamentalPresentation, AmalgamG1) {
  auto gog = g1();
  gog.validate();
  auto fp = fundamental_presentation(gog);
  const auto& p = fp.presentation;
  ASSERT_EQ(p.generator_count(), 4);  // a, b, b', c
  ASSERT_EQ(p.relators.size(), 3u);
  EXPECT_EQ(p.relators[0], commutator(1, 2));
  EXPECT_EQ(p.relators[1], commutator(3, 4));
  EXPECT_EQ(p.relators[2], (Word{2, -3}));
  EXPECT_EQ(abelianization(p).to_string(), "Z^3");
}

TEST(FundamentalPresentation, LoopAddsStableLetter) {
  GraphOfGroups gog;
  gog.add_vertex(GroupDescriptor::integers());
  gog.add_edge(0, 0, GroupDescriptor::integers(), {{1}}, {{1}});
  auto fp = fundamental_presentation(gog);
  ASSERT_EQ(fp.presentation.generator_count(), 2);
  EXPECT_EQ(fp.layout.stable_letter[0], 1);
  EXPECT_EQ(fp.presentation.relators[0], (Word{1, 2, -1, -2}));
  EXPECT_EQ(abelianization(fp.presentation).to_string(), "Z^2");
}

TEST(FundamentalPresentation, RelatorCount) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto gog = random_gog(rng);
    auto fp = fundamental_presentation(gog);
    size_t expected = 0;
    for (const auto& g : gog.vertex_group) expected += g.relators.size();
    for (const auto& h : gog.edge_group) expected += h.generators.size();
    EXPECT_EQ(fp.presentation.relators.size(), expected);
    int vertex_gens = 0;
    for (const auto& g : gog.vertex_group) vertex_gens += g.generator_count();
    int off_tree = gog.pair_count() - (gog.vertex_count() - 1);
    EXPECT_EQ(fp.presentation.generator_count(), vertex_gens + off_tree);
  }
}

TEST(FundamentalPresentation, RejectsNonTree) {
  auto gog = z_path(3);
  try {
    fundamental_presentation(gog, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpanningTree);
  }
}

TEST(Collapse, SingletonKeepsShape) {
  auto gog = g1();
  auto out = collapse(gog, {1});
  EXPECT_EQ(out.vertex_count(), 2);
  EXPECT_EQ(out.pair_count(), 1);
  EXPECT_EQ(out.vertex_group, gog.vertex_group);
  EXPECT_EQ(out.injection, gog.injection);
}

TEST(Collapse, PathFirstTwo) {
  auto out = collapse(z_path(3), {0, 1});
  ASSERT_EQ(out.vertex_count(), 2);
  ASSERT_EQ(out.pair_count(), 1);
  EXPECT_EQ(out.vertex_group[0].generator_count(), 2);
  EXPECT_TRUE(out.vertex_group[0].relators.empty());
  EXPECT_EQ(out.vertex_group[1].tag, GroupTag::Z);
  EXPECT_EQ(out.vertex_name[0], "[v0,v1]");
}

TEST(Collapse, EmptyFamilyIsIdentity) {
  auto gog = g1();
  auto out = collapse_many(gog, {});
  EXPECT_EQ(out.vertex_group, gog.vertex_group);
  EXPECT_EQ(out.injection, gog.injection);
}

TEST(Collapse, Errors) {
  auto gog = z_path(3);
  try {
    collapse(gog, {0, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConnected);
  }
  try {
    collapse_many(gog, {{0, 1}, {1, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlappingSets);
  }
}

TEST(Collapse, RewritesInjectionsIntoCollapsedGenerators) {
  // a -- <b> -- (b,c) -- trivial -- Z, collapse the first two
  auto gog = g1();
  gog.add_vertex(GroupDescriptor::integers());
  gog.add_edge_named(1, 2, GroupDescriptor::integers(), {"c"}, {"a"});
  auto out = collapse(gog, {0, 1});
  ASSERT_EQ(out.pair_count(), 1);
  EdgeId e = 0;
  // the image of the edge generator in the collapsed group is v1.c = generator 4
  EXPECT_EQ(out.injection[e ^ 1], (std::vector<Word>{{4}}));
  EXPECT_EQ(out.vertex_group[0].generators[3], "v1.c");
  out.validate();
}

TEST(Collapse, PreservesAbelianization) {
  EXPECT_EQ(abelianization(fundamental_presentation(collapse(g1(), {0, 1})).presentation).to_string(), "Z^3");
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto gog = random_gog(rng);
    gog.validate();
    auto before = abelianization(fundamental_presentation(gog).presentation);
    auto Y = random_connected_set(rng, gog.graph);
    auto out = collapse(gog, Y);
    out.validate();
    auto after = abelianization(fundamental_presentation(out).presentation);
    EXPECT_EQ(before, after) << "trial " << trial << ": " << before.to_string() << " vs " << after.to_string();
  }
}

TEST(Collapse, RecognizesFreeProducts) {
  CollapseOptions opts;
  opts.recognize_free_products = true;
  auto out = collapse(z_path(3), {0, 1}, opts);
  EXPECT_EQ(out.vertex_group[0].tag, GroupTag::FreeProduct);
  EXPECT_EQ(out.vertex_group[0].factors.size(), 2u);
  auto amalgam = collapse(g1(), {0, 1}, opts);
  EXPECT_EQ(amalgam.vertex_group[0].tag, GroupTag::Presentation);
}

TEST(CollapseMany, ComponentsGiveStar) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    GraphOfGroups gog;
    int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) gog.add_vertex(GroupDescriptor::integers());
    for (int v = 1; v < n; ++v) gog.add_edge(static_cast<int>(rng() % v), v, GroupDescriptor::trivial(), {}, {});
    for (int k = static_cast<int>(rng() % 3); k > 0; --k)
      gog.add_edge(static_cast<int>(rng() % n), static_cast<int>(rng() % n), GroupDescriptor::trivial(), {}, {});
    VertexId center = static_cast<VertexId>(rng() % n);
    auto comps = components_minus_vertex(gog.graph, center);
    auto out = collapse_many(gog, comps);
    ASSERT_EQ(out.vertex_count(), static_cast<int>(comps.size()) + 1);
    // the center keeps its relative position among the new vertices
    VertexId c = 0;
    for (const auto& comp : comps)
      if (comp[0] < center) ++c;
    for (EdgeId e = 0; e < out.graph.edge_count(); ++e)
      EXPECT_TRUE(out.graph.source(e) == c || out.graph.target(e) == c);
    EXPECT_EQ(abelianization(fundamental_presentation(gog).presentation),
              abelianization(fundamental_presentation(out).presentation));
  }
}

TEST(VertexGeneratingSet, AddsEdgeImages) {
  GraphOfGroups gog;
  gog.add_vertex(GroupDescriptor::zpow(2));
  gog.add_vertex(GroupDescriptor::integers());
  gog.add_edge(1, 0, GroupDescriptor::integers(), {{1}}, {{1, 2}});
  auto model = make_model(gog.vertex_group[0]);
  auto gens = vertex_generating_set(gog, 0, model.get());
  EXPECT_EQ(gens, (std::vector<Word>{{1}, {2}, {1, 2}}));
  auto z = vertex_generating_set(gog, 1, make_model(gog.vertex_group[1]).get());
  EXPECT_EQ(z, (std::vector<Word>{{1}}));
}
