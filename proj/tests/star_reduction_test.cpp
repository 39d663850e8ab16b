#include <gtest/gtest.h>

#include <random>

#include "morse_atlas/star.hpp"

using namespace morse_atlas;

namespace {

GroupDescriptor cusped(std::string a = "x", std::string b = "y") {
  return GroupDescriptor::symbolic(GroupTag::FiniteVolumeHyperbolic3Mfld, {std::move(a), std::move(b), "z"});
}
GroupDescriptor seifert() { return GroupDescriptor::symbolic(GroupTag::SeifertFibered, {"s", "t", "u"}); }
GroupDescriptor torus() { return GroupDescriptor::zpow(2); }

const std::vector<Word> kPeriph = {{1}, {2}};

// Cusped hyperbolic center glued along tori to `leaves` Seifert pieces.
GraphOfGroups hyperbolic_star(int leaves) {
  GraphOfGroups g;
  g.add_vertex(cusped(), "H");
  for (int i = 0; i < leaves; ++i) {
    VertexId v = g.add_vertex(seifert(), "S" + std::to_string(i));
    g.add_edge(0, v, torus(), kPeriph, kPeriph);
  }
  return g;
}

// H0 - S - H1, both hyperbolic pieces in W.
GraphOfGroups chain() {
  GraphOfGroups g;
  g.add_vertex(cusped(), "H0");
  g.add_vertex(seifert(), "S");
  g.add_vertex(cusped(), "H1");
  g.add_edge(0, 1, torus(), kPeriph, kPeriph);
  g.add_edge(1, 2, torus(), kPeriph, kPeriph);
  return g;
}

GraphOfGroups z_star_z() {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::integers(), "A");
  g.add_vertex(GroupDescriptor::integers(), "B");
  g.add_edge(0, 1, GroupDescriptor::trivial(), {}, {});
  return g;
}

int count(const std::vector<Peripheral>& ps, Peripheral::Family f) {
  return static_cast<int>(std::count_if(ps.begin(), ps.end(), [&](const auto& p) { return p.family == f; }));
}

int hypothesis_number(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    return e.detail();
  }
  return 0;
}

}  // namespace

TEST(MorselessStar, HyperbolicCenterWithTorusEdges) {
  auto r = validate_morseless_star(hyperbolic_star(3));
  EXPECT_TRUE(r.star_shape);
  EXPECT_EQ(r.center, 0);
  EXPECT_TRUE(r.morseless_star);
  EXPECT_TRUE(r.relatively_hyperbolic);
  EXPECT_TRUE(r.failures.empty());
  ASSERT_EQ(r.edges.size(), 3u);
  for (const auto& e : r.edges) EXPECT_TRUE(e.passes());
}

TEST(MorselessStar, SeifertCenterIsNotRelativelyHyperbolic) {
  GraphOfGroups g;
  g.add_vertex(seifert(), "S");
  g.add_vertex(cusped(), "H");
  g.add_edge(0, 1, torus(), kPeriph, kPeriph);
  auto r = validate_morseless_star(g, 0);
  EXPECT_TRUE(r.morseless_star);
  EXPECT_FALSE(r.relatively_hyperbolic);
}

TEST(MorselessStar, CyclicEdgeIsNotWide) {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::zpow(2), "A");
  g.add_vertex(GroupDescriptor::zpow(2), "B");
  g.add_edge(0, 1, GroupDescriptor::integers(), {{1}}, {{1}});
  auto r = validate_morseless_star(g);
  EXPECT_FALSE(r.morseless_star);
  bool named = false;
  for (const auto& f : r.failures) named = named || f.find("not wide") != std::string::npos;
  EXPECT_TRUE(named);
}

TEST(MorselessStar, TrivialEdgesBetweenInfiniteGroupsPass) {
  auto r = validate_morseless_star(z_star_z());
  EXPECT_TRUE(r.morseless_star);
  EXPECT_TRUE(r.relatively_hyperbolic);
}

TEST(MorselessStar, PathOfLengthThreeIsNotAStar) {
  GraphOfGroups g = chain();
  VertexId extra = g.add_vertex(seifert(), "S2");
  g.add_edge(2, extra, torus(), kPeriph, kPeriph);
  auto r = validate_morseless_star(g);
  EXPECT_FALSE(r.star_shape);
  EXPECT_FALSE(r.morseless_star);
}

TEST(Peripherals, LeafStar) {
  auto ps = peripheral_structure(hyperbolic_star(2));
  EXPECT_EQ(count(ps, Peripheral::Family::A), 2);
  EXPECT_EQ(count(ps, Peripheral::Family::H1), 2);
  EXPECT_EQ(count(ps, Peripheral::Family::H2), 0);
  for (const auto& p : ps)
    if (p.family == Peripheral::Family::H1) {
      EXPECT_EQ(p.group.tag, GroupTag::SeifertFibered);
    }
}

TEST(Peripherals, LoopContributesBothEndsAndOneEdgeGroup) {
  GraphOfGroups g = hyperbolic_star(1);
  g.add_edge(0, 0, torus(), kPeriph, {{2}, {3}});
  auto ps = peripheral_structure(g);
  EXPECT_EQ(count(ps, Peripheral::Family::A), 3);
  EXPECT_EQ(count(ps, Peripheral::Family::H1), 1);
  EXPECT_EQ(count(ps, Peripheral::Family::H2), 1);
}

TEST(Peripherals, RejectsNonRelativelyHyperbolicStar) {
  GraphOfGroups g;
  g.add_vertex(seifert(), "S");
  g.add_vertex(seifert(), "T");
  g.add_edge(0, 1, torus(), kPeriph, kPeriph);
  try {
    peripheral_structure(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRelHypStar);
  }
}

TEST(Peripherals, OrientationMustCoverEveryPair) {
  EXPECT_THROW(peripheral_structure(hyperbolic_star(2), {0}), Error);
}

TEST(Trivialize, MakesEveryEdgeTrivialAndKeepsVertices) {
  auto g = hyperbolic_star(3);
  auto [out, trace] = trivialize_star(g);
  EXPECT_TRUE(out.all_edges_trivial());
  EXPECT_EQ(out.vertex_group, g.vertex_group);
  EXPECT_EQ(out.pair_count(), 3);
  ASSERT_EQ(trace.steps.size(), 1u);
  EXPECT_EQ(trace.steps[0].input_hash, gog_hash(g));
  EXPECT_EQ(trace.final_hash, gog_hash(out));
  EXPECT_NO_THROW(out.validate());
}

TEST(Trivialize, RejectsNonStar) {
  EXPECT_EQ(hypothesis_number([] {
              GraphOfGroups g;
              g.add_vertex(seifert(), "S");
              g.add_vertex(seifert(), "T");
              g.add_edge(0, 1, torus(), kPeriph, kPeriph);
              trivialize_star(g);
            }),
            0);  // detail is not an assumption number here
}

TEST(Reduce, ChainWithTwoHyperbolicPieces) {
  auto g = chain();
  auto [out, trace] = reduce_graph_of_groups(g, {0, 2});
  EXPECT_TRUE(out.all_edges_trivial());
  EXPECT_EQ(out.vertex_group, g.vertex_group);
  // check + 3 steps per W vertex
  ASSERT_EQ(trace.steps.size(), 7u);
  EXPECT_EQ(trace.steps[0].op, "check_hypotheses");
  EXPECT_EQ(trace.steps[1].op, "collapse_components");
  EXPECT_EQ(trace.steps[2].op, "trivialize_star");
  EXPECT_EQ(trace.steps[3].op, "restore_components");
  for (size_t i = 1; i < trace.steps.size(); ++i) EXPECT_EQ(trace.steps[i].input_hash, trace.steps[i - 1].output_hash);
  EXPECT_EQ(gog_hash(replay(g, trace)), gog_hash(out));
}

TEST(Reduce, SingleCenterTakesOneIteration) {
  auto g = hyperbolic_star(4);
  auto [out, trace] = reduce_graph_of_groups(g, {0});
  EXPECT_TRUE(out.all_edges_trivial());
  EXPECT_EQ(trace.steps.size(), 4u);
}

TEST(Reduce, TraceSurvivesJsonRoundTrip) {
  auto g = chain();
  auto [out, trace] = reduce_graph_of_groups(g, {0, 2});
  auto back = DerivationTrace::from_json(parse_json(trace.to_json().dump()));
  EXPECT_EQ(gog_hash(replay(g, back)), gog_hash(out));
}

TEST(Reduce, TamperedTraceIsRejected) {
  auto g = chain();
  auto [out, trace] = reduce_graph_of_groups(g, {0, 2});
  auto bad = trace;
  bad.steps[2].output_hash = std::string(16, '0');
  EXPECT_THROW(replay(g, bad), Error);
  auto other = hyperbolic_star(2);
  EXPECT_THROW(replay(other, trace), Error);
}

TEST(Reduce, AssumptionOneNamesWide) {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::zpow(2), "A");
  g.add_vertex(GroupDescriptor::zpow(2), "B");
  g.add_edge(0, 1, GroupDescriptor::integers(), {{1}}, {{1}});
  try {
    reduce_graph_of_groups(g, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    EXPECT_EQ(e.detail(), 1);
    EXPECT_NE(std::string(e.what()).find("wide"), std::string::npos);
  }
}

TEST(Reduce, AssumptionTwoAndThree) {
  EXPECT_EQ(hypothesis_number([] { reduce_graph_of_groups(chain(), {1}); }), 2);
  EXPECT_EQ(hypothesis_number([] { reduce_graph_of_groups(chain(), {0}); }), 3);
}

TEST(Reduce, RejectsRepeatedW) { EXPECT_THROW(reduce_graph_of_groups(chain(), {0, 0}), Error); }

TEST(Reduce, RandomChainsProperty) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    // alternating H - S - H - ... with every H in W
    int pieces = 1 + static_cast<int>(rng() % 6);
    GraphOfGroups g;
    std::vector<VertexId> W;
    for (int i = 0; i < pieces; ++i) {
      bool hyp = i % 2 == 0;
      VertexId v = g.add_vertex(hyp ? cusped() : seifert(), "P" + std::to_string(i));
      if (hyp) W.push_back(v);
      if (i > 0) g.add_edge(v - 1, v, torus(), kPeriph, kPeriph);
    }
    std::shuffle(W.begin(), W.end(), rng);
    auto [out, trace] = reduce_graph_of_groups(g, W);
    EXPECT_TRUE(out.all_edges_trivial());
    EXPECT_EQ(out.pair_count(), g.pair_count());
    EXPECT_EQ(trace.steps.size(), 1 + 3 * W.size());
    EXPECT_EQ(gog_hash(replay(g, trace)), trace.final_hash);
  }
}

TEST(TreeMap, IdentityPassesWithCoarseConstantOne) {
  auto space = bass_serre_ball(z_star_z(), 4);
  auto tree = project_tree(space);
  TreeMapInput in;
  in.domain = &tree;
  in.codomain = &tree;
  in.phi.resize(tree.vertex_count());
  std::iota(in.phi.begin(), in.phi.end(), 0);
  in.codomain_boundary_nonempty = {Truth::True, Truth::True};
  in.identity_boundary_stubs = true;
  in.domain_edge_morse.assign(tree.graph.edge_count(), 1.0);
  in.codomain_edge_morse.assign(tree.graph.edge_count(), 1.0);
  in.edge_gauge_map = MorseGauge::parse("l");
  auto rep = check_tree_map(in);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.coarse_constant, 1);
  for (const auto& c : rep.conditions) EXPECT_EQ(c.status, "pass") << c.name;
}

TEST(TreeMap, DetectsCollapsedSiblings) {
  auto space = bass_serre_ball(z_star_z(), 4);
  auto tree = project_tree(space);
  std::vector<int> kids;
  for (EdgeId e : tree.graph.out_edges(tree.root))
    if (tree.outgoing[e]) kids.push_back(tree.graph.target(e));
  ASSERT_GE(kids.size(), 2u);
  TreeMapInput in;
  in.domain = &tree;
  in.codomain = &tree;
  in.phi.assign(tree.vertex_count(), -1);
  in.phi[tree.root] = tree.root;
  in.phi[kids[0]] = kids[0];
  in.phi[kids[1]] = kids[0];
  auto rep = check_tree_map(in);
  EXPECT_FALSE(rep.ok());
  ASSERT_TRUE(rep.injectivity_witness);
  EXPECT_EQ(rep.conditions[1].status, "fail");
}

TEST(TreeMap, RootMustMapToRootAndNestingIsChecked) {
  auto space = bass_serre_ball(z_star_z(), 4);
  auto tree = project_tree(space);
  std::vector<int> kids;
  for (EdgeId e : tree.graph.out_edges(tree.root))
    if (tree.outgoing[e]) kids.push_back(tree.graph.target(e));
  TreeMapInput in;
  in.domain = &tree;
  in.codomain = &tree;
  in.phi.assign(tree.vertex_count(), -1);
  in.phi[tree.root] = kids[0];
  in.phi[kids[0]] = tree.root;
  auto rep = check_tree_map(in);
  EXPECT_EQ(rep.conditions[0].status, "fail");
  EXPECT_TRUE(rep.nestedness_witness.has_value());
}

TEST(TreeMap, DomainMustBeRootedSubtree) {
  auto space = bass_serre_ball(z_star_z(), 4);
  auto tree = project_tree(space);
  TreeMapInput in;
  in.domain = &tree;
  in.codomain = &tree;
  in.phi.assign(tree.vertex_count(), -1);
  int deep = 0;
  for (int v = 0; v < tree.vertex_count(); ++v)
    if (tree.distance[v] == 2) deep = v;
  in.phi[tree.root] = tree.root;
  in.phi[deep] = deep;
  try {
    check_tree_map(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadMap);
  }
  in.phi.pop_back();
  EXPECT_THROW(check_tree_map(in), Error);
}

TEST(LocalBijection, CyclicEdgeIntoZ2) {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::zpow(2), "V");
  g.add_edge(0, 0, GroupDescriptor::integers(), {{1}}, {{2}});
  auto lb = build_empty_boundary_bijection(g, 0, 3);
  ASSERT_EQ(lb.classes.size(), 2u);  // both half-edges of the loop leave V
  for (const auto& c : lb.classes) {
    // cosets of a cyclic factor meeting the radius-3 ball: 7
    EXPECT_EQ(c.coset_rep.size(), 7u);
    EXPECT_TRUE(c.image.front().empty());
    EXPECT_TRUE(c.coset_rep.front().empty());
  }
  for (const auto& v : lb.conditions) EXPECT_NE(v.status, "fail") << v.name;
}

TEST(LocalBijection, TrivialEdgeGivesIdentity) {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::zpow(2), "V");
  g.add_vertex(GroupDescriptor::zpow(2), "W");
  g.add_edge(0, 1, GroupDescriptor::trivial(), {}, {});
  auto lb = build_empty_boundary_bijection(g, 0, 3);
  ASSERT_EQ(lb.classes.size(), 1u);
  EXPECT_EQ(lb.classes[0].coset_rep.size(), 25u);  // |x| + |y| <= 3
  EXPECT_EQ(lb.classes[0].coset_rep, lb.classes[0].image);
}

TEST(LocalBijection, Errors) {
  GraphOfGroups g;
  g.add_vertex(GroupDescriptor::free(2), "F");
  g.add_vertex(GroupDescriptor::zpow(2), "V");
  g.add_edge(0, 1, GroupDescriptor::trivial(), {}, {});
  try {
    build_empty_boundary_bijection(g, 0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongCase);
  }
  try {
    build_empty_boundary_bijection(g, 1, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScaleExceeded);
  }
  BallLimits tiny;
  tiny.max_cells = 10;
  try {
    build_empty_boundary_bijection(g, 1, 5, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScaleExceeded);
  }
}
