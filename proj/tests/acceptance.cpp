// Acceptance run: one PASS/FAIL line per criterion with its time limit.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "morse_atlas/morse_atlas.hpp"

using namespace morse_atlas;
using B = BoundaryType;

namespace {

const std::string kData = MORSE_ATLAS_DATA_DIR;

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int run_criterion(int number, const std::string& name, double limit_ms, const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (ms > limit_ms) c.failures.push_back("took " + std::to_string(ms) + " ms");
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(1);
  line << (c.failures.empty() ? "PASS" : "FAIL") << "  criterion " << number << "  " << name << "  (" << ms
       << " ms, limit " << limit_ms << " ms)";
  std::cout << line.str() << "\n";
  for (size_t i = 0; i < c.failures.size() && i < 10; ++i) std::cout << "      " << c.failures[i] << "\n";
  return c.failures.empty() ? 0 : 1;
}

int run_binary(const std::string& args) {
  std::string cmd = std::string(MORSE_ATLAS_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ------------------------------------------------------------ criterion 1

void corpus(Check& c) {
  JobSpec job;
  job.command = "corpus";
  job.input = kData + "/corpus/classification";
  auto r = run_job(job);
  c.expect(r.exit == 0, "corpus exit " + std::to_string(r.exit) + "\n" + r.report);
  const auto& files = r.result.at("files");
  c.expect(files.size() == 12, "expected 12 files, got " + std::to_string(files.size()));
  std::set<std::string> types;
  for (const auto& f : files) {
    c.expect(f.value("ok", false), "mismatch in " + f.at("file").get<std::string>());
    if (f.contains("boundary")) types.insert(f.at("boundary").get<std::string>());
  }
  c.expect(types.size() == 9, "expected 9 boundary types, got " + std::to_string(types.size()));
}

// ------------------------------------------------------------ criterion 2

void distinctness(Check& c) {
  auto m = distinctness_matrix();
  std::set<std::pair<B, B>> pairs;
  for (const auto& w : m) {
    c.expect(!w.predicate.empty(), "empty witness");
    c.expect(w.a != w.b, "witness for a type against itself");
    pairs.insert({std::min(w.a, w.b), std::max(w.a, w.b)});
  }
  c.expect(pairs.size() == 36, "distinct pairs: " + std::to_string(pairs.size()));
  for (int i = 0; i < kClassifiedTypeCount; ++i)
    c.expect(predicates(kClassifiedTypes[i]).totally_disconnected == (i < 4),
             std::string("totally disconnected mismatch for ") + std::string(boundary_name(kClassifiedTypes[i])));
  c.expect(predicates(B::Sphere2).compact, "Sphere2 compact");
  c.expect(predicates(B::Sphere2FPSphere2).compact, "Sphere2 * Sphere2 compact");
  c.expect(!predicates(B::Sphere2FPEmpty).compact, "Sphere2 * Empty not compact");
}

// ------------------------------------------------------------ criterion 3

GroupDescriptor renamed(GroupDescriptor d, std::vector<std::string> names) {
  d.generators = std::move(names);
  return d;
}

GraphOfGroups g1() {
  GraphOfGroups gog;
  gog.add_vertex(renamed(GroupDescriptor::zpow(2), {"a", "b"}));
  gog.add_vertex(renamed(GroupDescriptor::zpow(2), {"b", "c"}));
  gog.add_edge_named(0, 1, GroupDescriptor::integers(), {"b"}, {"b"});
  return gog;
}

GraphOfGroups random_gog(std::mt19937& rng) {
  auto group = [&] {
    switch (rng() % 3) {
      case 0: return GroupDescriptor::integers();
      case 1: return GroupDescriptor::zpow(2);
      default: return GroupDescriptor::free(2);
    }
  };
  auto letter = [&](int gens) {
    Letter x = 1 + static_cast<Letter>(rng() % gens);
    return Word{rng() % 2 ? x : -x};
  };
  GraphOfGroups gog;
  int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) gog.add_vertex(group());
  auto add = [&](int s, int t) {
    if (rng() % 2)
      gog.add_edge(s, t, GroupDescriptor::trivial(), {}, {});
    else
      gog.add_edge(s, t, GroupDescriptor::integers(), {letter(gog.vertex_group[s].generator_count())},
                   {letter(gog.vertex_group[t].generator_count())});
  };
  for (int v = 1; v < n; ++v) add(static_cast<int>(rng() % v), v);
  if (rng() % 2) add(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
  return gog;
}

void collapse_invariance(Check& c) {
  // hand reduction: a, b, b', c with b = b' abelianize to Z^3
  auto g = g1();
  auto before = abelianization(fundamental_presentation(g).presentation);
  c.expect(before.rank == 3 && before.torsion.empty(), "G1 abelianization " + before.to_string());
  auto after = abelianization(fundamental_presentation(collapse(g, {0, 1})).presentation);
  c.expect(after == before, "G1 after collapse " + after.to_string());

  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto gog = random_gog(rng);
    gog.validate();
    auto a = abelianization(fundamental_presentation(gog).presentation);
    std::vector<VertexId> Y{0};
    for (VertexId v = 1; v < gog.vertex_count(); ++v)
      if (rng() % 2)
        for (EdgeId e : gog.graph.out_edges(v))
          if (std::count(Y.begin(), Y.end(), gog.graph.target(e))) {
            Y.push_back(v);
            break;
          }
    auto b = abelianization(fundamental_presentation(collapse(gog, Y)).presentation);
    c.expect(a == b, "trial " + std::to_string(trial) + ": " + a.to_string() + " vs " + b.to_string());
  }
}

// ------------------------------------------------------------ criterion 4

GraphOfGroups free_product(GroupDescriptor a, GroupDescriptor b) {
  GraphOfGroups gog;
  gog.add_vertex(std::move(a));
  gog.add_vertex(std::move(b));
  gog.add_edge(0, 1, GroupDescriptor::trivial(), {}, {});
  return gog;
}

void bass_serre(Check& c) {
  const std::vector<std::pair<std::string, GraphOfGroups>> cases = {
      {"Z*Z", free_product(GroupDescriptor::integers(), GroupDescriptor::integers())},
      {"F2*Z", free_product(GroupDescriptor::free(2), GroupDescriptor::integers())}};
  for (const auto& [name, gog] : cases)
    for (int r = 0; r <= 5; ++r) {
      std::string at = name + " radius " + std::to_string(r);
      auto ball = bass_serre_ball(gog, r);
      auto tree = project_tree(ball);
      c.expect(tree.graph.edge_count() / 2 == tree.vertex_count() - 1, at + ": |E|/2 != |V|-1");
      c.expect(tree.graph.connected(), at + ": tree not connected");
      for (const auto& fc : check_fibers(gog, ball)) {
        c.expect(fc.exact_ball, at + ": fiber " + std::to_string(fc.label) + " is not the Cayley ball");
        int rest = r - ball.depth[fc.entry];
        auto cayley = cayley_ball(gog.vertex_group[fc.gamma_vertex], rest);
        c.expect(cayley.graph.vertex_count() == fc.vertex_count, at + ": fiber size differs from Cayley ball");
      }
    }
}

// ------------------------------------------------------------ criterion 5

void delta(Check& c) {
  // M = lambda + eps: M(5,0) = 5, M(1,10) = 11, max(4*11 + 2*5, 8*M(3,0) = 24) = 54
  // M = lambda:       M(5,0) = 5, M(1,10) = 1,  max(4*1 + 2*5, 8*3 = 24) = 24
  c.expect(delta_M(MorseGauge::parse("lambda + eps")) == 54, "delta_M(lambda + eps) != 54");
  c.expect(delta_M(MorseGauge::parse("lambda")) == 24, "delta_M(lambda) != 24");
}

// ------------------------------------------------------------ criterion 6

using Point = std::pair<int, int>;

int l1(Point a, Point b) { return std::abs(a.first - b.first) + std::abs(a.second - b.second); }

// Exhaustive lattice walks inside the l1 ball whose every subwalk has
// length <= lambda * distance; the largest l1 distance to the segment.
int lattice_oracle(int radius, const std::vector<Point>& seg, int lambda) {
  int best = 0;
  std::vector<Point> walk;
  std::function<void(Point, int)> rec = [&](Point target, int budget) {
    Point cur = walk.back();
    int len = static_cast<int>(walk.size()) - 1;
    for (size_t i = 0; i < walk.size(); ++i)
      if (len - static_cast<int>(i) > lambda * l1(walk[i], cur)) return;
    if (cur == target)
      for (Point p : walk) {
        int dev = 1 << 20;
        for (Point s : seg) dev = std::min(dev, l1(p, s));
        best = std::max(best, dev);
      }
    if (len >= budget) return;
    for (Point s : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) {
      Point nxt{cur.first + s.first, cur.second + s.second};
      if (std::abs(nxt.first) + std::abs(nxt.second) > radius) continue;
      if (len + 1 + l1(nxt, target) > budget) continue;
      walk.push_back(nxt);
      rec(target, budget);
      walk.pop_back();
    }
  };
  for (size_t i = 0; i < seg.size(); ++i)
    for (size_t j = i; j < seg.size(); ++j) {
      walk = {seg[i]};
      rec(seg[j], lambda * static_cast<int>(j - i));
    }
  return best;
}

int word_distance(const Word& a, const Word& b) { return static_cast<int>(free_reduce(concat(inverse(a), b)).size()); }

int free_oracle(int radius, const std::vector<Word>& seg, int lambda) {
  int best = 0;
  std::vector<Word> walk;
  std::function<void(const Word&, int)> rec = [&](const Word& target, int budget) {
    Word cur = walk.back();
    int len = static_cast<int>(walk.size()) - 1;
    for (size_t i = 0; i < walk.size(); ++i)
      if (len - static_cast<int>(i) > lambda * word_distance(walk[i], cur)) return;
    if (cur == target)
      for (const Word& p : walk) {
        int dev = 1 << 20;
        for (const Word& s : seg) dev = std::min(dev, word_distance(p, s));
        best = std::max(best, dev);
      }
    if (len >= budget) return;
    for (Letter x : {1, -1, 2, -2}) {
      Word nxt = free_reduce(concat(cur, Word{x}));
      if (static_cast<int>(nxt.size()) > radius) continue;
      if (len + 1 + word_distance(nxt, target) > budget) continue;
      walk.push_back(nxt);
      rec(target, budget);
      walk.pop_back();
    }
  };
  for (size_t i = 0; i < seg.size(); ++i)
    for (size_t j = i; j < seg.size(); ++j) {
      walk = {seg[i]};
      rec(seg[j], lambda * static_cast<int>(j - i));
    }
  return best;
}

void critical_values(Check& c) {
  const QuasiConstant C{3, 0};
  const int R = 8;
  auto z = cayley_ball(GroupDescriptor::zpow(2), R);
  auto zm = metric_of(z);
  std::map<Point, int> at;
  for (int v = 0; v < z.graph.vertex_count(); ++v) {
    Point p{0, 0};
    for (Letter x : z.element[v]) (std::abs(x) == 1 ? p.first : p.second) += x > 0 ? 1 : -1;
    at[p] = v;
  }
  int prev = 0;
  for (int n = 0; n <= R; ++n) {
    Path seg;
    std::vector<Point> pts;
    for (int x = -(n / 2); x <= n - n / 2; ++x) {
      seg.push_back(at.at({x, 0}));
      pts.push_back({x, 0});
    }
    int v = critical_value(zm, seg, C).value;
    c.expect(v >= prev, "Z^2 critical value decreases at length " + std::to_string(n));
    prev = v;
    if (n == 4) {
      c.expect(v == 4, "Z^2 length 4 critical value " + std::to_string(v));
      c.expect(lattice_oracle(R, pts, 3) == 4, "Z^2 brute force at length 4 is not 4");
    }
  }

  auto f = cayley_ball(GroupDescriptor::free(2), R);
  auto fm = metric_of(f);
  for (const auto& b : find_bad_segments(fm, C, 0)) {
    c.expect(b.value.value <= 2, "F2 segment with critical value " + std::to_string(b.value.value));
    std::vector<Word> pts;
    for (int v : b.segment) pts.push_back(f.element[v]);
    int oracle = free_oracle(R, pts, 3);
    c.expect(oracle <= 2, "F2 brute force " + std::to_string(oracle));
    c.expect(oracle == b.value.value, "F2 brute force disagrees");
  }
  c.expect(!find_bad_segments(zm, C, 3).empty(), "no bad segments in Z^2");
  c.expect(find_bad_segments(fm, C, 3).empty(), "bad segments in F2");
}

// ------------------------------------------------------------ criterion 7

std::vector<int> bfs(const Graph& g, int from) {
  std::vector<int> d(g.vertex_count(), -1);
  std::deque<int> q{from};
  d[from] = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (EdgeId e : g.out_edges(x))
      if (d[g.target(e)] < 0) {
        d[g.target(e)] = d[x] + 1;
        q.push_back(g.target(e));
      }
  }
  return d;
}

void realisations(Check& c) {
  auto gog = free_product(GroupDescriptor::free(2), GroupDescriptor::integers());
  auto space = bass_serre_ball(gog, 8);
  auto tree = project_tree(space);
  auto m = metric_of(space);
  std::mt19937 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::string at = "ray " + std::to_string(trial);
    auto r = random_ray(tree, space, rng);
    auto real = realisation(tree, space, m, r);
    const Path& p = real.path;
    // geodesic: every prefix realises the graph distance from the start
    auto d = bfs(space.graph, p.front());
    for (size_t i = 0; i < p.size(); ++i) c.expect(d[p[i]] == static_cast<int>(i), at + ": not geodesic");
    std::vector<EdgeId> got;
    for (const auto& l : edges_lying_on(tree, space, p)) got.push_back(l.edge);
    std::vector<EdgeId> prefix(r.edges.begin(), r.edges.begin() + real.prefix_edges);
    c.expect(got == prefix, at + ": edges lying on the realisation differ from p(r)");
  }
}

// ------------------------------------------------------------ criterion 8

void reduction(Check& c) {
  const std::string ex = kData + "/examples/";
  JobSpec job;
  job.command = "reduce";
  job.input = ex + "jsj_chain_reduce.json";
  auto ok = run_job(job);
  c.expect(ok.exit == 0, "JSJ reduction exit " + std::to_string(ok.exit) + ": " + ok.error);
  if (ok.exit == 0) {
    auto initial = gog_from_json(read_json_file(job.input));
    auto trace = DerivationTrace::from_json(ok.result.at("trace"));
    auto replayed = replay(initial, trace);
    c.expect(replayed.all_edges_trivial(), "replayed graph has nontrivial edges");
    c.expect(gog_hash(replayed) == trace.final_hash, "replay hash mismatch");
  }

  job.input = ex + "g1_star_reduce.json";
  auto wide = run_job(job);
  c.expect(wide.exit == 2, "G1-style star exit " + std::to_string(wide.exit));
  c.expect(wide.error.find("HypothesisViolated") != std::string::npos, "G1-style star: " + wide.error);
  c.expect(wide.error.find("wide") != std::string::npos, "G1-style star does not name wideness: " + wide.error);

  job.input = ex + "seifert_pair_no_w.json";
  auto no_w = run_job(job);
  c.expect(no_w.exit == 2, "Seifert pair exit " + std::to_string(no_w.exit));
  c.expect(no_w.error.find("assumption (3)") != std::string::npos, "Seifert pair: " + no_w.error);

  c.expect(run_binary("reduce " + ex + "jsj_chain_reduce.json") == 0, "binary: JSJ reduction exit");
  c.expect(run_binary("reduce " + ex + "g1_star_reduce.json") == 2, "binary: G1-style star exit");
  c.expect(run_binary("reduce " + ex + "seifert_pair_no_w.json") == 2, "binary: Seifert pair exit");
}

// ------------------------------------------------------------ criterion 9

Factor finite_cyclic(int64_t order) {
  Factor f;
  f.name = "Z/" + std::to_string(order);
  f.infinite = false;
  f.virtually_cyclic = true;
  f.hyperbolic = true;
  f.order = order;
  return f;
}

Factor atom(std::string name, B b, bool hyperbolic, bool vc = false) {
  Factor f;
  f.name = std::move(name);
  f.boundary = b;
  f.hyperbolic = hyperbolic;
  f.virtually_cyclic = vc;
  return f;
}

Factor free_group(int rank) {
  Factor f = atom("F" + std::to_string(rank), rank == 1 ? B::TwoPoints : B::Cantor, true, rank == 1);
  f.free_rank = rank;
  return f;
}

std::vector<Factor> pool() {
  return {finite_cyclic(1), finite_cyclic(2), finite_cyclic(3), free_group(1), free_group(2),
          atom("S2xR", B::TwoPoints, true, true), atom("H3", B::Sphere2, true), atom("Sol", B::Empty, false),
          atom("Z3", B::Empty, false), atom("cusped", B::OmegaSierpinski, false),
          atom("seifert-graph", B::OmegaCantor, false), atom("H3*H3", B::Sphere2FPSphere2, true),
          atom("H3*Sol", B::Sphere2FPEmpty, false), atom("cusped*cusped", B::OmegaSierpFPOmegaSierp, false),
          atom("H3*cusped", B::Sphere2FPOmegaSierp, false), atom("virtually-free", B::Cantor, true)};
}

// Brute-force rule application: expand composites into their atoms, drop
// trivial factors, absorb Empty into OmegaSierpinski, then read the row.
std::optional<B> oracle(const std::vector<Factor>& fs) {
  int weight = 0, order_two = 0, finite = 0;
  const Factor* single = nullptr;
  for (const auto& f : fs) {
    if (!f.infinite && f.order == 1) continue;
    weight += f.free_rank > 0 ? f.free_rank : 1;
    single = &f;
    if (!f.infinite) {
      ++finite;
      order_two += f.order == 2;
    }
  }
  if (weight == 0) return B::Empty;
  if (weight == 1) return single->boundary;
  if (weight == 2 && finite == 2 && order_two == 2) return B::TwoPoints;
  std::set<B> atoms;
  for (const auto& f : fs) {
    if (!f.infinite || f.virtually_cyclic || f.free_rank > 0) continue;
    switch (f.boundary) {
      case B::Cantor: break;
      case B::OmegaCantor: atoms.insert(B::Empty); break;
      case B::Sphere2FPSphere2: atoms.insert(B::Sphere2); break;
      case B::Sphere2FPEmpty: atoms.insert({B::Sphere2, B::Empty}); break;
      case B::OmegaSierpFPOmegaSierp: atoms.insert(B::OmegaSierpinski); break;
      case B::Sphere2FPOmegaSierp: atoms.insert({B::Sphere2, B::OmegaSierpinski}); break;
      default: atoms.insert(f.boundary);
    }
  }
  if (atoms.count(B::OmegaSierpinski)) atoms.erase(B::Empty);
  if (atoms.empty()) return B::Cantor;
  if (atoms == std::set<B>{B::Empty}) return B::OmegaCantor;
  if (atoms == std::set<B>{B::Sphere2}) return B::Sphere2FPSphere2;
  if (atoms == std::set<B>{B::OmegaSierpinski}) return B::OmegaSierpFPOmegaSierp;
  if (atoms == std::set<B>{B::Sphere2, B::Empty}) return B::Sphere2FPEmpty;
  if (atoms == std::set<B>{B::Sphere2, B::OmegaSierpinski}) return B::Sphere2FPOmegaSierp;
  return std::nullopt;
}

int weight(const std::vector<Factor>& fs) {
  int w = 0;
  for (const auto& f : fs)
    if (f.infinite || f.order > 1) w += f.free_rank > 0 ? f.free_rank : 1;
  return w;
}

void boundary_laws(Check& c) {
  std::mt19937 rng(2024);
  auto p = pool();
  const Factor sol = atom("Sol", B::Empty, false);
  const Factor cusped = atom("cusped", B::OmegaSierpinski, false);
  for (int trial = 0; trial < 200; ++trial) {
    std::string at = "multiset " + std::to_string(trial);
    std::vector<Factor> fs;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) fs.push_back(p[rng() % p.size()]);
    B base = normalize(fs).type;
    auto expected = oracle(fs);
    c.expect(expected && *expected == base, at + ": disagrees with the oracle");

    auto perm = fs;
    std::shuffle(perm.begin(), perm.end(), rng);
    c.expect(normalize(perm).type == base, at + ": permutation");

    if (weight(fs) >= 2) {
      auto dup = fs;
      dup.push_back(fs[rng() % fs.size()]);
      c.expect(normalize(dup).type == base, at + ": duplication");
    }

    for (size_t i = 0; i < fs.size(); ++i)
      if (fs[i].boundary == B::OmegaCantor) {
        auto rw = fs;
        rw.erase(rw.begin() + static_cast<long>(i));
        rw.push_back(sol);
        rw.push_back(sol);
        c.expect(normalize(rw).type == base, at + ": omega-Cantor rewriting");
        break;
      }

    auto with = fs;
    with.push_back(cusped);
    with.push_back(cusped);
    auto more = with;
    more.push_back(sol);
    c.expect(normalize(more).type == normalize(with).type, at + ": Empty absorption");
  }
}

}  // namespace

int main() {
  int failed = 0;
  failed += run_criterion(1, "boundary table corpus", 1000, corpus);
  failed += run_criterion(2, "distinctness witnesses and separation", 100, distinctness);
  failed += run_criterion(3, "abelianization invariant under collapse", 5000, collapse_invariance);
  failed += run_criterion(4, "Bass-Serre trees and fibers", 10000, bass_serre);
  failed += run_criterion(5, "delta_M values", 1000, delta);
  failed += run_criterion(6, "critical values and bad segments", 60000, critical_values);
  failed += run_criterion(7, "ray realisations", 30000, realisations);
  failed += run_criterion(8, "reduction pipeline and exit codes", 1000, reduction);
  failed += run_criterion(9, "boundary algebra laws", 5000, boundary_laws);
  std::cout << (9 - failed) << "/9 criteria passed\n";
  return failed == 0 ? 0 : 1;
}
