#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bass_serre.hpp"
#include "error.hpp"
#include "gauge.hpp"
#include "io.hpp"
#include "manifold.hpp"
#include "paths.hpp"
#include "star.hpp"

namespace morse_atlas {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kMaxRadius = 64;

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitHypothesis = 2, kExitScale = 3 };

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::HypothesisViolated:
    case ErrorCode::NotRelHypStar:
    case ErrorCode::WrongCase:
      return kExitHypothesis;
    case ErrorCode::ScaleExceeded:
    case ErrorCode::BallTooLarge:
    case ErrorCode::ScaleMismatch:
      return kExitScale;
    default:
      return kExitUsage;
  }
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"classify",        "validate-star", "trivialize",
                                                 "reduce",          "ball",          "critical-values",
                                                 "bad-segments",    "check-tree-map", "corpus"};
  return names;
}

struct JobSpec {
  std::string command;
  std::string input;
  int radius = 4;
  std::string gauge = "l";
  std::string qc = "3,0";
  int threshold = 3;
  int max_length = -1;
  bool json = false;
  std::string dot;  // path for DOT output, empty for none
  std::optional<size_t> max_cells;
  std::string vertex;
  std::optional<std::vector<std::string>> W;
};

struct JobResult {
  int exit = kExitOk;
  std::string report;  // stdout
  std::string error;   // stderr
  Json result;         // structured result (null on error)
};

/// Cell cap: --max-cells, else MORSE_ATLAS_MAX_CELLS, else the default.
inline size_t effective_max_cells(const JobSpec& job) {
  if (job.max_cells) return *job.max_cells;
  if (const char* env = std::getenv("MORSE_ATLAS_MAX_CELLS")) {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<size_t>(v);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidInput, "MORSE_ATLAS_MAX_CELLS must be a positive integer");
  }
  return BallLimits{}.max_cells;
}

namespace cli_detail {

struct Context {
  const JobSpec& job;
  const Json& input;
  std::vector<std::string> lines;  // text report
  Json result = Json::object();
  Json options = Json::object();
  std::string dot;

  BallLimits limits() const {
    BallLimits l;
    l.max_radius = kMaxRadius;
    l.max_cells = effective_max_cells(job);
    return l;
  }
  void need_radius() {
    options["radius"] = job.radius;
    if (job.radius < 0) throw Error(ErrorCode::InvalidInput, "radius must be >= 0");
    if (job.radius > kMaxRadius)
      throw Error(ErrorCode::ScaleExceeded,
                  "radius " + std::to_string(job.radius) + " exceeds the cap " + std::to_string(kMaxRadius));
  }
};

inline std::string input_kind(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw Error(ErrorCode::ParseError, "input: missing field 'kind'");
  return j.at("kind").get<std::string>();
}

inline std::vector<VertexId> w_set(Context& cx, const GraphOfGroups& gog) {
  std::vector<VertexId> W;
  if (cx.job.W) {
    Json arr = Json::array();
    for (const auto& n : *cx.job.W) arr.push_back(n);
    W = vertex_set_from_json(gog, arr, "--W");
    cx.options["W"] = arr;
  } else if (cx.input.contains("W")) {
    W = vertex_set_from_json(gog, cx.input.at("W"), "input/W");
  }
  return W;
}

inline Json star_json(const StarReport& r) { return r.to_json(); }

inline std::string gog_dot(const GraphOfGroups& gog) {
  std::vector<std::string> vl, el(gog.graph.edge_count());
  for (VertexId v = 0; v < gog.vertex_count(); ++v)
    vl.push_back(gog.vertex_name[v] + ": " + gog.vertex_group[v].to_string());
  for (EdgeId e = 0; e < gog.graph.edge_count(); e += 2) el[e] = gog.edge_group_of(e).to_string();
  return to_dot(gog.graph, vl, el, "Gamma");
}

inline void trace_lines(Context& cx, const DerivationTrace& t) {
  for (const auto& s : t.steps) cx.lines.push_back("  " + s.op + " " + s.args.dump() + "  " + s.input_hash + " -> " + s.output_hash);
}

// ---------------------------------------------------------------- commands

inline void classify_cmd(Context& cx) {
  auto m = decomposition_from_json(cx.input);
  auto c = classify(m);
  cx.result = c.to_json();
  cx.lines.push_back(std::string(boundary_name(c.type)));
  for (const auto& s : c.trace) cx.lines.push_back("  [" + s.rule + "] " + s.detail);
}

inline void validate_star_cmd(Context& cx, int& exit) {
  auto gog = gog_from_json(cx.input);
  VertexId center = -1;
  if (!cx.job.vertex.empty()) center = vertex_set_from_json(gog, Json::array({cx.job.vertex}), "--vertex")[0];
  auto r = validate_morseless_star(gog, center);
  cx.result = star_json(r);
  bool ok = r.morseless_star && r.relatively_hyperbolic;
  cx.lines.push_back(ok ? "relatively hyperbolic Morseless star" : "not a relatively hyperbolic Morseless star");
  if (r.center >= 0) cx.lines.push_back("  center " + gog.vertex_name[r.center]);
  for (const auto& f : r.failures) cx.lines.push_back("  " + f);
  if (ok && center < 0) {
    Json ps = Json::array();
    for (const auto& p : peripheral_structure(gog)) {
      std::string at = p.vertex >= 0 ? "vertex " + gog.vertex_name[p.vertex]
                                     : "edge " + std::to_string(p.edge / 2) + " (" +
                                           gog.vertex_name[gog.graph.source(p.edge)] + "--" +
                                           gog.vertex_name[gog.graph.target(p.edge)] + ")";
      ps.push_back({{"family", p.family_name()}, {"group", p.group.to_string()}, {"at", at}});
      cx.lines.push_back("  peripheral " + p.family_name() + " " + p.group.to_string() + " at " + at);
    }
    cx.result["peripherals"] = ps;
  }
  cx.dot = gog_dot(gog);
  if (!ok) exit = kExitHypothesis;
}

inline void trivialize_cmd(Context& cx) {
  auto gog = gog_from_json(cx.input);
  auto [out, trace] = trivialize_star(gog);
  cx.result = {{"graph_of_groups", gog_to_json(out)}, {"trace", trace.to_json()}};
  cx.lines.push_back("trivialized " + std::to_string(out.pair_count()) + " edge groups");
  trace_lines(cx, trace);
  cx.dot = gog_dot(out);
}

inline void reduce_cmd(Context& cx) {
  auto gog = gog_from_json(cx.input);
  auto W = w_set(cx, gog);
  auto [out, trace] = reduce_graph_of_groups(gog, W);
  cx.result = {{"graph_of_groups", gog_to_json(out)}, {"trace", trace.to_json()}};
  cx.lines.push_back("reduced: all " + std::to_string(out.pair_count()) + " edge groups trivial");
  trace_lines(cx, trace);
  cx.dot = gog_dot(out);
}

// Metric ball for a presentation or graph-of-groups input.
struct MetricBall {
  // held by pointer: the metric refers to the ball's graph
  std::shared_ptr<const CayleyBall> cayley;
  std::shared_ptr<const SpaceBall> space;
  BallMetric metric;
  std::vector<std::string> labels;
  int generator_count = 0;

  const Graph& graph() const { return cayley ? cayley->graph : space->graph; }
  const std::vector<Letter>& letters() const { return cayley ? cayley->edge_letter : space->edge_letter; }
  int basepoint() const { return cayley ? cayley->basepoint : space->basepoint; }
};

inline MetricBall metric_ball(Context& cx) {
  cx.need_radius();
  std::string kind = input_kind(cx.input);
  if (kind == "presentation") {
    check_header(cx.input, "presentation");
    auto d = descriptor_from_json(detail::field(cx.input, "group", "input"), "input/group");
    auto ball = std::make_shared<const CayleyBall>(cayley_ball(d, cx.job.radius, cx.limits()));
    MetricBall mb{ball, nullptr, metric_of(*ball), {}, d.generator_count()};
    for (const auto& w : ball->element) mb.labels.push_back(format_word(w, d.generators));
    return mb;
  }
  if (kind == "graph_of_groups") {
    auto gog = gog_from_json(cx.input);
    auto ball = std::make_shared<const SpaceBall>(bass_serre_ball(gog, cx.job.radius, cx.limits()));
    MetricBall mb{nullptr, ball, metric_of(*ball), {}, 0};
    mb.generator_count = static_cast<int>(ball->generating_sets[ball->gamma_vertex[ball->basepoint]].size());
    for (int x = 0; x < ball->vertex_count(); ++x) mb.labels.push_back(ball->vertex_string(x));
    return mb;
  }
  throw Error(ErrorCode::ParseError, "input: expected kind 'presentation' or 'graph_of_groups', got '" + kind + "'");
}

inline void ball_cmd(Context& cx) {
  auto mb = metric_ball(cx);
  const Graph& g = mb.graph();
  std::map<int, int> layers;
  for (int v = 0; v < g.vertex_count(); ++v) ++layers[mb.metric.distance(mb.basepoint(), v)];
  Json lj = Json::array();
  for (auto [d, n] : layers) lj.push_back(n);
  cx.result = {{"vertices", g.vertex_count()}, {"edge_pairs", g.pair_count()}, {"layers", lj}};
  cx.lines.push_back("vertices " + std::to_string(g.vertex_count()) + ", edges " + std::to_string(g.pair_count()));
  std::string ls;
  for (auto [d, n] : layers) ls += (ls.empty() ? "" : " ") + std::to_string(n);
  cx.lines.push_back("layers " + ls);
  if (mb.space) {
    auto tree = project_tree(*mb.space);
    cx.result["tree"] = {{"vertices", tree.vertex_count()}, {"edge_pairs", tree.graph.pair_count()}, {"depth", tree.depth}};
    cx.lines.push_back("tree vertices " + std::to_string(tree.vertex_count()) + ", depth " + std::to_string(tree.depth));
    cx.dot = to_dot(*mb.space);
  } else {
    cx.dot = to_dot(g, mb.labels, {}, "Cayley");
  }
}

// Segment along generator `letter` through the basepoint, or empty when it
// leaves the ball.
inline Path axis_segment(const MetricBall& mb, Letter letter, int n) {
  const Graph& g = mb.graph();
  const auto& letters = mb.letters();
  auto step = [&](int x, Letter l) {
    for (EdgeId e : g.out_edges(x))
      if (letters[e] == l) return g.target(e);
    return -1;
  };
  int x = mb.basepoint();
  for (int i = 0; i < n / 2 && x >= 0; ++i) x = step(x, -letter);
  Path p;
  for (int i = 0; i <= n && x >= 0; ++i) {
    p.push_back(x);
    if (i < n) x = step(x, letter);
  }
  if (x < 0) return {};
  return p;
}

inline Json value_json(const CriticalValue& v) { return {{"value", v.value}, {"at_least", v.at_least}}; }

inline void critical_values_cmd(Context& cx) {
  auto mb = metric_ball(cx);
  auto c = parse_quasi_constant(cx.job.qc);
  int max_len = cx.job.max_length >= 0 ? cx.job.max_length : cx.job.radius;
  cx.options["qc"] = cx.job.qc;
  cx.options["max_length"] = max_len;
  Json rows = Json::array();
  for (int i = 1; i <= mb.generator_count; ++i)
    for (int n = 1; n <= max_len; ++n) {
      Path seg = axis_segment(mb, static_cast<Letter>(i), n);
      if (seg.empty() || !is_geodesic(mb.metric, seg)) continue;
      auto v = critical_value(mb.metric, seg, c);
      rows.push_back({{"generator", i}, {"length", n}, {"critical_value", value_json(v)}});
      cx.lines.push_back("s" + std::to_string(i) + "^" + std::to_string(n) + "  " + v.to_string());
    }
  cx.result = {{"segments", rows}};
}

inline void bad_segments_cmd(Context& cx) {
  auto mb = metric_ball(cx);
  auto c = parse_quasi_constant(cx.job.qc);
  cx.options["qc"] = cx.job.qc;
  cx.options["threshold"] = cx.job.threshold;
  cx.options["max_length"] = cx.job.max_length;
  auto bad = find_bad_segments(mb.metric, c, cx.job.threshold, cx.job.max_length);
  Json rows = Json::array();
  for (const auto& b : bad) {
    Json pts = Json::array();
    std::string text;
    for (int x : b.segment) {
      pts.push_back(mb.labels[x]);
      text += (text.empty() ? "" : " -> ") + mb.labels[x];
    }
    rows.push_back({{"segment", pts}, {"critical_value", value_json(b.value)}});
    cx.lines.push_back(b.value.to_string() + "  " + text);
  }
  cx.result = {{"bad_segments", rows}};
  cx.lines.insert(cx.lines.begin(), std::to_string(bad.size()) + " bad segments");
}

inline void check_tree_map_cmd(Context& cx, int& exit) {
  cx.need_radius();
  std::string kind = input_kind(cx.input);
  if (kind == "graph_of_groups") {
    auto gog = gog_from_json(cx.input);
    if (cx.job.vertex.empty()) throw Error(ErrorCode::InvalidInput, "--vertex is required for a local bijection");
    VertexId v = vertex_set_from_json(gog, Json::array({cx.job.vertex}), "--vertex")[0];
    auto lb = build_empty_boundary_bijection(gog, v, cx.job.radius, cx.limits());
    Json classes = Json::array();
    for (const auto& c : lb.classes)
      classes.push_back({{"edge", c.edge}, {"cosets", c.coset_rep.size()}});
    Json table = Json::array();
    for (auto [k, n] : lb.length_table) table.push_back({k.first, k.second, n});
    cx.result = {{"classes", classes}, {"conditions", verdicts_json(lb.conditions)}, {"length_table", table}};
    for (const auto& c : lb.conditions) cx.lines.push_back(c.name + ": " + c.status + " (" + c.detail + ")");
    return;
  }
  check_header(cx.input, "tree_map");
  auto dom = gog_from_json(detail::field(cx.input, "domain", "input"), "input/domain");
  auto cod = gog_from_json(detail::field(cx.input, "codomain", "input"), "input/codomain");
  auto dspace = bass_serre_ball(dom, cx.job.radius, cx.limits());
  auto cspace = bass_serre_ball(cod, cx.job.radius, cx.limits());
  auto dtree = project_tree(dspace), ctree = project_tree(cspace);
  TreeMapInput in;
  in.domain = &dtree;
  in.codomain = &ctree;
  const Json& phi = detail::field(cx.input, "phi", "input");
  if (phi.is_string() && phi.get<std::string>() == "identity") {
    if (gog_hash(dom) != gog_hash(cod)) throw Error(ErrorCode::BadMap, "identity map needs equal graphs of groups");
    in.phi.resize(dtree.vertex_count());
    std::iota(in.phi.begin(), in.phi.end(), 0);
  } else {
    in.phi = detail::get_as<std::vector<int>>(phi, "input/phi");
  }
  for (const auto& g : cod.vertex_group) {
    auto e = KnowledgeBase::builtin().properties_of(g).has_empty_morse_boundary;
    in.codomain_boundary_nonempty.push_back(e == Truth::True ? Truth::False : e == Truth::False ? Truth::True : Truth::Unknown);
  }
  if (cx.input.contains("identity_boundary_stubs"))
    in.identity_boundary_stubs = detail::get_as<bool>(cx.input.at("identity_boundary_stubs"), "input/identity_boundary_stubs");
  auto rep = check_tree_map(in);
  cx.result = {{"conditions", verdicts_json(rep.conditions)}, {"coarse_constant", rep.coarse_constant}, {"ok", rep.ok()}};
  for (const auto& c : rep.conditions) cx.lines.push_back(c.name + ": " + c.status + " (" + c.detail + ")");
  if (!rep.ok()) exit = kExitHypothesis;
}

}  // namespace cli_detail

inline JobResult run_job(const JobSpec& job);

namespace cli_detail {

inline JobResult run_corpus(const JobSpec& job) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(job.input)) throw Error(ErrorCode::InvalidInput, "corpus: '" + job.input + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(job.input))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<std::future<std::pair<JobResult, std::string>>> jobs;
  for (const auto& f : files)
    jobs.push_back(std::async(std::launch::async, [f, job] {
      JobSpec sub = job;
      sub.input = f;
      sub.json = true;
      sub.dot.clear();
      std::string expected;
      try {
        Json j = read_json_file(f);
        std::string kind = input_kind(j);
        sub.command = kind == "decomposition" ? "classify" : kind == "graph_of_groups" ? (j.contains("W") ? "reduce" : "validate-star")
                                                                                     : "ball";
        if (j.contains("expected") && j.at("expected").is_string()) expected = j.at("expected").get<std::string>();
      } catch (const Error& e) {
        return std::pair{JobResult{exit_code_for(e.code()), "", e.what(), nullptr}, expected};
      }
      return std::pair{run_job(sub), expected};
    }));
  JobResult out;
  Json rows = Json::array();
  std::ostringstream text;
  int mismatches = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    auto [r, expected] = jobs[i].get();
    std::string rel = fs::relative(files[i], job.input).generic_string();
    Json row = {{"file", rel}, {"exit", r.exit}};
    std::string got;
    if (r.result.is_object() && r.result.contains("boundary")) got = r.result.at("boundary").get<std::string>();
    if (!got.empty()) row["boundary"] = got;
    if (!r.error.empty()) row["error"] = r.error;
    bool ok = r.exit == kExitOk && (expected.empty() || expected == got);
    if (!expected.empty()) row["expected"] = expected;
    row["ok"] = ok;
    mismatches += !ok;
    rows.push_back(row);
    text << (ok ? "ok   " : "FAIL ") << rel << "  " << (got.empty() ? "exit " + std::to_string(r.exit) : got)
         << (expected.empty() || ok ? "" : "  (expected " + expected + ")") << "\n";
  }
  text << files.size() - mismatches << "/" << files.size() << " ok\n";
  out.result = {{"files", rows}, {"failures", mismatches}};
  out.exit = mismatches ? kExitUsage : kExitOk;
  if (job.json) {
    Json rep = {{"tool", "morse-atlas"}, {"version", kVersion}, {"command", "corpus"}, {"result", out.result}};
    out.report = rep.dump(2) + "\n";
  } else {
    out.report = text.str();
  }
  return out;
}

}  // namespace cli_detail

/// Runs one command; never throws.
inline JobResult run_job(const JobSpec& job) {
  JobResult out;
  try {
    if (std::find(command_names().begin(), command_names().end(), job.command) == command_names().end())
      throw Error(ErrorCode::InvalidInput, "unknown command '" + job.command + "'");
    if (job.command == "corpus") return cli_detail::run_corpus(job);
    Json input = read_json_file(job.input);
    cli_detail::Context cx{job, input, {}, Json::object(), Json::object(), {}};
    int exit = kExitOk;
    const auto& c = job.command;
    if (c == "classify") cli_detail::classify_cmd(cx);
    else if (c == "validate-star") cli_detail::validate_star_cmd(cx, exit);
    else if (c == "trivialize") cli_detail::trivialize_cmd(cx);
    else if (c == "reduce") cli_detail::reduce_cmd(cx);
    else if (c == "ball") cli_detail::ball_cmd(cx);
    else if (c == "critical-values") cli_detail::critical_values_cmd(cx);
    else if (c == "bad-segments") cli_detail::bad_segments_cmd(cx);
    else if (c == "check-tree-map") cli_detail::check_tree_map_cmd(cx, exit);
    if (!job.vertex.empty()) cx.options["vertex"] = job.vertex;
    Json report = {{"tool", "morse-atlas"}, {"version", kVersion}, {"command", c},
                   {"options", cx.options}, {"input", input}, {"result", cx.result}};
    out.result = cx.result;
    out.exit = exit;
    if (job.json) {
      out.report = report.dump(2) + "\n";
    } else {
      std::ostringstream os;
      for (const auto& l : cx.lines) os << l << "\n";
      os << "input " << fnv1a_hex(canonical(input)) << " " << canonical(input) << "\n";
      out.report = os.str();
    }
    if (!job.dot.empty()) {
      if (cx.dot.empty()) throw Error(ErrorCode::InvalidInput, "--dot is not supported for " + c);
      std::ofstream f(job.dot);
      if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + job.dot);
      f << cx.dot;
    }
  } catch (const Error& e) {
    out.exit = exit_code_for(e.code());
    out.error = e.what();
    if (e.code() == ErrorCode::HypothesisViolated && e.detail() > 0)
      out.error += " [assumption " + std::to_string(e.detail()) + "]";
    out.result = nullptr;
  } catch (const std::exception& e) {
    out.exit = kExitUsage;
    out.error = std::string("error: ") + e.what();
  }
  return out;
}

}  // namespace morse_atlas
