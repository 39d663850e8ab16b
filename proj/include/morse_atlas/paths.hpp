#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bass_serre.hpp"
#include "error.hpp"
#include "gauge.hpp"
#include "graph.hpp"
#include "group.hpp"

namespace morse_atlas {

using Path = std::vector<int>;  // vertex sequence; length = size() - 1

inline int path_length(const Path& p) { return p.empty() ? 0 : static_cast<int>(p.size()) - 1; }

/// Metric view of a finite ball: intrinsic graph metric, a basepoint, the
/// truncation radius and a vertex order (shortlex on labels) for
/// tie-breaking. Distances are computed lazily per source.
class BallMetric {
 public:
  BallMetric(const Graph& g, int basepoint, int radius, std::vector<int> depth, std::vector<int> rank)
      : graph_(&g), basepoint_(basepoint), radius_(radius), depth_(std::move(depth)), rank_(std::move(rank)) {
    int n = g.vertex_count();
    adj_.resize(n);
    for (int v = 0; v < n; ++v) {
      for (EdgeId e : g.out_edges(v)) adj_[v].push_back(g.target(e));
      auto& a = adj_[v];
      std::sort(a.begin(), a.end(), [&](int x, int y) { return rank_[x] < rank_[y]; });
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    rows_.resize(n);
  }

  const Graph& graph() const { return *graph_; }
  int vertex_count() const { return graph_->vertex_count(); }
  int basepoint() const { return basepoint_; }
  int radius() const { return radius_; }
  int depth(int v) const { return depth_[v]; }
  int rank(int v) const { return rank_[v]; }
  bool on_boundary(int v) const { return depth_[v] >= radius_; }
  // Neighbors, deduplicated, in vertex order.
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }

  void check(int v) const {
    if (v < 0 || v >= vertex_count()) throw Error(ErrorCode::NotInBall, "vertex " + std::to_string(v) + " not in ball");
  }

  const std::vector<int>& from(int v) const {
    check(v);
    auto& row = rows_[v];
    if (row.empty()) {
      row.assign(vertex_count(), -1);
      std::deque<int> queue{v};
      row[v] = 0;
      while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (int y : adj_[x])
          if (row[y] < 0) {
            row[y] = row[x] + 1;
            queue.push_back(y);
          }
      }
    }
    return row;
  }

  int distance(int a, int b) const { return from(a)[b]; }

  bool path_less(const Path& a, const Path& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return rank_[a[i]] < rank_[b[i]];
    return false;
  }

 private:
  const Graph* graph_;
  int basepoint_;
  int radius_;
  std::vector<int> depth_;
  std::vector<int> rank_;
  std::vector<std::vector<int>> adj_;
  mutable std::vector<std::vector<int>> rows_;
};

inline std::vector<int> rank_by(int n, const std::function<bool(int, int)>& less) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;
  return rank;
}

inline BallMetric metric_of(const CayleyBall& ball) {
  int n = ball.graph.vertex_count();
  return BallMetric(ball.graph, ball.basepoint, ball.radius, ball.depth, rank_by(n, [&](int a, int b) {
                      return shortlex_less(ball.element[a], ball.element[b]);
                    }));
}

inline BallMetric metric_of(const SpaceBall& ball) {
  int n = ball.vertex_count();
  return BallMetric(ball.graph, ball.basepoint, ball.radius, ball.depth,
                    rank_by(n, [&](int a, int b) { return ball.vertex_less(a, b); }));
}

inline void check_path(const BallMetric& m, const Path& p) {
  if (p.empty()) throw Error(ErrorCode::InvalidInput, "empty path");
  for (int v : p) m.check(v);
  for (size_t i = 1; i < p.size(); ++i) {
    const auto& nb = m.neighbors(p[i - 1]);
    if (std::find(nb.begin(), nb.end(), p[i]) == nb.end())
      throw Error(ErrorCode::InvalidInput, "consecutive path vertices are not adjacent");
  }
}

inline bool is_geodesic(const BallMetric& m, const Path& p) {
  check_path(m, p);
  return m.distance(p.front(), p.back()) == path_length(p);
}

struct GeodesicSet {
  std::vector<Path> paths;  // shortlex order
  int distance = 0;
  bool caution = false;  // endpoints far enough out that the ball metric may differ from X
};

/// All shortest paths from x to y in the ball metric.
inline GeodesicSet geodesics(const BallMetric& m, int x, int y, size_t max_paths = 1000000) {
  m.check(x);
  m.check(y);
  const auto& to_y = m.from(y);
  if (to_y[x] < 0) throw Error(ErrorCode::NotInBall, "target not reachable within the ball");
  GeodesicSet out;
  out.distance = to_y[x];
  out.caution = m.depth(x) + m.depth(y) > m.radius();
  Path cur{x};
  std::function<void()> rec = [&]() {
    int v = cur.back();
    if (v == y) {
      if (out.paths.size() >= max_paths)
        throw Error(ErrorCode::BallTooLarge, "more than " + std::to_string(max_paths) + " geodesics");
      out.paths.push_back(cur);
      return;
    }
    for (int w : m.neighbors(v))
      if (to_y[w] == to_y[v] - 1) {
        cur.push_back(w);
        rec();
        cur.pop_back();
      }
  };
  rec();
  return out;
}

/// Shortlex-least geodesic from x to y (greedy on the vertex order).
inline Path first_geodesic(const BallMetric& m, int x, int y) {
  m.check(x);
  m.check(y);
  const auto& to_y = m.from(y);
  if (to_y[x] < 0) throw Error(ErrorCode::NotInBall, "target not reachable within the ball");
  Path p{x};
  while (p.back() != y) {
    int v = p.back();
    for (int w : m.neighbors(v))
      if (to_y[w] == to_y[v] - 1) {
        p.push_back(w);
        break;
      }
  }
  return p;
}

namespace detail {
inline constexpr double kSlack = 1e-9;
inline int budget_for(double lambda, double eps, int d) {
  return static_cast<int>(std::floor(lambda * d + eps + kSlack));
}
}  // namespace detail

/// Depth-first enumeration of the paths from x to y of length <= cap whose
/// every subpath p satisfies len(p) <= lambda * d(p-, p+) + eps.
class QuasiGeodesics {
 public:
  QuasiGeodesics(const BallMetric& m, int x, int y, QuasiConstant c, int length_cap)
      : m_(&m), y_(y), c_(c) {
    if (c.lambda < 1 || c.eps < 0) throw Error(ErrorCode::InvalidInput, "need lambda >= 1 and eps >= 0");
    m.check(x);
    m.check(y);
    to_y_ = &m.from(y);
    int d = (*to_y_)[x];
    budget_ = d < 0 ? -1 : std::min(length_cap, detail::budget_for(c.lambda, c.eps, d));
    if (budget_ >= 0) {
      path_.push_back(x);
      cursor_.push_back(0);
      pending_ = x == y;
      if (m.on_boundary(x)) hit_boundary_ = true;
    }
  }

  std::optional<Path> next() {
    if (pending_) {
      pending_ = false;
      return path_;
    }
    while (!path_.empty()) {
      int cur = path_.back();
      const auto& nb = m_->neighbors(cur);
      size_t& c = cursor_.back();
      if (c == nb.size()) {
        path_.pop_back();
        cursor_.pop_back();
        continue;
      }
      int w = nb[c++];
      if (!admissible(w)) continue;
      path_.push_back(w);
      cursor_.push_back(0);
      if (m_->on_boundary(w)) hit_boundary_ = true;
      if (w == y_) return path_;
    }
    return std::nullopt;
  }

  int budget() const { return budget_; }
  bool hit_boundary() const { return hit_boundary_; }

 private:
  bool admissible(int w) const {
    int len = static_cast<int>(path_.size());
    int rest = (*to_y_)[w];
    if (rest < 0 || len + rest > budget_) return false;
    const auto& dw = m_->from(w);
    for (size_t i = 0; i < path_.size(); ++i)
      if (len - static_cast<int>(i) > c_.lambda * dw[path_[i]] + c_.eps + detail::kSlack) return false;
    return true;
  }

  const BallMetric* m_;
  int y_;
  QuasiConstant c_;
  const std::vector<int>* to_y_ = nullptr;
  int budget_ = -1;
  Path path_;
  std::vector<size_t> cursor_;
  bool pending_ = false;
  bool hit_boundary_ = false;
};

inline std::vector<Path> quasi_geodesics(const BallMetric& m, int x, int y, QuasiConstant c, int length_cap) {
  QuasiGeodesics it(m, x, y, c, length_cap);
  std::vector<Path> out;
  while (auto p = it.next()) out.push_back(std::move(*p));
  return out;
}

/// Deviation bound at a finite scale. `at_least` means the search met the
/// ball boundary (or stopped early), so the true value may be larger.
struct CriticalValue {
  int value = 0;
  bool at_least = false;
  Path witness;  // a quasi-geodesic realizing `value`
  QuasiConstant constant;
  int radius = 0;
  int max_budget = 0;

  std::string to_string() const { return (at_least ? ">= " : "") + std::to_string(value); }
};

namespace detail {

// Branch and bound over admissible paths between two points of a segment,
// maximizing the distance to the segment; stops once `stop_at` is reached.
class DeviationSearch {
 public:
  DeviationSearch(const BallMetric& m, const std::vector<int>& dev, QuasiConstant c, int stop_at)
      : m_(m), dev_(dev), c_(c), stop_at_(stop_at) {}

  void run(int x, int y, int budget, CriticalValue& best) {
    to_y_ = &m_.from(y);
    y_ = y;
    budget_ = budget;
    best_ = &best;
    path_.assign(1, x);
    if ((*to_y_)[x] < 0 || (*to_y_)[x] > budget) return;
    if (m_.on_boundary(x)) boundary_ = true;
    dfs(dev_[x]);
  }

  bool boundary() const { return boundary_; }
  bool done() const { return best_ && best_->value >= stop_at_; }

 private:
  void dfs(int cur_max) {
    int v = path_.back();
    if (v == y_ && cur_max > best_->value) {
      best_->value = cur_max;
      best_->witness = path_;
      if (done()) return;
    }
    int len = static_cast<int>(path_.size()) - 1;
    int rem = budget_ - len;
    if (rem <= 0) return;
    // farthest reachable deviation with the remaining length
    int bound = std::max(cur_max, (rem + dev_[v]) / 2);
    if (bound <= best_->value) return;
    std::vector<int> order = m_.neighbors(v);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dev_[a] > dev_[b]; });
    for (int w : order) {
      if (!admissible(w)) continue;
      if (m_.on_boundary(w)) boundary_ = true;
      path_.push_back(w);
      dfs(std::max(cur_max, dev_[w]));
      path_.pop_back();
      if (done()) return;
    }
  }

  bool admissible(int w) const {
    int len = static_cast<int>(path_.size());
    int rest = (*to_y_)[w];
    if (rest < 0 || len + rest > budget_) return false;
    const auto& dw = m_.from(w);
    for (size_t i = 0; i < path_.size(); ++i)
      if (len - static_cast<int>(i) > c_.lambda * dw[path_[i]] + c_.eps + kSlack) return false;
    return true;
  }

  const BallMetric& m_;
  const std::vector<int>& dev_;
  QuasiConstant c_;
  int stop_at_;
  const std::vector<int>* to_y_ = nullptr;
  int y_ = 0;
  int budget_ = 0;
  CriticalValue* best_ = nullptr;
  Path path_;
  bool boundary_ = false;
};

inline std::vector<int> distance_to_set(const BallMetric& m, const Path& seg) {
  std::vector<int> dev(m.vertex_count(), -1);
  std::deque<int> queue;
  for (int v : seg)
    if (dev[v] < 0) {
      dev[v] = 0;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y : m.neighbors(x))
      if (dev[y] < 0) {
        dev[y] = dev[x] + 1;
        queue.push_back(y);
      }
  }
  return dev;
}

}  // namespace detail

/// Largest distance from `seg` of a C-quasi-geodesic with both endpoints on
/// `seg`, searched exhaustively inside the ball. With `stop_at`, the search
/// ends as soon as that value is reached (the result is then a lower bound).
inline CriticalValue critical_value(const BallMetric& m, const Path& seg, QuasiConstant c,
                                    std::optional<int> stop_at = std::nullopt) {
  if (!is_geodesic(m, seg)) throw Error(ErrorCode::NotGeodesic, "segment is not a geodesic in the ball");
  if (c.lambda < 1 || c.eps < 0) throw Error(ErrorCode::InvalidInput, "need lambda >= 1 and eps >= 0");
  CriticalValue best;
  best.constant = c;
  best.radius = m.radius();
  best.witness = {seg.front()};
  auto dev = detail::distance_to_set(m, seg);
  int stop = stop_at.value_or(std::numeric_limits<int>::max());
  detail::DeviationSearch search(m, dev, c, stop);
  int n = static_cast<int>(seg.size());
  for (int i = 0; i < n && best.value < stop; ++i)
    for (int j = i; j < n && best.value < stop; ++j) {
      int budget = detail::budget_for(c.lambda, c.eps, j - i);
      best.max_budget = std::max(best.max_budget, budget);
      search.run(seg[i], seg[j], budget, best);
    }
  best.at_least = search.boundary() || (stop_at && best.value >= stop);
  return best;
}

struct BadSegment {
  Path segment;
  CriticalValue value;
};

/// Geodesic segments with the basepoint at their middle vertex (one per
/// reversal class) of length 1..max_length whose critical value at `c` is at
/// least `threshold`. Every segment is a translate of such a segment; this
/// centering keeps the search away from the ball boundary.
inline std::vector<BadSegment> find_bad_segments(const BallMetric& m, QuasiConstant c, int threshold,
                                                 int max_length = -1) {
  if (threshold < 0) throw Error(ErrorCode::InvalidInput, "threshold must be >= 0");
  if (max_length < 0) max_length = m.radius() / 2;
  std::vector<BadSegment> out;
  int base = m.basepoint();
  // geodesics of each length leaving the basepoint
  std::vector<std::vector<Path>> rays(max_length + 1);
  rays[0] = {{base}};
  for (int k = 1; k <= max_length; ++k)
    for (const Path& p : rays[k - 1])
      for (int w : m.neighbors(p.back()))
        if (m.distance(base, w) == k) {
          Path q = p;
          q.push_back(w);
          rays[k].push_back(std::move(q));
        }
  for (int len = 1; len <= max_length; ++len) {
    int back = len / 2, fwd = len - back;
    for (const Path& a : rays[back])
      for (const Path& b : rays[fwd]) {
        if (m.distance(a.back(), b.back()) != len) continue;
        Path seg(a.rbegin(), a.rend());
        seg.insert(seg.end(), b.begin() + 1, b.end());
        if (back == fwd) {
          Path rev(seg.rbegin(), seg.rend());
          if (m.path_less(rev, seg)) continue;
        }
        if (threshold == 0) {
          out.push_back({seg, {}});
          continue;
        }
        auto cv = critical_value(m, seg, c, threshold);
        if (cv.value >= threshold) out.push_back({seg, cv});
      }
  }
  return out;
}

struct SegmentSplit {
  int index = 0;
  Path first, second;
  CriticalValue first_value, second_value;
  QuasiConstant inflated;
};

/// Splits `seg` at an interior vertex, nearest the middle first, so that
/// both halves have critical value >= bound at (3 lambda + 2, 3 eps + 2).
inline SegmentSplit split_bad_segment(const BallMetric& m, const Path& seg, QuasiConstant c, int bound = 1) {
  if (!is_geodesic(m, seg)) throw Error(ErrorCode::NotGeodesic, "segment is not a geodesic in the ball");
  QuasiConstant big{3 * c.lambda + 2, 3 * c.eps + 2};
  int len = path_length(seg);
  std::vector<int> ks;
  for (int k = 1; k < len; ++k) ks.push_back(k);
  std::stable_sort(ks.begin(), ks.end(), [&](int a, int b) { return std::abs(2 * a - len) < std::abs(2 * b - len); });
  for (int k : ks) {
    SegmentSplit s;
    s.index = k;
    s.inflated = big;
    s.first.assign(seg.begin(), seg.begin() + k + 1);
    s.second.assign(seg.begin() + k, seg.end());
    s.first_value = critical_value(m, s.first, big, bound);
    if (s.first_value.value < bound) continue;
    s.second_value = critical_value(m, s.second, big, bound);
    if (s.second_value.value < bound) continue;
    return s;
  }
  throw Error(ErrorCode::NoSplitAtScale, "no interior split point reaches " + std::to_string(bound) +
                                             " at the inflated constant");
}

struct MorseVerdict {
  bool pass = true;
  std::vector<std::pair<QuasiConstant, CriticalValue>> checked;
  std::optional<QuasiConstant> failing;
  Path witness;
  int radius = 0;
};

/// PASS iff every enumerated C-quasi-geodesic with endpoints on `seg` stays
/// within M(C) of it, for each grid point C.
inline MorseVerdict is_morse_at_scale(const BallMetric& m, const Path& seg, const MorseGauge& M,
                                      const std::vector<QuasiConstant>& grid) {
  MorseVerdict v;
  v.radius = m.radius();
  for (const auto& c : grid) {
    double limit = M(c.lambda, c.eps);
    int stop = static_cast<int>(std::floor(limit + detail::kSlack)) + 1;
    auto cv = critical_value(m, seg, c, stop);
    v.checked.push_back({c, cv});
    if (cv.value > limit + detail::kSlack) {
      v.pass = false;
      v.failing = c;
      v.witness = cv.witness;
      return v;
    }
  }
  return v;
}

/// True iff d(xi(t), eta(t)) < delta_M for every integer t in [0, n].
inline bool neighborhood_member(const BallMetric& m, const Path& xi, const Path& eta, int n, const MorseGauge& M) {
  check_path(m, xi);
  check_path(m, eta);
  if (xi.front() != eta.front()) throw Error(ErrorCode::BadBasepoint, "paths start at different vertices");
  if (n < 0 || n > path_length(xi) || n > path_length(eta))
    throw Error(ErrorCode::InvalidInput, "n exceeds the path lengths");
  double delta = delta_M(M);
  for (int t = 0; t <= n; ++t) {
    int d = m.distance(xi[t], eta[t]);
    if (d < 0 || d >= delta - detail::kSlack) return false;
  }
  return true;
}

}  // namespace morse_atlas
