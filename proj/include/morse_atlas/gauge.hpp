#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace morse_atlas {

/// Closed-form Morse gauge M(l, e) built from nonnegative constants, l, e,
/// +, * and max. Every such expression is nondecreasing in both arguments.
class MorseGauge {
 public:
  MorseGauge() : MorseGauge(parse("l + e")) {}

  static MorseGauge parse(const std::string& text) {
    Parser p{text, 0};
    MorseGauge g(Empty{});
    g.root_ = p.expr(g.nodes_);
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    return g;
  }

  static MorseGauge constant(double c) { return parse(number_string(c)); }

  /// a * M + b, used as the inflation standing in for gauge-to-gauge maps.
  MorseGauge inflated(double a, double b) const {
    MorseGauge g = *this;
    int ca = g.add({Op::Const, a, {}});
    int mul = g.add({Op::Mul, 0, {ca, root_}});
    int cb = g.add({Op::Const, b, {}});
    g.root_ = g.add({Op::Add, 0, {mul, cb}});
    return g;
  }

  double operator()(double lambda, double eps) const { return eval(root_, lambda, eps); }

  std::string to_string() const { return show(root_); }

  /// Spot check of monotonicity on a grid of (l, e) values.
  bool monotone_on_grid(int steps = 6) const {
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) {
        double l = 1 + i, e = j;
        double v = (*this)(l, e);
        if ((*this)(l + 1, e) < v || (*this)(l, e + 1) < v) return false;
      }
    return true;
  }

 private:
  struct Empty {};
  explicit MorseGauge(Empty) {}

  enum class Op { Const, Lambda, Eps, Add, Mul, Max };
  struct Node {
    Op op;
    double value;
    std::vector<int> args;
  };

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  double eval(int i, double l, double e) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Lambda: return l;
      case Op::Eps: return e;
      case Op::Add: {
        double s = 0;
        for (int a : n.args) s += eval(a, l, e);
        return s;
      }
      case Op::Mul: {
        double s = 1;
        for (int a : n.args) s *= eval(a, l, e);
        return s;
      }
      case Op::Max: {
        double s = eval(n.args[0], l, e);
        for (int a : n.args) s = std::max(s, eval(a, l, e));
        return s;
      }
    }
    return 0;
  }

  static std::string number_string(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
  }

  std::string show(int i) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Const: return number_string(n.value);
      case Op::Lambda: return "l";
      case Op::Eps: return "e";
      case Op::Add:
      case Op::Mul: {
        std::string sep = n.op == Op::Add ? " + " : "*";
        std::string s;
        for (size_t k = 0; k < n.args.size(); ++k) {
          std::string part = show(n.args[k]);
          if (n.op == Op::Mul && nodes_[n.args[k]].op == Op::Add) part = "(" + part + ")";
          s += (k ? sep : "") + part;
        }
        return s;
      }
      case Op::Max: {
        std::string s = "max(";
        for (size_t k = 0; k < n.args.size(); ++k) s += (k ? ", " : "") + show(n.args[k]);
        return s + ")";
      }
    }
    return "";
  }

  struct Parser {
    const std::string& text;
    size_t pos;

    [[noreturn]] void fail(const std::string& why) const {
      throw Error(ErrorCode::ParseError, "gauge '" + text + "' column " + std::to_string(pos + 1) + ": " + why);
    }
    void skip() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    bool eat_word(const std::string& w) {
      skip();
      if (text.compare(pos, w.size(), w) != 0) return false;
      size_t end = pos + w.size();
      if (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
        return false;
      pos = end;
      return true;
    }
    int push(std::vector<Node>& nodes, Node n) {
      nodes.push_back(std::move(n));
      return static_cast<int>(nodes.size()) - 1;
    }
    int expr(std::vector<Node>& nodes) {
      std::vector<int> terms{term(nodes)};
      while (eat('+')) terms.push_back(term(nodes));
      return terms.size() == 1 ? terms[0] : push(nodes, {Op::Add, 0, terms});
    }
    int term(std::vector<Node>& nodes) {
      std::vector<int> factors{factor(nodes)};
      while (eat('*')) factors.push_back(factor(nodes));
      return factors.size() == 1 ? factors[0] : push(nodes, {Op::Mul, 0, factors});
    }
    int factor(std::vector<Node>& nodes) {
      skip();
      if (eat('(')) {
        int e = expr(nodes);
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      if (eat_word("max")) {
        if (!eat('(')) fail("expected '(' after max");
        std::vector<int> args{expr(nodes)};
        while (eat(',')) args.push_back(expr(nodes));
        if (!eat(')')) fail("expected ')'");
        return push(nodes, {Op::Max, 0, args});
      }
      for (const char* w : {"lambda", "l", "\xce\xbb"})
        if (eat_word(w)) return push(nodes, {Op::Lambda, 0, {}});
      for (const char* w : {"eps", "e", "\xce\xb5"})
        if (eat_word(w)) return push(nodes, {Op::Eps, 0, {}});
      if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
        size_t used = 0;
        double v = 0;
        try {
          v = std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        if (!std::isfinite(v)) fail("number out of range");
        pos += used;
        return push(nodes, {Op::Const, v, {}});
      }
      if (pos < text.size() && text[pos] == '-') fail("negative constants would break monotonicity");
      fail(pos < text.size() ? "unexpected '" + std::string(1, text[pos]) + "'" : "unexpected end");
    }
  };

  std::vector<Node> nodes_;
  int root_ = 0;
};

/// max{4 M(1, 2 M(5,0)) + 2 M(5,0), 8 M(3,0)}.
inline double delta_M(const MorseGauge& M) {
  double m50 = M(5, 0);
  return std::max(4 * M(1, 2 * m50) + 2 * m50, 8 * M(3, 0));
}

struct QuasiConstant {
  double lambda = 1;
  double eps = 0;
};

inline QuasiConstant parse_quasi_constant(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "expected 'lambda,eps' in '" + text + "'");
  QuasiConstant c;
  try {
    size_t used = 0;
    c.lambda = std::stod(text.substr(0, comma), &used);
    c.eps = std::stod(text.substr(comma + 1), &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad quasi-geodesic constant '" + text + "'");
  }
  if (c.lambda < 1 || c.eps < 0) throw Error(ErrorCode::InvalidInput, "need lambda >= 1 and eps >= 0");
  return c;
}

/// Grid used for Morse checks when none is given.
inline std::vector<QuasiConstant> default_gauge_grid() { return {{1, 0}, {2, 0}, {3, 0}, {3, 3}, {5, 0}}; }

}  // namespace morse_atlas
