#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "error.hpp"

namespace morse_atlas {

// Letter +(i+1) is generator i, -(i+1) its inverse.
using Letter = int;
using Word = std::vector<Letter>;

inline int gen_index(Letter x) { return std::abs(x) - 1; }

inline Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Letter& x : out) x = -x;
  return out;
}

inline Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Word power(const Word& w, int k) {
  Word base = k < 0 ? inverse(w) : w;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

inline Word commutator(Letter a, Letter b) { return {a, b, -a, -b}; }

// Shifts generator indices by `offset` (used when gluing alphabets).
inline Word shift(const Word& w, int offset) {
  Word out = w;
  for (Letter& x : out) x = x > 0 ? x + offset : x - offset;
  return out;
}

// Letter order used for shortlex: a < A < b < B < ...
inline int letter_rank(Letter x) { return 2 * gen_index(x) + (x < 0 ? 1 : 0); }

inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return letter_rank(a[i]) < letter_rank(b[i]);
  return false;
}

inline std::string format_letter(Letter x, const std::vector<std::string>& names) {
  int i = gen_index(x);
  std::string name = i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i);
  return x > 0 ? name : name + "^-1";
}

/// Space-separated letters, "1" for the empty word.
inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += format_letter(w[i], names);
  }
  return out;
}

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
}

/// Parses tokens `name`, `name^k` separated by spaces or `*`; "1" or "" is
/// the identity. Unknown names are appended to `names` when `extend` is set.
inline Word parse_word(const std::string& text, std::vector<std::string>& names, bool extend) {
  Word out;
  size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "word '" + text + "' at offset " + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '*') {
      ++i;
      continue;
    }
    if (!is_name_char(c)) fail("unexpected character");
    size_t start = i;
    while (i < text.size() && is_name_char(text[i])) ++i;
    std::string name = text.substr(start, i - start);
    int exponent = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      size_t estart = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      std::string e = text.substr(estart, i - estart);
      if (e.empty() || e == "-" || e == "+") fail("missing exponent");
      exponent = std::stoi(e);
    }
    if (name == "1" && exponent == 1) continue;
    auto it = std::find(names.begin(), names.end(), name);
    int index;
    if (it == names.end()) {
      if (!extend) fail("unknown generator '" + name + "'");
      names.push_back(name);
      index = static_cast<int>(names.size()) - 1;
    } else {
      index = static_cast<int>(it - names.begin());
    }
    Letter x = exponent < 0 ? -(index + 1) : index + 1;
    for (int k = 0; k < std::abs(exponent); ++k) out.push_back(x);
  }
  return out;
}

inline Word parse_word(const std::string& text, const std::vector<std::string>& names) {
  std::vector<std::string> copy = names;
  return parse_word(text, copy, false);
}

}  // namespace morse_atlas
