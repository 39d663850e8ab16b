#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "word.hpp"

namespace morse_atlas {

using IntMatrix = std::vector<std::vector<int64_t>>;

namespace detail {

inline int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(ErrorCode::InvalidInput, "integer overflow in Smith normal form");
  return r;
}

inline int64_t checked_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Error(ErrorCode::InvalidInput, "integer overflow in Smith normal form");
  return r;
}

// a -= q * b
inline void row_axpy(std::vector<int64_t>& a, const std::vector<int64_t>& b, int64_t q) {
  for (size_t j = 0; j < a.size(); ++j)
    if (b[j]) a[j] = checked_sub(a[j], checked_mul(q, b[j]));
}

}  // namespace detail

/// Diagonal of the Smith normal form (nonzero entries only, each dividing the
/// next, all positive).
inline std::vector<int64_t> smith_diagonal(IntMatrix m) {
  using detail::checked_mul;
  using detail::checked_sub;
  const size_t rows = m.size();
  const size_t cols = rows ? m[0].size() : 0;
  std::vector<int64_t> diag;
  size_t t = 0;
  while (t < rows && t < cols) {
    // pivot: smallest nonzero absolute value in the remaining block
    size_t pr = rows, pc = cols;
    int64_t best = 0;
    for (size_t i = t; i < rows; ++i)
      for (size_t j = t; j < cols; ++j)
        if (m[i][j] && (best == 0 || std::llabs(m[i][j]) < best)) {
          best = std::llabs(m[i][j]);
          pr = i;
          pc = j;
        }
    if (best == 0) break;
    std::swap(m[t], m[pr]);
    for (auto& row : m) std::swap(row[t], row[pc]);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (size_t i = t + 1; i < rows; ++i) {
        if (!m[i][t]) continue;
        int64_t q = m[i][t] / m[t][t];
        detail::row_axpy(m[i], m[t], q);
        if (m[i][t]) {
          std::swap(m[t], m[i]);
          clean = false;
        }
      }
      for (size_t j = t + 1; j < cols; ++j) {
        if (!m[t][j]) continue;
        int64_t q = m[t][j] / m[t][t];
        for (size_t i = 0; i < rows; ++i)
          if (m[i][t]) m[i][j] = checked_sub(m[i][j], checked_mul(q, m[i][t]));
        if (m[t][j]) {
          for (auto& row : m) std::swap(row[t], row[j]);
          clean = false;
        }
      }
      if (clean) {
        // enforce divisibility into the rest of the block
        for (size_t i = t + 1; i < rows && clean; ++i)
          for (size_t j = t + 1; j < cols && clean; ++j)
            if (m[i][j] % m[t][t] != 0) {
              for (size_t k = t; k < cols; ++k) m[t][k] = checked_sub(m[t][k], -m[i][k]);
              clean = false;
            }
      }
    }
    diag.push_back(std::llabs(m[t][t]));
    ++t;
  }
  return diag;
}

struct AbelianInvariants {
  int rank = 0;
  std::vector<int64_t> torsion;  // invariant factors > 1, each divides the next

  bool operator==(const AbelianInvariants&) const = default;

  std::string to_string() const {
    std::string out;
    auto add = [&](const std::string& s) { out += out.empty() ? s : " x " + s; };
    if (rank == 1) add("Z");
    if (rank > 1) add("Z^" + std::to_string(rank));
    for (int64_t d : torsion) add("Z/" + std::to_string(d));
    return out.empty() ? "1" : out;
  }
};

/// Relation matrix: one row per relator, exponent sums per generator.
inline IntMatrix relation_matrix(int generator_count, const std::vector<Word>& relators) {
  IntMatrix m;
  for (const Word& r : relators) {
    std::vector<int64_t> row(generator_count, 0);
    for (Letter x : r) row[gen_index(x)] += x > 0 ? 1 : -1;
    m.push_back(std::move(row));
  }
  return m;
}

inline AbelianInvariants abelianization(int generator_count, const std::vector<Word>& relators) {
  AbelianInvariants inv;
  std::vector<int64_t> diag;
  if (generator_count > 0 && !relators.empty())
    diag = smith_diagonal(relation_matrix(generator_count, relators));
  inv.rank = generator_count - static_cast<int>(diag.size());
  for (int64_t d : diag)
    if (d > 1) inv.torsion.push_back(d);
  return inv;
}

}  // namespace morse_atlas
