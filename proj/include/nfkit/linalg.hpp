#pragma once
// Exact linear algebra: integer kernels (Hermite reduction), dense and sparse
// solves over the coefficient field.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nfkit/coeff.hpp"

namespace nfkit {

using IntMatrix = std::vector<std::vector<Integer>>;
using ScalarMatrix = std::vector<std::vector<Scalar>>;

namespace detail {

// Row-reduce M (in place) to Hermite form with unimodular row operations.
// Returns the pivot columns. Pivots are positive and entries above them are
// reduced into [0, pivot).
inline auto hermite_rows(IntMatrix &M) -> std::vector<int> {
  std::vector<int> pivots;
  if (M.empty()) return pivots;
  const int rows = static_cast<int>(M.size()), cols = static_cast<int>(M[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    // gcd-combine rows r..end on column c
    for (int i = r + 1; i < rows; ++i) {
      if (M[i][c] == 0) continue;
      if (M[r][c] == 0) {
        std::swap(M[r], M[i]);
        continue;
      }
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), M[r][c].get_mpz_t(), M[i][c].get_mpz_t());
      Integer a = M[r][c] / g, b = M[i][c] / g;
      for (int j = 0; j < cols; ++j) {
        Integer x = M[r][j], y = M[i][j];
        M[r][j] = s * x + t * y;
        M[i][j] = -b * x + a * y;
      }
    }
    if (M[r][c] == 0) continue;
    if (M[r][c] < 0)
      for (auto &x : M[r]) x = -x;
    for (int i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), M[i][c].get_mpz_t(), M[r][c].get_mpz_t());
      if (q != 0)
        for (int j = 0; j < cols; ++j) M[i][j] -= q * M[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

// Z-basis of {x in Z^n : A x = 0}, in Hermite normal form.
inline auto integer_kernel(const IntMatrix &A, int n) -> IntMatrix {
  // rows of [A^T | I]
  IntMatrix M(n);
  const int d = static_cast<int>(A.size());
  for (int i = 0; i < n; ++i) {
    M[i].assign(d + n, Integer(0));
    for (int j = 0; j < d; ++j) M[i][j] = A[j][i];
    M[i][d + i] = 1;
  }
  auto piv = detail::hermite_rows(M);
  int rank = 0;
  for (int c : piv)
    if (c < d) ++rank;
  IntMatrix K;
  for (int i = rank; i < n; ++i) K.emplace_back(M[i].begin() + d, M[i].end());
  detail::hermite_rows(K);
  while (!K.empty()) {
    bool zero = true;
    for (auto &x : K.back()) zero = zero && x == 0;
    if (!zero) break;
    K.pop_back();
  }
  return K;
}

// Solve K-linear system A x = b (A: rows x cols). Returns nullopt if
// inconsistent; free variables are set to zero.
inline auto solve_dense(ScalarMatrix A, std::vector<Scalar> b) -> std::optional<std::vector<Scalar>> {
  const int rows = static_cast<int>(A.size());
  const int cols = rows ? static_cast<int>(A[0].size()) : 0;
  std::vector<int> pivcol;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!A[i][c].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(A[p], A[r]);
    std::swap(b[p], b[r]);
    Scalar inv = A[r][c].inv();
    for (int j = c; j < cols; ++j) A[r][j] = A[r][j] * inv;
    b[r] = b[r] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || A[i][c].is_zero()) continue;
      Scalar f = A[i][c];
      for (int j = c; j < cols; ++j)
        if (!A[r][j].is_zero()) A[i][j] -= f * A[r][j];
      b[i] -= f * b[r];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (!b[i].is_zero()) return std::nullopt;
  const Field *f = b.empty() ? Field::rationals() : b[0].field();
  std::vector<Scalar> x(cols, Scalar(f));
  for (int i = 0; i < r; ++i) x[pivcol[i]] = b[i];
  return x;
}

inline auto rank(ScalarMatrix A) -> int {
  const int rows = static_cast<int>(A.size());
  const int cols = rows ? static_cast<int>(A[0].size()) : 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!A[i][c].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(A[p], A[r]);
    Scalar inv = A[r][c].inv();
    for (int i = r + 1; i < rows; ++i) {
      if (A[i][c].is_zero()) continue;
      Scalar f = A[i][c] * inv;
      for (int j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    ++r;
  }
  return r;
}

// Sparse square-ish system: rows are maps col -> coefficient. Gaussian
// elimination with pivots taken in column order. Returns nullopt when the
// system is singular on the given unknowns or inconsistent.
class SparseSystem {
 public:
  using Row = std::map<int, Scalar>;

  explicit SparseSystem(int unknowns) : n_(unknowns) {}
  void add_row(Row r, Scalar rhs) {
    rows_.push_back(std::move(r));
    rhs_.push_back(std::move(rhs));
  }

  auto solve(const Field *f) -> std::optional<std::vector<Scalar>> {
    std::vector<int> pivot_row(n_, -1);
    std::vector<bool> used(rows_.size(), false);
    // column -> rows containing it
    for (int c = 0; c < n_; ++c) {
      int p = -1;
      for (std::size_t i = 0; i < rows_.size(); ++i)
        if (!used[i] && rows_[i].count(c)) {
          p = static_cast<int>(i);
          break;
        }
      if (p < 0) return std::nullopt;
      used[p] = true;
      pivot_row[c] = p;
      Scalar inv = rows_[p][c].inv();
      for (auto &[j, v] : rows_[p]) v = v * inv;
      rhs_[p] = rhs_[p] * inv;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (static_cast<int>(i) == p) continue;
        auto it = rows_[i].find(c);
        if (it == rows_[i].end()) continue;
        Scalar fac = it->second;
        for (auto &[j, v] : rows_[p]) {
          auto jt = rows_[i].find(j);
          if (jt == rows_[i].end()) {
            rows_[i].emplace(j, -(fac * v));
          } else {
            jt->second -= fac * v;
            if (jt->second.is_zero()) rows_[i].erase(jt);
          }
        }
        rhs_[i] -= fac * rhs_[p];
      }
    }
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (!used[i] && !rhs_[i].is_zero()) return std::nullopt;
    std::vector<Scalar> x(n_, Scalar(f));
    for (int c = 0; c < n_; ++c) x[c] = rhs_[pivot_row[c]];
    return x;
  }

 private:
  int n_;
  std::vector<Row> rows_;
  std::vector<Scalar> rhs_;
};

}  // namespace nfkit
