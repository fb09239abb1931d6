#pragma once
// Integer exponent vectors, Bruno's set N and the degree-lex order.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "nfkit/coeff.hpp"

namespace nfkit {

inline constexpr int kMaxDim = 8;

class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(int n) : n_(static_cast<std::uint8_t>(n)) {
    if (n < 1 || n > kMaxDim) throw InvalidInput("dimension must be in 1..8");
  }
  Exponent(std::initializer_list<int> v) : Exponent(static_cast<int>(v.size())) {
    int i = 0;
    for (int x : v) e_[i++] = static_cast<std::int16_t>(x);
  }
  explicit Exponent(const std::vector<int> &v) : Exponent(static_cast<int>(v.size())) {
    for (std::size_t i = 0; i < v.size(); ++i) e_[i] = static_cast<std::int16_t>(v[i]);
  }

  static auto zero(int n) -> Exponent { return Exponent(n); }
  static auto unit(int n, int k) -> Exponent {
    Exponent e(n);
    e.e_[k] = 1;
    return e;
  }

  auto dim() const -> int { return n_; }
  auto operator[](int i) const -> int { return e_[i]; }
  void set(int i, int v) { e_[i] = static_cast<std::int16_t>(v); }

  auto sum() const -> int {
    int s = 0;
    for (int i = 0; i < n_; ++i) s += e_[i];
    return s;
  }
  // ||Q|| = |sum q_i|
  auto order() const -> int { return std::abs(sum()); }
  // |Q| = sum |q_i|
  auto size() const -> int {
    int s = 0;
    for (int i = 0; i < n_; ++i) s += std::abs(e_[i]);
    return s;
  }
  auto is_zero() const -> bool {
    for (int i = 0; i < n_; ++i)
      if (e_[i]) return false;
    return true;
  }
  auto nonnegative() const -> bool {
    for (int i = 0; i < n_; ++i)
      if (e_[i] < 0) return false;
    return true;
  }
  // index of the -1 entry, -1 if none; -2 if Q is outside N
  auto negative_index() const -> int {
    int idx = -1;
    for (int i = 0; i < n_; ++i) {
      if (e_[i] >= 0) continue;
      if (e_[i] < -1 || idx >= 0) return -2;
      idx = i;
    }
    return idx;
  }
  auto in_N() const -> bool { return negative_index() != -2; }
  // components k for which (x.e_k)x^Q is a polynomial field
  auto allows_component(int k) const -> bool {
    int i = negative_index();
    return i == -1 || i == k;
  }

  auto operator+(const Exponent &o) const -> Exponent {
    Exponent r(n_);
    for (int i = 0; i < n_; ++i) r.e_[i] = static_cast<std::int16_t>(e_[i] + o.e_[i]);
    return r;
  }
  auto operator-(const Exponent &o) const -> Exponent {
    Exponent r(n_);
    for (int i = 0; i < n_; ++i) r.e_[i] = static_cast<std::int16_t>(e_[i] - o.e_[i]);
    return r;
  }
  auto operator-() const -> Exponent { return Exponent(n_) - *this; }
  friend auto operator==(const Exponent &a, const Exponent &b) -> bool {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.e_[i] != b.e_[i]) return false;
    return true;
  }
  friend auto operator!=(const Exponent &a, const Exponent &b) -> bool { return !(a == b); }

  auto dot(const std::vector<Scalar> &v) const -> Scalar {
    Scalar s(v.empty() ? Field::rationals() : v[0].field());
    for (int i = 0; i < n_; ++i)
      if (e_[i]) s += v[i] * static_cast<long>(e_[i]);
    return s;
  }

  auto to_vector() const -> std::vector<int> { return std::vector<int>(e_.begin(), e_.begin() + n_); }

  auto str() const -> std::string {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) s += (i ? "," : "") + std::to_string(e_[i]);
    return s + ")";
  }

  auto hash() const -> std::size_t {
    std::size_t h = n_;
    for (int i = 0; i < n_; ++i) h = h * 1000003u + static_cast<std::uint16_t>(e_[i]);
    return h;
  }

 private:
  std::array<std::int16_t, kMaxDim> e_{};
  std::uint8_t n_ = 0;
};

// P < Q iff the first nonzero of ||Q||-||P||, q1-p1, ..., q_{n-1}-p_{n-1} is
// positive. The last coordinate breaks the remaining ties (sum of sign -1 vs 1).
struct DegLex {
  auto operator()(const Exponent &p, const Exponent &q) const -> bool {
    int op = p.order(), oq = q.order();
    if (op != oq) return op < oq;
    int n = p.dim();
    for (int i = 0; i + 1 < n; ++i)
      if (p[i] != q[i]) return p[i] < q[i];
    return p[n - 1] < q[n - 1];
  }
};

struct ExponentHash {
  auto operator()(const Exponent &e) const -> std::size_t { return e.hash(); }
};

inline auto weight(const Exponent &q, const std::vector<Scalar> &lambda) -> Scalar {
  if (static_cast<int>(lambda.size()) != q.dim()) throw DimensionMismatch();
  return q.dot(lambda);
}

namespace detail {

// all nonnegative vectors of length n with entries summing to s, fed to fn
inline void compositions(int n, int s, Exponent &cur, int pos, const std::function<void(const Exponent &)> &fn) {
  if (pos == n - 1) {
    cur.set(pos, s);
    fn(cur);
    return;
  }
  for (int v = s; v >= 0; --v) {
    cur.set(pos, v);
    compositions(n, s - v, cur, pos + 1, fn);
  }
}

}  // namespace detail

// Elements of N with sum exactly s (s >= -1).
inline auto exponents_with_sum(int n, int s) -> std::vector<Exponent> {
  std::vector<Exponent> out;
  Exponent cur(n);
  if (s >= 0) detail::compositions(n, s, cur, 0, [&](const Exponent &e) { out.push_back(e); });
  for (int i = 0; i < n; ++i) {
    // q_i = -1, the rest sum to s+1
    if (n == 1) {
      if (s == -1) out.push_back(Exponent{-1});
      continue;
    }
    Exponent sub(n - 1);
    detail::compositions(n - 1, s + 1, sub, 0, [&](const Exponent &e) {
      Exponent q(n);
      for (int j = 0, k = 0; j < n; ++j) q.set(j, j == i ? -1 : e[k++]);
      out.push_back(q);
    });
  }
  std::sort(out.begin(), out.end(), DegLex{});
  return out;
}

// Elements of N with min_order <= ||Q|| <= max_order, in degree-lex order.
// Sum -1 vectors (constant fields, order 1) are included only on request.
inline auto enumerate_N(int n, int min_order, int max_order, bool with_constants = false) -> std::vector<Exponent> {
  std::vector<Exponent> out;
  for (int s = std::max(0, min_order); s <= max_order; ++s) {
    auto part = exponents_with_sum(n, s);
    out.insert(out.end(), part.begin(), part.end());
  }
  if (with_constants && min_order <= 1 && max_order >= 1) {
    auto part = exponents_with_sum(n, -1);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end(), DegLex{});
  return out;
}

}  // namespace nfkit
