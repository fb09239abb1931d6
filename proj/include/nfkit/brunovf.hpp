#pragma once
// Truncated vector fields sum (x.F_Q) x^Q and the Lie calculus on them.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nfkit/coeff.hpp"
#include "nfkit/exponent.hpp"

namespace nfkit {

using Coeff = std::vector<Scalar>;

inline auto zero_coeff(const Field *f, int n) -> Coeff { return Coeff(n, Scalar(f)); }

inline auto is_zero(const Coeff &c) -> bool {
  for (auto &s : c)
    if (!s.is_zero()) return false;
  return true;
}

inline auto scaled(Coeff c, const Scalar &s) -> Coeff {
  for (auto &x : c) x = x * s;
  return c;
}

// <Q, v> for an integer vector Q
inline auto pairing(const Exponent &q, const Coeff &v) -> Scalar { return q.dot(v); }

// Exponent-keyed map of coefficient vectors in degree-lex order. Exponents are
// arbitrary integer vectors here; membership in N is checked by the owners.
class TermMap {
 public:
  using Map = std::map<Exponent, Coeff, DegLex>;
  using const_iterator = Map::const_iterator;

  TermMap() = default;
  TermMap(const Field *f, int n) : f_(f), n_(n) {}

  auto field() const -> const Field * { return f_; }
  auto dim() const -> int { return n_; }
  auto begin() const -> const_iterator { return m_.begin(); }
  auto end() const -> const_iterator { return m_.end(); }
  auto size() const -> std::size_t { return m_.size(); }
  auto empty() const -> bool { return m_.empty(); }
  auto find(const Exponent &q) const -> const_iterator { return m_.find(q); }
  auto contains(const Exponent &q) const -> bool { return m_.count(q) > 0; }
  auto upper_bound(const Exponent &q) const -> const_iterator { return m_.upper_bound(q); }
  auto lower_bound(const Exponent &q) const -> const_iterator { return m_.lower_bound(q); }
  auto map() const -> const Map & { return m_; }

  auto get(const Exponent &q) const -> Coeff {
    auto it = m_.find(q);
    return it == m_.end() ? zero_coeff(f_, n_) : it->second;
  }

  void set(const Exponent &q, Coeff c) {
    if (is_zero(c))
      m_.erase(q);
    else
      m_[q] = std::move(c);
  }
  void erase(const Exponent &q) { m_.erase(q); }

  void add(const Exponent &q, const Coeff &c) {
    if (is_zero(c)) return;
    auto [it, fresh] = m_.try_emplace(q, c);
    if (fresh) return;
    for (int i = 0; i < n_; ++i) it->second[i] += c[i];
    if (is_zero(it->second)) m_.erase(it);
  }
  void add_scaled(const Exponent &q, const Coeff &c, const Scalar &s) {
    if (s.is_zero()) return;
    add(q, scaled(c, s));
  }
  // add s to component k at q
  void add_component(const Exponent &q, int k, const Scalar &s) {
    if (s.is_zero()) return;
    auto it = m_.find(q);
    if (it == m_.end()) it = m_.emplace(q, zero_coeff(f_, n_)).first;
    it->second[k] += s;
    if (is_zero(it->second)) m_.erase(it);
  }

  auto operator+=(const TermMap &o) -> TermMap & {
    for (auto &[q, c] : o) add(q, c);
    return *this;
  }
  auto operator-=(const TermMap &o) -> TermMap & {
    for (auto &[q, c] : o) add_scaled(q, c, Scalar(-1));
    return *this;
  }
  friend auto operator+(TermMap a, const TermMap &b) -> TermMap { return a += b; }
  friend auto operator-(TermMap a, const TermMap &b) -> TermMap { return a -= b; }
  auto scaled_by(const Scalar &s) const -> TermMap {
    TermMap r(f_, n_);
    if (s.is_zero()) return r;
    for (auto &[q, c] : m_) r.m_.emplace(q, scaled(c, s));
    return r;
  }
  friend auto operator==(const TermMap &a, const TermMap &b) -> bool {
    if (a.m_.size() != b.m_.size()) return false;
    auto i = a.m_.begin();
    auto j = b.m_.begin();
    for (; i != a.m_.end(); ++i, ++j) {
      if (i->first != j->first) return false;
      for (int k = 0; k < a.n_; ++k)
        if (i->second[k] != j->second[k]) return false;
    }
    return true;
  }

  auto min_order() const -> int {
    int r = 1 << 20;
    for (auto &kv : m_) r = std::min(r, kv.first.order());
    return r;
  }
  auto max_order() const -> int {
    int r = -1;
    for (auto &kv : m_) r = std::max(r, kv.first.order());
    return r;
  }
  auto all_sums_nonnegative() const -> bool {
    for (auto &kv : m_)
      if (kv.first.sum() < 0) return false;
    return true;
  }

  // first exponent where a and b differ (degree-lex), if any
  friend auto first_difference(const TermMap &a, const TermMap &b) -> std::optional<Exponent> {
    std::optional<Exponent> best;
    DegLex lt;
    auto consider = [&](const Exponent &q) {
      if (!best || lt(q, *best)) best = q;
    };
    for (auto &[q, c] : a.m_) {
      auto it = b.m_.find(q);
      if (it == b.m_.end()) {
        consider(q);
        break;
      }
      bool same = true;
      for (int k = 0; k < a.n_; ++k) same = same && c[k] == it->second[k];
      if (!same) {
        consider(q);
        break;
      }
    }
    for (auto &[q, c] : b.m_)
      if (!a.m_.count(q)) {
        consider(q);
        break;
      }
    return best;
  }

 private:
  const Field *f_ = Field::rationals();
  int n_ = 0;
  Map m_;
};

// Formal scalar series sum a_Q x^Q (Laurent exponents allowed).
class ScalarSeries {
 public:
  using Map = std::map<Exponent, Scalar, DegLex>;
  using const_iterator = Map::const_iterator;

  ScalarSeries() = default;
  ScalarSeries(const Field *f, int n) : f_(f), n_(n) {}

  auto field() const -> const Field * { return f_; }
  auto dim() const -> int { return n_; }
  auto begin() const -> const_iterator { return m_.begin(); }
  auto end() const -> const_iterator { return m_.end(); }
  auto size() const -> std::size_t { return m_.size(); }
  auto empty() const -> bool { return m_.empty(); }
  auto map() const -> const Map & { return m_; }
  auto get(const Exponent &q) const -> Scalar {
    auto it = m_.find(q);
    return it == m_.end() ? Scalar(f_) : it->second;
  }
  void add(const Exponent &q, const Scalar &s) {
    if (s.is_zero()) return;
    auto [it, fresh] = m_.try_emplace(q, s);
    if (fresh) return;
    it->second += s;
    if (it->second.is_zero()) m_.erase(it);
  }
  void erase(const Exponent &q) { m_.erase(q); }
  auto operator+=(const ScalarSeries &o) -> ScalarSeries & {
    for (auto &[q, c] : o) add(q, c);
    return *this;
  }
  auto operator-=(const ScalarSeries &o) -> ScalarSeries & {
    for (auto &[q, c] : o) add(q, -c);
    return *this;
  }
  auto scaled_by(const Scalar &s) const -> ScalarSeries {
    ScalarSeries r(f_, n_);
    if (s.is_zero()) return r;
    for (auto &[q, c] : m_) r.m_.emplace(q, c * s);
    return r;
  }
  friend auto operator==(const ScalarSeries &a, const ScalarSeries &b) -> bool {
    if (a.m_.size() != b.m_.size()) return false;
    for (auto i = a.m_.begin(), j = b.m_.begin(); i != a.m_.end(); ++i, ++j)
      if (i->first != j->first || i->second != j->second) return false;
    return true;
  }
  auto truncated(int max_order) const -> ScalarSeries {
    ScalarSeries r(f_, n_);
    for (auto &[q, c] : m_)
      if (q.order() <= max_order) r.m_.emplace(q, c);
    return r;
  }

 private:
  const Field *f_ = Field::rationals();
  int n_ = 0;
  Map m_;
};

// product truncated to order <= max_order (orders add for nonnegative sums)
inline auto multiply(const ScalarSeries &a, const ScalarSeries &b, int max_order) -> ScalarSeries {
  ScalarSeries r(a.field(), a.dim());
  for (auto &[p, x] : a) {
    for (auto &[q, y] : b) {
      Exponent s = p + q;
      if (s.order() > max_order) {
        if (p.sum() >= 0 && q.sum() >= 0) break;
        continue;
      }
      r.add(s, x * y);
    }
  }
  return r;
}

// s(x) * W(x) for a scalar series s and a vector field W
inline auto multiply(const ScalarSeries &s, const TermMap &w, int max_order) -> TermMap {
  TermMap r(w.field(), w.dim());
  for (auto &[p, a] : s) {
    for (auto &[q, c] : w) {
      Exponent e = p + q;
      if (e.order() > max_order) {
        if (p.sum() >= 0 && q.sum() >= 0) break;
        continue;
      }
      r.add_scaled(e, c, a);
    }
  }
  return r;
}

// ---------------------------------------------------------------- fields

namespace detail {

inline auto common_field(const std::vector<Scalar> &v, const Field *hint) -> const Field * {
  for (auto &s : v)
    if (s.field() != Field::rationals()) {
      if (hint && hint != Field::rationals() && hint != s.field()) throw FieldMismatch();
      return s.field();
    }
  return hint ? hint : Field::rationals();
}

inline void check_term(const Exponent &q, const Coeff &c, int n, int N) {
  if (q.dim() != n || static_cast<int>(c.size()) != n) throw DimensionMismatch();
  int neg = q.negative_index();
  if (neg == -2) throw InvalidInput("exponent " + q.str() + " is not in N");
  if (q.sum() < 0) throw InvalidInput("constant term at " + q.str() + " (vector field must vanish at 0)");
  if (q.sum() == 0) throw InvalidInput("order-0 term at " + q.str() + " (linear part must be diagonal)");
  if (q.order() > N) throw InvalidInput("term " + q.str() + " exceeds the truncation order");
  if (neg >= 0)
    for (int k = 0; k < n; ++k)
      if (k != neg && !c[k].is_zero())
        throw InvalidInput("term " + q.str() + " has a component that is not polynomial");
}

}  // namespace detail

// x' = lambda.x + sum over stored terms, all orders 1..N.
class BrunoField {
 public:
  BrunoField() = default;
  BrunoField(const Field *f, std::vector<Scalar> lambda, int N)
      : f_(detail::common_field(lambda, f)), lambda_(std::move(lambda)), terms_(f_, static_cast<int>(lambda_.size())), N_(N) {
    init_lambda();
  }
  BrunoField(const Field *f, std::vector<Scalar> lambda, TermMap terms, int N)
      : f_(detail::common_field(lambda, f)), lambda_(std::move(lambda)), terms_(std::move(terms)), N_(N) {
    init_lambda();
    if (terms_.dim() != dim() && !terms_.empty()) throw DimensionMismatch();
    if (terms_.dim() != dim()) terms_ = TermMap(f_, dim());
    for (auto &[q, c] : terms_) detail::check_term(q, c, dim(), N_);
  }

  auto dim() const -> int { return static_cast<int>(lambda_.size()); }
  auto field() const -> const Field * { return f_; }
  auto lambda() const -> const std::vector<Scalar> & { return lambda_; }
  auto trunc_order() const -> int { return N_; }
  auto terms() const -> const TermMap & { return terms_; }
  auto is_linear() const -> bool { return terms_.empty(); }

  // terms together with the linear part at 0
  auto with_linear() const -> TermMap {
    TermMap r = terms_;
    r.add(Exponent::zero(dim()), lambda_);
    return r;
  }

  friend auto operator==(const BrunoField &a, const BrunoField &b) -> bool {
    if (a.N_ != b.N_ || a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i)
      if (a.lambda_[i] != b.lambda_[i]) return false;
    return a.terms_ == b.terms_;
  }

 private:
  void init_lambda() {
    if (lambda_.empty() || static_cast<int>(lambda_.size()) > kMaxDim) throw InvalidInput("dimension must be in 1..8");
    if (N_ < 1) throw InvalidInput("truncation order must be >= 1");
    for (auto &l : lambda_) l = l.in(f_);
  }

  const Field *f_ = Field::rationals();
  std::vector<Scalar> lambda_;
  TermMap terms_;
  int N_ = 1;
};

// x = y + h(y), h of order >= 1
class PointTransform {
 public:
  PointTransform() = default;
  PointTransform(const Field *f, int n, int N) : h_(f, n), N_(N) {}
  PointTransform(TermMap h, int N) : h_(std::move(h)), N_(N) {
    for (auto &[q, c] : h_) detail::check_term(q, c, h_.dim(), N_);
  }
  static auto identity(const Field *f, int n, int N) -> PointTransform { return PointTransform(f, n, N); }

  auto dim() const -> int { return h_.dim(); }
  auto field() const -> const Field * { return h_.field(); }
  auto trunc_order() const -> int { return N_; }
  auto terms() const -> const TermMap & { return h_; }
  auto is_identity() const -> bool { return h_.empty(); }
  friend auto operator==(const PointTransform &a, const PointTransform &b) -> bool {
    return a.N_ == b.N_ && a.h_ == b.h_;
  }

 private:
  TermMap h_;
  int N_ = 1;
};

// ---------------------------------------------------------------- calculus

// [U,V] = DV.U - DU.V, termwise
//   [(x.t)x^mu, (x.p)x^nu] = (x.a)x^(mu+nu),  a = <nu,t> p - <mu,p> t
inline auto bracket(const TermMap &U, const TermMap &V, int N) -> TermMap {
  if (U.dim() != V.dim()) throw DimensionMismatch();
  const int n = U.dim();
  const Field *f = U.field() != Field::rationals() ? U.field() : V.field();
  TermMap r(f, n);
  const bool sorted_sums = U.all_sums_nonnegative() && V.all_sums_nonnegative();
  Coeff a(n, Scalar(f));
  for (auto &[mu, th] : U) {
    for (auto &[nu, ph] : V) {
      Exponent s = mu + nu;
      if (s.order() > N) {
        if (sorted_sums) break;
        continue;
      }
      Scalar x = pairing(nu, th), y = pairing(mu, ph);
      if (x.is_zero() && y.is_zero()) continue;
      for (int k = 0; k < n; ++k) a[k] = x * ph[k] - y * th[k];
      r.add(s, a);
    }
  }
  return r;
}

inline auto bracket(const BrunoField &U, const BrunoField &V) -> TermMap {
  if (U.dim() != V.dim()) throw DimensionMismatch();
  return bracket(U.with_linear(), V.with_linear(), std::min(U.trunc_order(), V.trunc_order()));
}

// Delta_U V = sum <Q, V_P> (x.U_Q) x^(P+Q)
inline auto delta_apply(const TermMap &U, const TermMap &V, int N) -> TermMap {
  if (U.dim() != V.dim()) throw DimensionMismatch();
  const Field *f = U.field() != Field::rationals() ? U.field() : V.field();
  TermMap r(f, U.dim());
  const bool sorted_sums = U.all_sums_nonnegative() && V.all_sums_nonnegative();
  for (auto &[q, uq] : U) {
    for (auto &[p, vp] : V) {
      Exponent s = p + q;
      if (s.order() > N) {
        if (sorted_sums) break;
        continue;
      }
      Scalar w = pairing(q, vp);
      if (!w.is_zero()) r.add_scaled(s, uq, w);
    }
  }
  return r;
}

inline auto project(const TermMap &R, int k) -> TermMap {
  TermMap r(R.field(), R.dim());
  for (auto &[q, c] : R)
    if (q.order() <= k) r.set(q, c);
  return r;
}

// terms with lo <= order <= hi
inline auto order_slice(const TermMap &R, int lo, int hi) -> TermMap {
  TermMap r(R.field(), R.dim());
  for (auto &[q, c] : R)
    if (q.order() >= lo && q.order() <= hi) r.set(q, c);
  return r;
}

inline auto project(const BrunoField &F, int k) -> BrunoField {
  return BrunoField(F.field(), F.lambda(), project(F.terms(), k), F.trunc_order());
}

inline auto eigencomponent(const TermMap &R, const std::vector<Scalar> &mu, const Scalar &delta) -> TermMap {
  TermMap r(R.field(), R.dim());
  for (auto &[q, c] : R)
    if (weight(q, mu) == delta) r.set(q, c);
  return r;
}

// split by weight <Q, mu>
inline auto eigen_split(const TermMap &R, const std::vector<Scalar> &mu) -> std::map<Scalar, TermMap, ScalarReprLess> {
  std::map<Scalar, TermMap, ScalarReprLess> out;
  for (auto &[q, c] : R) {
    Scalar w = weight(q, mu);
    auto it = out.find(w);
    if (it == out.end()) it = out.emplace(w, TermMap(R.field(), R.dim())).first;
    it->second.set(q, c);
  }
  return out;
}

struct MonomialEntry {
  Scalar c;
  std::vector<int> m;  // exponent of x, all >= 0
  int k;               // coordinate, 0-based
};

// sum c x^m e_k, converted with Q = m - e_k
inline auto from_monomials(const Field *f, int n, int N, const std::vector<Scalar> &lambda,
                           const std::vector<MonomialEntry> &entries) -> BrunoField {
  if (static_cast<int>(lambda.size()) != n) throw DimensionMismatch();
  const Field *K = detail::common_field(lambda, f);
  TermMap t(K, n);
  for (auto &e : entries) {
    if (static_cast<int>(e.m.size()) != n || e.k < 0 || e.k >= n) throw DimensionMismatch();
    int deg = 0;
    for (int v : e.m) {
      if (v < 0) throw InvalidInput("monomial exponents must be nonnegative");
      deg += v;
    }
    if (deg == 0) throw InvalidInput("constant term in coordinate " + std::to_string(e.k + 1));
    if (deg == 1) {
      if (e.m[e.k] == 1) throw InvalidInput("diagonal linear terms come from lambda only");
      throw InvalidInput("off-diagonal linear term in coordinate " + std::to_string(e.k + 1));
    }
    Exponent q(e.m);
    q.set(e.k, q[e.k] - 1);
    if (q.order() > N) continue;
    t.add_component(q, e.k, e.c.in(K));
  }
  return BrunoField(K, lambda, std::move(t), N);
}

}  // namespace nfkit
