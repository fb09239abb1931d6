#pragma once
// Change of variables x = y + h(y): D H . F~ = F o H, computed on ordinary
// polynomial components. Bruno order N corresponds to polynomial degree N+1.

#include <optional>
#include <unordered_map>
#include <vector>

#include "nfkit/brunovf.hpp"

namespace nfkit {

using Poly = ScalarSeries;       // nonnegative exponents only
using PolyVec = std::vector<Poly>;

namespace detail {

inline auto degree(const Exponent &m) -> int { return m.sum(); }

// component k of sum (x.F_Q)x^Q is sum F_{Q,k} x^(Q+e_k)
inline auto to_polys(const TermMap &T, int n, const Field *f) -> PolyVec {
  PolyVec out(n, Poly(f, n));
  for (auto &[q, c] : T)
    for (int k = 0; k < n; ++k)
      if (!c[k].is_zero()) out[k].add(q + Exponent::unit(n, k), c[k]);
  return out;
}

inline auto from_polys(const PolyVec &P, int n, const Field *f, int max_order) -> TermMap {
  TermMap t(f, n);
  for (int k = 0; k < n; ++k)
    for (auto &[m, c] : P[k]) {
      Exponent q = m - Exponent::unit(n, k);
      if (q.order() <= max_order) t.add_component(q, k, c);
    }
  return t;
}

inline auto truncated(const Poly &p, int D) -> Poly { return p.truncated(D); }

// x^m evaluated at x = X(y), cached
class PowerCache {
 public:
  PowerCache(const PolyVec &X, int D, const Field *f) : X_(X), D_(D), f_(f) {}

  auto get(const Exponent &m) -> const Poly & {
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    const int n = m.dim();
    Poly val(f_, n);
    if (m.is_zero()) {
      val.add(m, Scalar(f_, Rational(1)));
    } else {
      int j = 0;
      while (m[j] == 0) ++j;
      Exponent rest = m - Exponent::unit(n, j);
      const Poly &lower = get(rest);  // node-based map, references stay valid
      val = multiply(lower, X_[j], D_);
    }
    return cache_.emplace(m, std::move(val)).first->second;
  }

 private:
  const PolyVec &X_;
  int D_;
  const Field *f_;
  std::unordered_map<Exponent, Poly, ExponentHash> cache_;
};

// P o X truncated to degree D (P_k polynomials in x, X_j polynomials in y)
inline auto compose(const PolyVec &P, const PolyVec &X, int D, const Field *f) -> PolyVec {
  const int n = static_cast<int>(X.size());
  PowerCache pc(X, D, f);
  PolyVec out(P.size(), Poly(f, n));
  for (std::size_t k = 0; k < P.size(); ++k)
    for (auto &[m, c] : P[k]) {
      if (degree(m) > D) break;
      const Poly &pw = pc.get(m);
      for (auto &[e, v] : pw) out[k].add(e, v * c);
    }
  return out;
}

inline auto derivative(const Poly &p, int j) -> Poly {
  Poly r(p.field(), p.dim());
  for (auto &[m, c] : p) {
    if (m[j] == 0) continue;
    Exponent e = m;
    e.set(j, m[j] - 1);
    r.add(e, c * static_cast<long>(m[j]));
  }
  return r;
}

// J[i][j] = d h_i / d y_j
inline auto jacobian(const PolyVec &h) -> std::vector<PolyVec> {
  const int n = static_cast<int>(h.size());
  std::vector<PolyVec> J(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J[i].push_back(derivative(h[i], j));
  return J;
}

// J . v truncated to degree D
inline auto apply(const std::vector<PolyVec> &J, const PolyVec &v, int D) -> PolyVec {
  const int n = static_cast<int>(v.size());
  PolyVec out(n, Poly(v[0].field(), v[0].dim()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (J[i][j].empty() || v[j].empty()) continue;
      out[i] += multiply(J[i][j], v[j], D);
    }
  return out;
}

// Solve (I + Dh) u = R up to degree D; Dh raises degrees, so go degree by degree.
inline auto solve_unipotent(const std::vector<PolyVec> &Dh, const PolyVec &R, int D) -> PolyVec {
  const int n = static_cast<int>(R.size());
  const Field *f = R[0].field();
  const int dim = R[0].dim();
  PolyVec u(n, Poly(f, dim)), corr(n, Poly(f, dim));
  for (int d = 0; d <= D; ++d) {
    PolyVec layer(n, Poly(f, dim));
    bool any = false;
    for (int i = 0; i < n; ++i) {
      for (auto &[m, c] : R[i])
        if (degree(m) == d) layer[i].add(m, c);
      for (auto &[m, c] : corr[i])
        if (degree(m) == d) layer[i].add(m, -c);
      any = any || !layer[i].empty();
    }
    if (!any) continue;
    for (int i = 0; i < n; ++i) u[i] += layer[i];
    PolyVec push = apply(Dh, layer, D);
    for (int i = 0; i < n; ++i) corr[i] += push[i];
  }
  return u;
}

inline auto identity_plus(const TermMap &h, int n, const Field *f) -> PolyVec {
  PolyVec X = to_polys(h, n, f);
  for (int k = 0; k < n; ++k) X[k].add(Exponent::unit(n, k), Scalar(f, Rational(1)));
  return X;
}

inline void check_compatible(const BrunoField &F, const PointTransform &H) {
  if (F.dim() != H.dim()) throw DimensionMismatch();
  if (F.trunc_order() != H.trunc_order()) throw InvalidInput("truncation orders differ");
  if (!H.terms().empty() && H.field() != F.field() && H.field() != Field::rationals() &&
      F.field() != Field::rationals())
    throw FieldMismatch();
}

}  // namespace detail

// F~ with D H . F~ = F o H modulo order > N
inline auto substitute(const BrunoField &F, const PointTransform &H) -> BrunoField {
  detail::check_compatible(F, H);
  if (H.is_identity()) return F;
  const int n = F.dim(), N = F.trunc_order(), D = N + 1;
  const Field *f = F.field();
  PolyVec X = detail::identity_plus(H.terms(), n, f);
  PolyVec P = detail::to_polys(F.with_linear(), n, f);
  PolyVec R = detail::compose(P, X, D, f);
  auto Dh = detail::jacobian(detail::to_polys(H.terms(), n, f));
  PolyVec u = detail::solve_unipotent(Dh, R, D);
  TermMap all = detail::from_polys(u, n, f, N);
  Coeff lin = all.get(Exponent::zero(n));
  for (int k = 0; k < n; ++k)
    if (lin[k] != F.lambda()[k]) throw Error("substitution changed the linear part");
  all.erase(Exponent::zero(n));
  return BrunoField(f, F.lambda(), std::move(all), N);
}

// H1 o H2: substitute(substitute(F,H1),H2) == substitute(F, compose_transforms(H1,H2))
inline auto compose_transforms(const PointTransform &H1, const PointTransform &H2) -> PointTransform {
  if (H1.dim() != H2.dim()) throw DimensionMismatch();
  if (H1.trunc_order() != H2.trunc_order()) throw InvalidInput("truncation orders differ");
  const int N = H1.trunc_order();
  if (H2.is_identity()) return H1;
  if (H1.is_identity()) return H2;
  const int n = H1.dim(), D = N + 1;
  const Field *f = H1.field() != Field::rationals() ? H1.field() : H2.field();
  PolyVec X2 = detail::identity_plus(H2.terms(), n, f);
  PolyVec h1 = detail::to_polys(H1.terms(), n, f);
  PolyVec r = detail::compose(h1, X2, D, f);
  TermMap t = detail::from_polys(r, n, f, N);
  t += H2.terms();
  return PointTransform(std::move(t), N);
}

struct ConjugationCheck {
  bool pass = true;
  std::optional<Exponent> witness;
  Coeff lhs, rhs;  // D H . G and F o H at the witness
};

// D H(y) G(y) == F(H(y)) up to order N, exact
inline auto verify_conjugation(const BrunoField &F, const PointTransform &H, const BrunoField &G, int N)
    -> ConjugationCheck {
  if (F.dim() != G.dim() || F.dim() != H.dim()) throw DimensionMismatch();
  const int n = F.dim(), D = N + 1;
  const Field *f = F.field();
  PolyVec X = detail::identity_plus(H.terms(), n, f);
  PolyVec rhs = detail::compose(detail::to_polys(F.with_linear(), n, f), X, D, f);
  PolyVec g = detail::to_polys(G.with_linear(), n, f);
  PolyVec lhs = g;
  if (!H.is_identity()) {
    PolyVec add = detail::apply(detail::jacobian(detail::to_polys(H.terms(), n, f)), g, D);
    for (int k = 0; k < n; ++k) lhs[k] += add[k];
  }
  TermMap L = detail::from_polys(lhs, n, f, N), Rm = detail::from_polys(rhs, n, f, N);
  ConjugationCheck out;
  if (auto q = first_difference(L, Rm)) {
    out.pass = false;
    out.witness = q;
    out.lhs = L.get(*q);
    out.rhs = Rm.get(*q);
  }
  return out;
}

}  // namespace nfkit
