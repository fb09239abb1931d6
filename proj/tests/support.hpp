#pragma once
// Shared instance generators and naive oracles for the test suites.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nfkit/brunovf.hpp"
#include "nfkit/commuting.hpp"
#include "nfkit/integrability.hpp"
#include "nfkit/substitute.hpp"

namespace support {

using namespace nfkit;

inline auto sqrt2_field() -> const Field * { return Field::number_field({-2, 0, 1}, {1.41, 0}, 1); }
inline auto zeta3_field() -> const Field * { return Field::number_field({1, 1, 1}, {-0.5, 0.866}, 2); }
inline auto zeta6_field() -> const Field * { return Field::number_field({1, -1, 1}, {0.5, 0.866}, 5); }
inline auto zeta4_field() -> const Field * { return Field::gaussian(); }
inline auto zeta5_field() -> const Field * {
  return Field::number_field({1, 1, 1, 1, 1}, {0.309, 0.951}, 4);
}

struct LambdaCase {
  std::string name;
  const Field *field;
  std::vector<Scalar> lambda;
};

inline auto gen(const Field *f) -> Scalar { return Scalar::generator(f); }

inline auto standard_lambdas() -> std::vector<LambdaCase> {
  const Field *Q = Field::rationals();
  const Field *z3 = zeta3_field();
  Scalar i = Scalar::imag_unit(), z = gen(z3);
  return {
      {"(1,2)", Q, {Scalar(1), Scalar(2)}},
      {"(1,3)", Q, {Scalar(1), Scalar(3)}},
      {"(1,-1)", Q, {Scalar(1), Scalar(-1)}},
      {"(i,-i)", Field::gaussian(), {i, -i}},
      {"(1,z,z^2)", z3, {Scalar(z3, Rational(1)), z, z * z}},
  };
}

// powers of a primitive root of unity: (1, z, ..., z^(n-1))
inline auto cyclotomic_lambda(int n) -> LambdaCase {
  const Field *f = n == 3 ? zeta3_field() : n == 4 ? zeta4_field() : n == 5 ? zeta5_field() : zeta6_field();
  Scalar z = gen(f);
  std::vector<Scalar> l;
  for (int k = 0; k < n; ++k) l.push_back(z.pow(k));
  return {"cyclotomic" + std::to_string(n), f, l};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  auto uniform(int lo, int hi) -> int { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  auto coin(double p = 0.5) -> bool { return std::bernoulli_distribution(p)(g_); }
  auto engine() -> std::mt19937_64 & { return g_; }

  auto small_rational(int mag = 3) -> Rational {
    Rational q(uniform(-mag, mag), uniform(1, 3));
    q.canonicalize();
    return q;
  }
  auto nonzero_rational(int mag = 3) -> Rational {
    for (;;) {
      Rational q = small_rational(mag);
      if (sgn(q) != 0) return q;
    }
  }
  // small coefficients over the field; the non-rational parts are sparse
  auto scalar(const Field *f, int mag = 3) -> Scalar {
    std::vector<Rational> c;
    for (int j = 0; j < f->degree(); ++j) c.push_back(j == 0 || coin(0.5) ? small_rational(mag) : Rational(0));
    return Scalar(f, c);
  }
  auto nonzero_scalar(const Field *f, int mag = 3) -> Scalar {
    for (;;) {
      Scalar s = scalar(f, mag);
      if (!s.is_zero()) return s;
    }
  }

 private:
  std::mt19937_64 g_;
};

// `count` random terms with orders in [lo, hi]
inline auto random_terms(Rng &rng, const Field *f, int n, int lo, int hi, int count, int mag = 3) -> TermMap {
  TermMap t(f, n);
  auto pool = enumerate_N(n, std::max(lo, 1), hi);
  if (pool.empty()) return t;
  for (int it = 0; it < count; ++it) {
    const Exponent &q = pool[rng.uniform(0, static_cast<int>(pool.size()) - 1)];
    int neg = q.negative_index();
    Coeff c = zero_coeff(f, n);
    if (neg >= 0) {
      c[neg] = rng.nonzero_scalar(f, mag);
    } else {
      for (int k = 0; k < n; ++k)
        if (rng.coin(0.6)) c[k] = rng.scalar(f, mag);
    }
    t.add(q, c);
  }
  return t;
}

inline auto random_field(Rng &rng, const LambdaCase &lc, int N, int count, int mag = 3) -> BrunoField {
  int n = static_cast<int>(lc.lambda.size());
  return BrunoField(lc.field, lc.lambda, random_terms(rng, lc.field, n, 1, N, count, mag), N);
}

inline auto random_transform(Rng &rng, const Field *f, int n, int N, int count, int lo = 1) -> PointTransform {
  return PointTransform(random_terms(rng, f, n, lo, N, count), N);
}

// only terms with <Q,lambda> = 0
inline auto resonant_only(const TermMap &t, const std::vector<Scalar> &lambda) -> TermMap {
  TermMap r(t.field(), t.dim());
  for (auto &[q, c] : t)
    if (weight(q, lambda).is_zero()) r.set(q, c);
  return r;
}

// ---------------------------------------------------------------- AS instances

struct ASCase {
  std::string name;
  const Field *field;
  std::vector<Scalar> lambda;
  Decomposition D;
};

inline auto as_cases() -> std::vector<ASCase> {
  const Field *Q = Field::rationals(), *G = Field::gaussian(), *z3 = zeta3_field();
  Scalar i = Scalar::imag_unit(), z = gen(z3), one3(z3, Rational(1));
  std::vector<Scalar> cyc{one3, z, z * z};
  return {
      {"(1,-1) r=1", Q, {Scalar(1), Scalar(-1)}, single_decomposition({Scalar(1), Scalar(-1)})},
      {"(i,-i) r=1", G, {i, -i}, single_decomposition({i, -i})},
      {"(1,-1,i,-i) two lines", G, {Scalar(G, Rational(1)), Scalar(G, Rational(-1)), i, -i},
       {{{Scalar(1), Scalar(-1), Scalar(0), Scalar(0)}, {Scalar(0), Scalar(0), i, -i}}, {Scalar(1), Scalar(1)}}},
      {"(1,z,z^2) A2", z3, cyc, a2_decomposition(cyc)},
  };
}

// resonant terms with nonnegative P and G_P = sum_j beta_j lambda^(j); coefficients p/den
inline auto as_terms(Rng &rng, const ASCase &c, int lo, int hi, int count, int den = 3) -> TermMap {
  const int n = static_cast<int>(c.lambda.size());
  TermMap t(c.field, n);
  std::vector<Exponent> pool;
  for (auto &q : enumerate_N(n, std::max(lo, 1), hi))
    if (q.nonnegative() && weight(q, c.lambda).is_zero()) pool.push_back(q);
  if (pool.empty()) return t;
  for (int it = 0; it < count; ++it) {
    const Exponent &q = pool[rng.uniform(0, static_cast<int>(pool.size()) - 1)];
    Coeff v = zero_coeff(c.field, n);
    for (int j = 0; j < c.D.size(); ++j) {
      Rational b(rng.uniform(-2, 2), den);
      b.canonicalize();
      for (int k = 0; k < n; ++k) v[k] += c.D.parts[j][k] * Scalar(b);
    }
    t.add(q, v);
  }
  return t;
}

// ---------------------------------------------------------------- dense oracle
// Plain polynomial vectors keyed by std::vector<int>; no code shared with the
// library's term maps beyond the conversion of each input term.

namespace dense {

using Mono = std::vector<int>;
using DPoly = std::map<Mono, Scalar>;
using DVec = std::vector<DPoly>;

inline void add(DPoly &p, const Mono &m, const Scalar &c) {
  if (c.is_zero()) return;
  auto it = p.find(m);
  if (it == p.end()) {
    p.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

inline auto from_terms(const TermMap &t) -> DVec {
  int n = t.dim();
  DVec v(n);
  for (auto &[q, c] : t)
    for (int k = 0; k < n; ++k) {
      if (c[k].is_zero()) continue;
      Mono m = q.to_vector();
      m[k] += 1;
      for (int x : m)
        if (x < 0) throw std::logic_error("negative power in dense oracle");
      add(v[k], m, c[k]);
    }
  return v;
}

inline auto deriv(const DPoly &p, int j) -> DPoly {
  DPoly r;
  for (auto &[m, c] : p) {
    if (m[j] == 0) continue;
    Mono e = m;
    e[j] -= 1;
    add(r, e, c * static_cast<long>(m[j]));
  }
  return r;
}

inline auto mul(const DPoly &a, const DPoly &b) -> DPoly {
  DPoly r;
  for (auto &[ma, ca] : a)
    for (auto &[mb, cb] : b) {
      Mono m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      add(r, m, ca * cb);
    }
  return r;
}

inline auto deg(const Mono &m) -> int {
  int s = 0;
  for (int x : m) s += x;
  return s;
}

// DV.U - DU.V, truncated to degree maxdeg
inline auto jacobian_bracket(const DVec &U, const DVec &V, int maxdeg) -> DVec {
  int n = static_cast<int>(U.size());
  DVec r(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      for (auto &[m, c] : mul(deriv(V[k], j), U[j]))
        if (deg(m) <= maxdeg) add(r[k], m, c);
      for (auto &[m, c] : mul(deriv(U[k], j), V[j]))
        if (deg(m) <= maxdeg) add(r[k], m, -c);
    }
  return r;
}

inline auto equal(const DVec &a, const DVec &b) -> bool {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) return false;
    for (auto &[m, c] : a[k]) {
      auto it = b[k].find(m);
      if (it == b[k].end() || it->second != c) return false;
    }
  }
  return true;
}

}  // namespace dense

// ---------------------------------------------------------------- commuting families
// Joint normal forms G^(k) = A^(k) + sum_j sum_i a_ijk phi^j (x.lambda^(i)), phi = x^P with P
// jointly resonant; these commute because every x.lambda^(i) kills phi. Conjugating all
// members by one transform keeps the brackets zero.

struct FamilyCase {
  std::string name;
  const Field *field;
  std::vector<std::vector<Scalar>> L;
  Exponent P;
};

inline auto family_cases() -> std::vector<FamilyCase> {
  const Field *Q = Field::rationals(), *G = Field::gaussian();
  Scalar i = Scalar::imag_unit();
  return {
      {"(1,-1,0),(0,1,-1)", Q, {{Scalar(1), Scalar(-1), Scalar(0)}, {Scalar(0), Scalar(1), Scalar(-1)}}, Exponent({1, 1, 1})},
      {"(i,-i,0),(0,1,-1)", G, {{i, -i, Scalar(G, Rational(0))}, {Scalar(G, Rational(0)), Scalar(G, Rational(1)), Scalar(G, Rational(-1))}},
       Exponent({1, 1, 1})},
  };
}

// `linear` lists members kept linear
inline auto joint_normal_family(Rng &rng, const FamilyCase &c, int N, std::vector<bool> linear = {}) -> std::vector<BrunoField> {
  const int n = c.P.dim(), s = static_cast<int>(c.L.size());
  linear.resize(s, false);
  std::vector<BrunoField> out;
  for (int k = 0; k < s; ++k) {
    TermMap t(c.field, n);
    if (!linear[k])
      for (Exponent q = c.P; q.order() <= N; q = q + c.P) {
        for (int i = 0; i < s; ++i) {
          if (rng.coin(0.4)) continue;
          Scalar a(rng.small_rational(2));
          Coeff v;
          for (auto &x : c.L[i]) v.push_back(x * a);
          t.add(q, v);
        }
      }
    out.emplace_back(c.field, c.L[k], t, N);
  }
  return out;
}

inline auto conjugate_all(const std::vector<BrunoField> &G, const PointTransform &H) -> std::vector<BrunoField> {
  std::vector<BrunoField> out;
  for (auto &g : G) out.push_back(substitute(g, H));
  return out;
}

inline auto random_family(Rng &rng, const FamilyCase &c, int N, int count, int lo = 1) -> CommutingFamily {
  auto G = joint_normal_family(rng, c, N);
  return CommutingFamily(conjugate_all(G, random_transform(rng, c.field, c.P.dim(), N, count, lo)));
}

// ---------------------------------------------------------------- cyclotomic normal forms

// resonant terms for lambda = (1, z, ..., z^(n-1)); with `in_V` every coefficient sums to zero
inline auto cyclotomic_normal_form(Rng &rng, int n, int N, int count, bool in_V) -> BrunoField {
  auto lc = cyclotomic_lambda(n);
  std::vector<Exponent> pool;
  for (auto &q : enumerate_N(n, 1, N))
    if (weight(q, lc.lambda).is_zero() && (!in_V || q.nonnegative())) pool.push_back(q);
  TermMap t(lc.field, n);
  for (int it = 0; it < count && !pool.empty(); ++it) {
    const Exponent &q = pool[rng.uniform(0, static_cast<int>(pool.size()) - 1)];
    Coeff c = zero_coeff(lc.field, n);
    int neg = q.negative_index();
    if (neg >= 0) {
      c[neg] = rng.nonzero_scalar(lc.field, 2);
    } else {
      Scalar s(lc.field);
      for (int k = 0; k < n; ++k) {
        c[k] = rng.scalar(lc.field, 2);
        s += c[k];
      }
      if (in_V) c[n - 1] -= s;
    }
    t.add(q, c);
  }
  return BrunoField(lc.field, lc.lambda, t, N);
}

// ---------------------------------------------------------------- omega by brute force

namespace naive {

// brute force: every integer vector with entries in [-1, 2^k], filtered by hand
struct NaiveOmega {
  double value;
  std::vector<int> argmin;
};

inline auto naive_omega(const std::vector<Scalar> &lambda, int k) -> NaiveOmega {
  const int n = static_cast<int>(lambda.size());
  std::vector<std::complex<long double>> l;
  for (auto &s : lambda) {
    auto b = embed(s, 120);
    l.emplace_back(b.re.mid().get_d(), b.im.mid().get_d());
  }
  const int top = (1 << k) - 1;
  NaiveOmega best{HUGE_VAL, {}};
  std::vector<int> q(n, -1);
  auto before = [&](const std::vector<int> &p, const std::vector<int> &r) {
    int sp = 0, sr = 0;
    for (int x : p) sp += x;
    for (int x : r) sr += x;
    if (std::abs(sp) != std::abs(sr)) return std::abs(sp) < std::abs(sr);
    for (int i = 0; i < n; ++i)
      if (p[i] != r[i]) return p[i] < r[i];
    return false;
  };
  for (;;) {
    int negs = 0, s = 0;
    for (int x : q) {
      negs += x < 0;
      s += x;
    }
    if (negs <= 1 && std::abs(s) <= top) {
      std::complex<long double> w = 0;
      bool exact_zero = true;
      Scalar ws = lambda[0] * 0L;
      for (int i = 0; i < n; ++i) {
        w += static_cast<long double>(q[i]) * l[i];
        ws += lambda[i] * static_cast<long>(q[i]);
      }
      exact_zero = ws.is_zero();
      if (!exact_zero) {
        double m = static_cast<double>(std::abs(w));
        if (m < best.value - 1e-12 || (std::abs(m - best.value) <= 1e-12 && before(q, best.argmin)))
          best = {std::min(m, best.value), q};
      }
    }
    int i = 0;
    while (i < n && q[i] == top + 1) q[i++] = -1;
    if (i == n) break;
    ++q[i];
  }
  return best;
}

}  // namespace naive

}  // namespace support
