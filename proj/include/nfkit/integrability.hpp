#pragma once
// First integrals of normal forms: Laurent monomial integrals, general Lie
// derivatives, and the complete-integrability report.

#include <optional>
#include <string>
#include <vector>

#include "nfkit/conditions.hpp"

namespace nfkit {

namespace detail {

inline void require_normal(const BrunoField &G, int N) {
  for (auto &[q, c] : G.terms()) {
    if (q.order() > N) break;
    if (!weight(q, G.lambda()).is_zero()) throw InvalidInput("field is not in normal form: nonresonant term at " + q.str());
  }
}

}  // namespace detail

// L_G(x^Q) = x^Q * sum_P <Q, G_P> x^P; returns the factor, P = 0 included
inline auto lie_derivative_monomial(const BrunoField &G, const std::vector<int> &Q, int N) -> ScalarSeries {
  if (static_cast<int>(Q.size()) != G.dim()) throw DimensionMismatch();
  N = std::min(N, G.trunc_order());
  detail::require_normal(G, N);
  ScalarSeries out(G.field(), G.dim());
  auto pair = [&](const Coeff &c) {
    Scalar s(G.field());
    for (int i = 0; i < G.dim(); ++i)
      if (Q[i] != 0) s += c[i] * static_cast<long>(Q[i]);
    return s;
  };
  out.add(Exponent::zero(G.dim()), pair(G.lambda()));
  for (auto &[p, c] : G.terms()) {
    if (p.order() > N) break;
    out.add(p, pair(c));
  }
  return out;
}

struct FirstIntegralCheck {
  bool holds = true;
  std::optional<Exponent> witness;  // first P with <Q, G_P> != 0
};

// x^Q an integral of G up to order N; Q may have negative entries
inline auto is_first_integral(const BrunoField &G, const std::vector<int> &Q, int N) -> FirstIntegralCheck {
  FirstIntegralCheck out;
  auto s = lie_derivative_monomial(G, Q, N);
  if (!s.empty()) {
    out.holds = false;
    out.witness = s.begin()->first;
  }
  return out;
}

// L_F psi, terms of degree <= N; psi has nonnegative exponents
inline auto lie_derivative(const BrunoField &F, const ScalarSeries &psi, int N) -> ScalarSeries {
  if (psi.dim() != F.dim()) throw DimensionMismatch();
  const int n = F.dim();
  const Field *f = F.field() != Field::rationals() ? F.field() : psi.field();
  TermMap all = F.with_linear();
  ScalarSeries out(f, n);
  for (auto &[M, a] : psi) {
    if (!M.nonnegative()) throw InvalidInput("psi must be a polynomial (nonnegative exponents)");
    for (auto &[q, c] : all) {
      Exponent s = M + q;
      if (s.sum() > N) continue;
      Scalar w = pairing(M, c);
      if (w.is_zero()) continue;
      if (!s.nonnegative()) throw Error("lie_derivative: negative power at " + s.str());
      out.add(s, a * w);
    }
  }
  return out;
}

inline auto series_integral_check(const BrunoField &F, const ScalarSeries &psi, int N) -> bool {
  return lie_derivative(F, psi, N).empty();
}

// ---------------------------------------------------------------- report

struct IntegralReport {
  int n = 0, N = 0;
  LatticeBasis lattice;
  int d = 0;
  std::vector<FirstIntegralCheck> basis;  // per lattice basis vector
  bool all_basis_integrals = true;
  // nonzero resonant Q in N of the lowest order that has any
  std::vector<Exponent> small_monomials;
  std::vector<FirstIntegralCheck> small_checks;

  bool simplified_A_case = false;
  std::optional<Exponent> simplified_A_witness;  // G_P outside K lambda
  bool A2_case = false;
  std::optional<Exponent> A2_witness;
  bool cyclotomic_AS_case = false;
  bool cyclotomic_AS = false;          // span part of AS for the cyclic eigenvectors
  bool psi_integral = false;           // x_1 ... x_n
  bool cyclotomic_equivalence = false;  // the two agree
  std::vector<std::string> claims;
};

namespace detail {

// lambda = c (1, z, ..., z^(n-1)) with z a primitive n-th root of unity
inline auto cyclotomic_ratio(const std::vector<Scalar> &lambda) -> std::optional<Scalar> {
  const int n = static_cast<int>(lambda.size());
  if (n < 3 || lambda[0].is_zero()) return std::nullopt;
  Scalar c = lambda[0], z = lambda[1] * c.inv(), p = z;
  for (int j = 1; j < n; ++j) {
    if (lambda[j] != c * z.pow(j)) return std::nullopt;
  }
  for (int k = 1; k < n; ++k, p = p * z)
    if (p == Scalar(z.field(), Rational(1))) return std::nullopt;
  if (p != Scalar(z.field(), Rational(1))) return std::nullopt;
  return z;
}

}  // namespace detail

// parts (1, z^r, z^2r, ...), r = 1..n-1, gamma = (c, 0, ..., 0)
inline auto cyclotomic_decomposition(const std::vector<Scalar> &lambda) -> Decomposition {
  auto z = detail::cyclotomic_ratio(lambda);
  if (!z) throw InvalidInput("lambda is not a multiple of (1, z, ..., z^(n-1)) for a primitive root z");
  const int n = static_cast<int>(lambda.size());
  Decomposition D;
  for (int r = 1; r < n; ++r) {
    std::vector<Scalar> p;
    for (int j = 0; j < n; ++j) p.push_back(z->pow(j * r));
    D.parts.push_back(p);
    D.gamma.push_back(r == 1 ? lambda[0] : Scalar(0));
  }
  return D;
}

inline auto integrability_report(const BrunoField &G, int N) -> IntegralReport {
  N = std::min(N, G.trunc_order());
  detail::require_normal(G, N);
  const auto &lambda = G.lambda();
  const int n = G.dim();
  IntegralReport rep;
  rep.n = n;
  rep.N = N;
  rep.lattice = lattice(lambda);
  rep.d = rep.lattice.rank;
  for (auto &b : rep.lattice.basis) {
    rep.basis.push_back(is_first_integral(G, b, N));
    rep.all_basis_integrals = rep.all_basis_integrals && rep.basis.back().holds;
  }
  if (rep.d > 0)
    for (int B = 1; B <= 2 * n && rep.small_monomials.empty(); ++B)
      for (auto &q : enumerate_N(n, B, B))
        if (weight(q, lambda).is_zero()) {
          rep.small_monomials.push_back(q);
          rep.small_checks.push_back(is_first_integral(G, q.to_vector(), N));
        }
  TermMap T = project(G.terms(), N);
  std::string upto = " (verified to order " + std::to_string(N) + ")";

  if (rep.d == n - 1 && rep.all_basis_integrals) {
    rep.simplified_A_case = true;
    auto as = check_AS(T, lambda, single_decomposition(lambda));
    if (!as.span_holds) rep.simplified_A_witness = as.offending;
    rep.claims.push_back(as.span_holds ? "n-1 Laurent monomial integrals: every G_P lies in K lambda, Simplified Condition A"
                                             " holds and a convergent normalizing transformation exists" + upto
                                       : "n-1 Laurent monomial integrals but G_P outside K lambda at " + as.offending->str());
  }
  if (rep.d == n - 2 && rep.all_basis_integrals && G.field()->has_conjugation()) {
    auto D = a2_decomposition(lambda);
    if (rank(D.parts) == 2) {
      rep.A2_case = true;
      auto as = check_AS(T, lambda, D);
      if (!as.span_holds) rep.A2_witness = as.offending;
      rep.claims.push_back(as.span_holds ? "n-2 Laurent monomial integrals with lambda, conj(lambda) independent: Condition A2"
                                               " holds and a convergent normalizing transformation exists" + upto
                                         : "n-2 Laurent monomial integrals but Condition A2 fails at " + as.offending->str());
    }
  }
  if (detail::cyclotomic_ratio(lambda)) {
    rep.cyclotomic_AS_case = true;
    auto as = check_AS(T, lambda, cyclotomic_decomposition(lambda));
    rep.cyclotomic_AS = as.span_holds;
    rep.psi_integral = is_first_integral(G, std::vector<int>(n, 1), N).holds;
    rep.cyclotomic_equivalence = rep.cyclotomic_AS == rep.psi_integral;
    rep.claims.push_back(std::string("cyclic eigenvector span ") + (rep.cyclotomic_AS ? "holds" : "fails") +
                         ", x_1...x_n is " + (rep.psi_integral ? "" : "not ") + "an integral" + upto);
  }
  if (rep.d == 0) rep.claims.push_back("no resonances: the linear part has no Laurent monomial integral");
  return rep;
}

}  // namespace nfkit
