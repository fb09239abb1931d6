#pragma once
// Convergence conditions: additive decompositions, isoresonance, diophantine
// hull, Condition AS / A2, Delta nilpotency, closed-form homological solution,
// majorant norms and the block step estimate.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfkit/normalize.hpp"
#include "nfkit/resonance.hpp"

namespace nfkit {

// lambda = sum gamma_j lambda^(j)
struct Decomposition {
  std::vector<std::vector<Scalar>> parts;
  std::vector<Scalar> gamma;

  auto size() const -> int { return static_cast<int>(parts.size()); }
};

inline void validate_decomposition(const std::vector<Scalar> &lambda, const Decomposition &D) {
  const int n = static_cast<int>(lambda.size()), r = D.size();
  if (r < 1 || static_cast<int>(D.gamma.size()) != r) throw InvalidInput("decomposition needs r >= 1 parts and r gammas");
  for (auto &p : D.parts)
    if (static_cast<int>(p.size()) != n) throw DimensionMismatch();
  for (int i = 0; i < n; ++i) {
    Scalar s = lambda[i] * 0L;
    for (int j = 0; j < r; ++j) s += D.gamma[j] * D.parts[j][i];
    if (s != lambda[i]) throw InvalidInput("sum of gamma_j lambda^(j) differs from lambda in entry " + std::to_string(i + 1));
  }
  if (rank(D.parts) != r) throw InvalidInput("decomposition parts are linearly dependent");
}

inline auto single_decomposition(const std::vector<Scalar> &lambda) -> Decomposition {
  return {{lambda}, {Scalar(1)}};
}

// (lambda, conj lambda; 1, 0), Bruno's A2 setting
inline auto a2_decomposition(const std::vector<Scalar> &lambda) -> Decomposition {
  std::vector<Scalar> c;
  for (auto &l : lambda) {
    if (!l.field()->has_conjugation()) throw InvalidInput("A2 needs a field with a declared conjugation");
    c.push_back(l.conj());
  }
  return {{lambda, c}, {Scalar(1), Scalar(0)}};
}

// ---------------------------------------------------------------- isoresonance

enum class Verdict { holds, fails, indeterminate };

inline auto verdict_name(Verdict v) -> std::string {
  return v == Verdict::holds ? "holds" : v == Verdict::fails ? "fails" : "indeterminate";
}

struct IsoresonanceReport {
  Verdict verdict = Verdict::holds;
  std::optional<std::vector<int>> lattice_witness;  // basis vector of R_lambda that fails
  std::optional<Exponent> witness;                  // resonant Q in N with <Q, lambda^(j)> != 0
  int part = -1;
};

// Lattice basis check first (sufficient); if it fails, look for a resonant Q in N
// with ||Q|| <= B that violates the condition.
inline auto check_isoresonance(const std::vector<Scalar> &lambda, const Decomposition &D, int B = 12)
    -> IsoresonanceReport {
  validate_decomposition(lambda, D);
  IsoresonanceReport out;
  auto L = lattice(lambda);
  for (auto &b : L.basis)
    for (int j = 0; j < D.size(); ++j) {
      Scalar w = D.parts[j][0] * 0L;
      for (std::size_t i = 0; i < b.size(); ++i) w += D.parts[j][i] * static_cast<long>(b[i]);
      if (!w.is_zero() && !out.lattice_witness) {
        out.lattice_witness = b;
        out.part = j;
      }
    }
  if (!out.lattice_witness) return out;
  // shell by shell, so an early witness stops the search
  for (int s = 0; s <= B; ++s)
    for (auto &q : enumerate_N(static_cast<int>(lambda.size()), s, s, s == 1)) {
      if (!weight(q, lambda).is_zero()) continue;
      for (int j = 0; j < D.size(); ++j)
        if (!weight(q, D.parts[j]).is_zero()) {
          out.verdict = Verdict::fails;
          out.witness = q;
          out.part = j;
          return out;
        }
    }
  out.verdict = Verdict::indeterminate;
  return out;
}

// ---------------------------------------------------------------- diophantine hull

enum class HullStatus { certified_single, certified_A2, certified_two_lines, scan_passed, violated, indeterminate };

inline auto hull_status_name(HullStatus s) -> std::string {
  switch (s) {
    case HullStatus::certified_single: return "certified_single";
    case HullStatus::certified_A2: return "certified_A2";
    case HullStatus::certified_two_lines: return "certified_two_lines";
    case HullStatus::scan_passed: return "scan_passed";
    case HullStatus::violated: return "violated";
    default: return "indeterminate";
  }
}

struct HullReport {
  HullStatus status = HullStatus::indeterminate;
  Rational c;                     // certified constant, or the scanned one
  std::optional<Exponent> witness;
  int part = -1;
  Interval ratio;                 // |<Q,lambda^(j)>| / |<Q,lambda>| at the witness
  int B = 0;
  long checked = 0;

  auto certified() const -> bool {
    return status == HullStatus::certified_single || status == HullStatus::certified_A2 ||
           status == HullStatus::certified_two_lines;
  }
};

namespace detail {

inline auto is_real(const Scalar &a) -> bool { return (a - a.conj()).is_zero(); }

// upper bound of 1/|g|
inline auto inv_abs_upper(const Scalar &g) -> Rational {
  Interval a = abs_interval(g, 80);
  if (sgn(a.lo) <= 0) throw PrecisionError("cannot bound |gamma| away from 0");
  return round_up(Rational(1) / a.lo, 64);
}

// Two-lines certificate: entries of gamma_j lambda^(j) on R zeta_j, lines distinct.
inline auto two_lines_constant(const Decomposition &D) -> std::optional<Rational> {
  if (D.size() != 2) return std::nullopt;
  std::vector<Scalar> zeta;
  for (int j = 0; j < 2; ++j) {
    if (D.gamma[j].is_zero()) return std::nullopt;
    if (!D.gamma[j].field()->has_conjugation()) return std::nullopt;
    std::optional<Scalar> z;
    for (auto &e : D.parts[j]) {
      Scalar u = D.gamma[j] * e;
      if (u.is_zero()) continue;
      if (!z) {
        z = u;
        continue;
      }
      if (!is_real(u * z->conj())) return std::nullopt;
    }
    if (!z) return std::nullopt;
    zeta.push_back(*z);
  }
  Scalar w = zeta[0] * zeta[1].conj();
  if (is_real(w)) return std::nullopt;  // same line
  // rho^2 = Re(w)^2 / |w|^2 < 1
  Scalar re = (w + w.conj()).scaled(Rational(1, 2));
  Interval re2 = abs2_interval(re, 96), w2 = abs2_interval(w, 96);
  if (sgn(w2.lo) <= 0) return std::nullopt;
  Rational rho = sqrt_upper(re2.hi / w2.lo, 64);
  if (rho >= 1) return std::nullopt;
  Rational s = sqrt_lower(1 - rho, 64);
  if (sgn(s) <= 0) return std::nullopt;
  Rational c = 0;
  for (int j = 0; j < 2; ++j) {
    Rational cj = inv_abs_upper(D.gamma[j]) / s;
    if (cj > c) c = cj;
  }
  return round_up(c, 64);
}

inline auto is_a2_pattern(const std::vector<Scalar> &lambda, const Decomposition &D) -> bool {
  if (D.size() != 2) return false;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!lambda[i].field()->has_conjugation()) return false;
    if (D.parts[0][i] != lambda[i] || D.parts[1][i] != lambda[i].conj()) return false;
  }
  return true;
}

}  // namespace detail

inline auto hull_scan(const std::vector<Scalar> &lambda, const Decomposition &D, const Rational &c, int B)
    -> HullReport;

// Certificates first (r = 1, A2, two lines); otherwise scan Q in N with ||Q|| <= B
// for |<Q,lambda^(j)>| <= c |<Q,lambda>|.
inline auto check_hull(const std::vector<Scalar> &lambda, const Decomposition &D, const Rational &c, int B)
    -> HullReport {
  validate_decomposition(lambda, D);
  HullReport out;
  out.B = B;
  if (D.size() == 1) {
    out.status = HullStatus::certified_single;
    out.c = detail::inv_abs_upper(D.gamma[0]);
    return out;
  }
  if (detail::is_a2_pattern(lambda, D)) {
    out.status = HullStatus::certified_A2;
    out.c = 1;
    return out;
  }
  if (auto c2 = detail::two_lines_constant(D)) {
    out.status = HullStatus::certified_two_lines;
    out.c = *c2;
    return out;
  }
  return hull_scan(lambda, D, c, B);
}

// |<Q,lambda^(j)>| <= c |<Q,lambda>| for all Q in N with ||Q|| <= B; first violation in degree-lex order
inline auto hull_scan(const std::vector<Scalar> &lambda, const Decomposition &D, const Rational &c, int B)
    -> HullReport {
  HullReport out;
  out.B = B;
  out.c = c;
  const int n = static_cast<int>(lambda.size());
  bool unresolved = false;
  for (auto &q : enumerate_N(n, 0, B, true)) {
    Scalar w = weight(q, lambda);
    for (int j = 0; j < D.size(); ++j) {
      Scalar wj = weight(q, D.parts[j]);
      if (wj.is_zero()) continue;
      ++out.checked;
      Cmp cmp = w.is_zero() ? Cmp::greater : compare_abs(wj, w.scaled(c));
      if (cmp == Cmp::greater) {
        out.status = HullStatus::violated;
        out.witness = q;
        out.part = j;
        if (!w.is_zero()) {
          Interval a = abs_interval(wj, 96), b = abs_interval(w, 96);
          out.ratio = {a.lo / b.hi, a.hi / b.lo};
        }
        return out;
      }
      if (cmp == Cmp::unresolved && !unresolved) {
        unresolved = true;
        out.witness = q;
        out.part = j;
      }
    }
  }
  out.status = unresolved ? HullStatus::indeterminate : HullStatus::scan_passed;
  return out;
}

// ---------------------------------------------------------------- Condition AS

struct ASReport {
  bool span_holds = true;
  std::optional<Exponent> offending;            // resonant P with G_P outside the span
  std::map<Exponent, std::vector<Scalar>, DegLex> beta;  // G_P = sum_j beta_{j,P} lambda^(j)
  std::vector<ScalarSeries> s;                  // s_j = sum_P beta_{j,P} x^P
  IsoresonanceReport iso;
  std::optional<HullReport> hull;

  // span and isoresonance; the hull is reported separately
  auto holds() const -> bool { return span_holds && iso.verdict == Verdict::holds; }
};

// G_P in span{lambda^(j)} for every stored P; terms must be resonant.
inline auto check_AS(const TermMap &G, const std::vector<Scalar> &lambda, const Decomposition &D) -> ASReport {
  validate_decomposition(lambda, D);
  const int n = static_cast<int>(lambda.size()), r = D.size();
  const Field *f = detail::common_field(lambda, G.field());
  ASReport out;
  out.s.assign(r, ScalarSeries(f, n));
  ScalarMatrix M(n, std::vector<Scalar>(r));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) M[i][j] = D.parts[j][i].in(f);
  for (auto &[P, c] : G) {
    if (!weight(P, lambda).is_zero()) throw InvalidInput("check_AS: term at " + P.str() + " is not resonant");
    std::vector<Scalar> rhs;
    for (auto &x : c) rhs.push_back(x.in(f));
    auto b = solve_dense(M, rhs);
    if (!b) {
      out.span_holds = false;
      out.offending = P;
      break;
    }
    out.beta.emplace(P, *b);
    for (int j = 0; j < r; ++j) out.s[j].add(P, (*b)[j]);
  }
  out.iso = check_isoresonance(lambda, D);
  return out;
}

inline auto check_AS(const BrunoField &G, const Decomposition &D) -> ASReport {
  return check_AS(G.terms(), G.lambda(), D);
}

inline auto check_A2(const BrunoField &G) -> ASReport { return check_AS(G, a2_decomposition(G.lambda())); }

// ---------------------------------------------------------------- nilpotency

struct NilpotencyReport {
  bool nilpotent = true;
  std::optional<Exponent> witness;  // basis field (x.e_k) x^Q with Delta^2 != 0
  int component = -1;
};

// Delta_{G*}^2 applied to every basis field (x.e_k)x^Q, 0 <= ||Q|| <= N
inline auto nilpotency_check(const TermMap &Gstar, int N) -> NilpotencyReport {
  NilpotencyReport out;
  if (Gstar.empty()) return out;
  const int n = Gstar.dim();
  const Field *f = Gstar.field();
  for (auto &q : enumerate_N(n, 0, N)) {
    if (q.sum() < 0) continue;
    for (int k = 0; k < n; ++k) {
      if (!q.allows_component(k)) continue;
      TermMap v(f, n);
      v.add_component(q, k, Scalar(f, Rational(1)));
      TermMap d2 = delta_apply(Gstar, delta_apply(Gstar, v, N), N);
      if (!d2.empty()) {
        out.nilpotent = false;
        out.witness = q;
        out.component = k;
        return out;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- closed form

namespace detail {

// 1/(1+u) truncated to order <= top, u without constant term
inline auto geometric_inverse(const ScalarSeries &u, int top) -> ScalarSeries {
  const int n = u.dim();
  const Field *f = u.field();
  ScalarSeries one(f, n);
  one.add(Exponent::zero(n), Scalar(f, Rational(1)));
  ScalarSeries sum = one, pw = one, neg = u.scaled_by(Scalar(-1)).truncated(top);
  for (int it = 0; it <= top; ++it) {
    pw = multiply(pw, neg, top);
    if (pw.empty()) break;
    sum += pw;
  }
  return sum;
}

}  // namespace detail

// h = D^-1 (W + D^-1 Delta_{G*} W) per joint weight (delta, delta^(1..r)),
// D = delta + sum_j delta^(j) s_j, W = Pr_top F*_delta restricted to orders >= m.
inline auto closed_form_homological(const TermMap &Gstar, const TermMap &Fstar, const std::vector<Scalar> &lambda,
                                    const Decomposition &D, int m, int top) -> TermMap {
  ASReport as = check_AS(Gstar, lambda, D);
  if (!as.span_holds) throw Error("closed_form_homological: G* fails the span condition at " + as.offending->str());
  const int n = static_cast<int>(lambda.size()), r = D.size();
  const Field *f = detail::common_field(lambda, Fstar.field());
  // group by joint weight
  std::map<std::vector<Scalar>, TermMap, std::function<bool(const std::vector<Scalar> &, const std::vector<Scalar> &)>>
      groups([](const std::vector<Scalar> &a, const std::vector<Scalar> &b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ScalarReprLess{});
      });
  for (auto &[q, c] : order_slice(Fstar, m, top)) {
    std::vector<Scalar> key{weight(q, lambda)};
    if (key[0].is_zero()) continue;
    for (int j = 0; j < r; ++j) key.push_back(weight(q, D.parts[j]));
    auto it = groups.find(key);
    if (it == groups.end()) it = groups.emplace(key, TermMap(f, n)).first;
    it->second.set(q, c);
  }
  TermMap h(f, n);
  for (auto &[key, W] : groups) {
    const Scalar &delta = key[0];
    Scalar dinv = delta.inv();
    ScalarSeries u(f, n);
    for (int j = 0; j < r; ++j) u += as.s[j].scaled_by(key[j + 1] * dinv);
    ScalarSeries Dinv = detail::geometric_inverse(u, top).scaled_by(dinv);
    TermMap DW = delta_apply(Gstar, W, top);
    TermMap inner = W + multiply(Dinv, DW, top);
    h += multiply(Dinv, inner, top);
  }
  return h;
}

// ---------------------------------------------------------------- majorants

// sum |a_Q| rho^||Q||, enclosed
inline auto majorant_norm(const ScalarSeries &s, const Rational &rho) -> Interval {
  Interval out{0, 0};
  for (auto &[q, c] : s) {
    Interval a = abs_interval(c, 80);
    Rational r = 1;
    for (int i = 0; i < q.order(); ++i) r *= rho;
    out.lo += round_down(a.lo * r, 80);
    out.hi += round_up(a.hi * r, 80);
  }
  return out;
}

// vector field: sum_Q |F_Q|_1 rho^||Q||
inline auto majorant_norm(const TermMap &t, const Rational &rho) -> Interval {
  Interval out{0, 0};
  for (auto &[q, c] : t) {
    Rational r = 1;
    for (int i = 0; i < q.order(); ++i) r *= rho;
    for (auto &x : c) {
      if (x.is_zero()) continue;
      Interval a = abs_interval(x, 80);
      out.lo += round_down(a.lo * r, 80);
      out.hi += round_up(a.hi * r, 80);
    }
  }
  return out;
}

// Delta_G as the matrix diag(x) Dg: entries sum_Q G_{Q,k} q_i x^Q
inline auto majorant_norm_delta(const TermMap &G, const Rational &rho) -> Interval {
  Interval out{0, 0};
  for (auto &[q, c] : G) {
    Rational r = 1;
    for (int i = 0; i < q.order(); ++i) r *= rho;
    r *= q.size();
    for (auto &x : c) {
      if (x.is_zero()) continue;
      Interval a = abs_interval(x, 80);
      out.lo += round_down(a.lo * r, 80);
      out.hi += round_up(a.hi * r, 80);
    }
  }
  return out;
}

// DG = diag g + Delta_G: entries sum_Q G_{Q,k} (delta_ki + q_i) x^Q
inline auto majorant_norm_jacobian(const TermMap &G, const Rational &rho) -> Interval {
  Interval out{0, 0};
  const int n = G.dim();
  for (auto &[q, c] : G) {
    Rational r = 1;
    for (int i = 0; i < q.order(); ++i) r *= rho;
    for (int k = 0; k < n; ++k) {
      if (c[k].is_zero()) continue;
      Interval a = abs_interval(c[k], 80);
      for (int i = 0; i < n; ++i) {
        int w = std::abs(q[i] + (i == k ? 1 : 0));
        if (w == 0) continue;
        out.lo += round_down(a.lo * r * w, 80);
        out.hi += round_up(a.hi * r * w, 80);
      }
    }
  }
  return out;
}

// certified lower bound of min ||Lambda v||_1 over ||v||_1 = 1, v real,
// via sigma_min(Lambda) / sqrt(r)
inline auto beta_lower_bound(const Decomposition &D) -> Rational {
  const int r = D.size(), n = static_cast<int>(D.parts[0].size());
  std::vector<std::vector<Interval>> M(r, std::vector<Interval>(r));
  std::vector<std::vector<ComplexBox>> box(r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i) box[j].push_back(embed(D.parts[j][i], 96));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      Interval s{0, 0};
      for (int i = 0; i < n; ++i) s = s + box[a][i].re * box[b][i].re + box[a][i].im * box[b][i].im;
      M[a][b] = s.rounded(96);
    }
  Rational lmin;
  if (r == 1) {
    lmin = M[0][0].lo;
  } else if (r == 2) {
    Interval half{(M[0][0].lo - M[1][1].hi) / 2, (M[0][0].hi - M[1][1].lo) / 2};
    Rational rad2 = sqr(half).hi + sqr(M[0][1]).hi;
    lmin = (M[0][0].lo + M[1][1].lo) / 2 - sqrt_upper(rad2, 80);
  } else {
    lmin = M[0][0].lo;
    for (int a = 0; a < r; ++a) {
      Rational g = M[a][a].lo;
      for (int b = 0; b < r; ++b)
        if (b != a) g -= std::max(Rational(abs(M[a][b].lo)), Rational(abs(M[a][b].hi)));
      if (g < lmin) lmin = g;
    }
  }
  if (sgn(lmin) <= 0) return 0;
  return sqrt_lower(lmin / r, 64);
}

// ---------------------------------------------------------------- step estimate

struct DeltaBound {
  Scalar delta;
  Rational lhs_hi;  // |h_delta|_rho, upper
  Rational rhs_lo;  // (2/|delta|)(n + 2 c1/|delta|) |Pr F*_delta|_rho, lower
  bool ok = false;
};

struct MajorantReport {
  Rational rho;
  int k = 0, m = 1;
  Interval F_norm, G_norm, Delta_norm, DG_norm, h_norm;
  Rational beta, c, c1, c2;
  Interval omega1, omega_k1;
  bool hypothesis_met = false;
  std::string hypothesis_note;
  std::vector<DeltaBound> per_delta;
  bool per_delta_ok = true;
  Rational aggregate_rhs_lo;  // c2 / omega_{k+1}^2, lower
  bool aggregate_ok = false;
};

// F in partial normal form to order m-1 with m = 2^k; c bounds |<Q,lambda^(j)>|/|<Q,lambda>|.
inline auto step_estimate_check(const BrunoField &F, const Decomposition &D, const Rational &c, const Rational &rho,
                                int k) -> MajorantReport {
  if (!(rho > Rational(1, 2) && rho <= 1)) throw InvalidInput("rho must lie in (1/2, 1]");
  if (k < 0 || k > 12) throw InvalidInput("k out of range");
  const auto &lambda = F.lambda();
  const int n = F.dim(), r = D.size(), m = 1 << k, N = F.trunc_order(), top = std::min(2 * m - 1, N);
  MajorantReport rep;
  rep.rho = rho;
  rep.k = k;
  rep.m = m;
  rep.c = c;
  TermMap Gstar = project(F.terms(), m - 1), Fstar = order_slice(F.terms(), m, N);
  rep.F_norm = majorant_norm(F.terms(), rho);
  rep.G_norm = majorant_norm(Gstar, rho);
  rep.Delta_norm = majorant_norm_delta(Gstar, rho);
  rep.DG_norm = majorant_norm_jacobian(Gstar, rho);
  rep.beta = beta_lower_bound(D);
  rep.c1 = sgn(c) > 0 ? rep.beta / (2 * r * c) : Rational(0);
  auto om = omega_sequence(lambda, k + 1);
  rep.omega1 = om.entries[0].value;
  rep.omega_k1 = om.entries[k].value;
  rep.c2 = 2 * (n * rep.omega1.hi + 2 * rep.c1);

  if (auto q = is_normal_up_to(F, m - 1)) {
    rep.hypothesis_note = "not in partial normal form below order " + std::to_string(m) + ": " + q->str();
    return rep;
  }
  ASReport as = check_AS(Gstar, lambda, D);
  std::string why;
  if (!as.span_holds) why = "G* fails the span condition";
  if (as.iso.verdict != Verdict::holds) why = "decomposition not isoresonant";
  if (!(rep.F_norm.hi < 1)) why = "|F|_rho >= 1";
  if (!(rep.G_norm.hi < rep.c1)) why = "|G*|_rho >= c1";
  if (!(rep.Delta_norm.hi < rep.c1)) why = "|Delta_G*|_rho >= c1";
  // the hull constant has to cover the divisors of this block
  for (auto &[q, x] : order_slice(Fstar, m, top)) {
    Scalar w = weight(q, lambda);
    if (w.is_zero()) continue;
    for (int j = 0; j < r; ++j) {
      Cmp cmp = compare_abs(weight(q, D.parts[j]), w.scaled(c));
      if (cmp == Cmp::greater || cmp == Cmp::unresolved) why = "hull constant c too small at " + q.str();
    }
  }
  rep.hypothesis_note = why;
  rep.hypothesis_met = why.empty();
  if (!rep.hypothesis_met) return rep;

  auto b = block_step(F, m);
  rep.h_norm = majorant_norm(b.h.terms(), rho);
  auto Fparts = eigen_split(order_slice(Fstar, m, top), lambda);
  for (auto &[delta, hd] : eigen_split(b.h.terms(), lambda)) {
    DeltaBound db;
    db.delta = delta;
    db.lhs_hi = majorant_norm(hd, rho).hi;
    Rational dabs = abs_interval(delta, 80).hi;
    Rational fnorm = Fparts.count(delta) ? majorant_norm(Fparts.at(delta), rho).lo : Rational(0);
    db.rhs_lo = 2 / dabs * (n + 2 * rep.c1 / dabs) * fnorm;
    db.ok = db.lhs_hi <= db.rhs_lo;
    rep.per_delta_ok = rep.per_delta_ok && db.ok;
    rep.per_delta.push_back(db);
  }
  rep.aggregate_rhs_lo = rep.c2 / (rep.omega_k1.hi * rep.omega_k1.hi);
  rep.aggregate_ok = rep.h_norm.hi < rep.aggregate_rhs_lo;
  return rep;
}

}  // namespace nfkit
