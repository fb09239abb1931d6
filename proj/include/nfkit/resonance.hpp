#pragma once
// Resonances of lambda: exact weights, the lattice R_lambda, small divisors
// omega_k and Siegel-Pliss certificates from the norm argument.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nfkit/exponent.hpp"
#include "nfkit/linalg.hpp"

namespace nfkit {

inline auto is_resonant(const Exponent &q, const std::vector<Scalar> &lambda) -> bool {
  return weight(q, lambda).is_zero();
}

inline auto field_of(const std::vector<Scalar> &v) -> const Field * {
  for (auto &s : v)
    if (s.field() != Field::rationals()) return s.field();
  return Field::rationals();
}

// Row j holds the coefficients of t^j of every lambda_i.
struct ResonanceContext {
  std::vector<Scalar> lambda;
  std::vector<std::vector<Rational>> expansion;

  explicit ResonanceContext(std::vector<Scalar> l) : lambda(std::move(l)) {
    const Field *f = field_of(lambda);
    const int m = f->degree(), n = static_cast<int>(lambda.size());
    expansion.assign(m, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) {
      Scalar s = lambda[i].in(f);
      for (int j = 0; j < m; ++j) expansion[j][i] = s.coeff(j);
    }
  }
};

// all Q in N with ||Q|| <= B and <Q,lambda> = 0, degree-lex order
inline auto resonant_exponents(const std::vector<Scalar> &lambda, int B) -> std::vector<Exponent> {
  std::vector<Exponent> out;
  for (auto &q : enumerate_N(static_cast<int>(lambda.size()), 0, B, true))
    if (is_resonant(q, lambda)) out.push_back(q);
  return out;
}

struct LatticeBasis {
  std::vector<std::vector<int>> basis;
  int rank = 0;
};

inline auto lattice(const std::vector<Scalar> &lambda) -> LatticeBasis {
  ResonanceContext ctx(lambda);
  const int n = static_cast<int>(lambda.size());
  IntMatrix A;
  for (auto &row : ctx.expansion) {
    Integer l = 1;
    for (auto &q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
    std::vector<Integer> r;
    for (auto &q : row) r.push_back(Integer(q * l));
    A.push_back(r);
  }
  LatticeBasis out;
  for (auto &v : integer_kernel(A, n)) {
    std::vector<int> b;
    for (auto &x : v) b.push_back(static_cast<int>(x.get_si()));
    out.basis.push_back(b);
  }
  out.rank = static_cast<int>(out.basis.size());
  return out;
}

// integer coordinates of v in the lattice basis, if v lies in the lattice
inline auto lattice_coordinates(const LatticeBasis &L, const std::vector<int> &v) -> std::optional<std::vector<Integer>> {
  const int n = static_cast<int>(v.size()), d = L.rank;
  ScalarMatrix A(n, std::vector<Scalar>(d));
  std::vector<Scalar> b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) A[i][j] = Scalar(L.basis[j][i]);
    b[i] = Scalar(v[i]);
  }
  auto x = solve_dense(A, b);
  if (!x) return std::nullopt;
  std::vector<Integer> out;
  for (auto &s : *x) {
    const Rational &q = s.rational_value();
    if (q.get_den() != 1) return std::nullopt;
    out.push_back(q.get_num());
  }
  return out;
}

// ---------------------------------------------------------------- omega

struct OmegaEntry {
  int k = 0;
  Interval value;        // certified enclosure of omega_k
  Exponent argmin;       // degree-lex first minimizer
  Scalar divisor;        // <argmin, lambda>
  bool resolved = true;  // false if a competing minimum could not be separated
};

struct OmegaSequence {
  std::vector<OmegaEntry> entries;
  double partial_sum_upper = 0;  // sum ln(1/omega_k)/2^k, rounded up
};

namespace detail {

// Tracks the minimum of |w| over a stream of nonzero weights in enumeration
// order; earlier entries win ties. A double prefilter skips the exact work
// when a candidate is clearly larger.
class MinTracker {
 public:
  explicit MinTracker(const std::vector<Scalar> &lambda) {
    for (auto &l : lambda) approx_.push_back(approx(l));
  }

  void offer(const Exponent &q, const Scalar &w) {
    std::complex<long double> a = 0;
    for (int i = 0; i < q.dim(); ++i)
      a += static_cast<long double>(q[i]) * std::complex<long double>(approx_[i].real(), approx_[i].imag());
    long double mag = std::abs(a);
    if (has_) {
      long double tol = 1e-9L * best_mag_ + 1e-9L;
      if (mag > best_mag_ + tol) return;
      Cmp c = compare_abs(w, best_w_);
      if (c == Cmp::greater || c == Cmp::equal) return;
      if (c == Cmp::unresolved) {
        resolved_ = false;
        Interval iv = abs_interval(w);
        if (iv.lo < lower_) lower_ = iv.lo;
        return;
      }
    }
    has_ = true;
    best_q_ = q;
    best_w_ = w;
    best_mag_ = mag;
    Interval iv = abs_interval(w);
    if (resolved_ || iv.lo < lower_) lower_ = iv.lo;
    upper_ = iv.hi;
  }

  auto has() const -> bool { return has_; }
  auto entry(int k) const -> OmegaEntry {
    OmegaEntry e;
    e.k = k;
    e.value = {std::min(lower_, upper_), upper_};
    e.argmin = best_q_;
    e.divisor = best_w_;
    e.resolved = resolved_;
    return e;
  }

 private:
  std::vector<std::complex<double>> approx_;
  bool has_ = false, resolved_ = true;
  Exponent best_q_;
  Scalar best_w_;
  long double best_mag_ = 0;
  Rational lower_, upper_;
};

}  // namespace detail

// omega_k = min |<Q,lambda>| over Q in N, <Q,lambda> != 0, ||Q|| < 2^k.
// Cost: one pass over N up to order 2^kmax - 1, roughly (2^kmax)^n / (n-1)! exponents.
inline auto omega_sequence(const std::vector<Scalar> &lambda, int k_max) -> OmegaSequence {
  const int n = static_cast<int>(lambda.size());
  if (k_max < 1 || k_max > 16) throw InvalidInput("k_max must be in 1..16");
  OmegaSequence out;
  detail::MinTracker tr(lambda);
  int done = -2;  // highest order already scanned
  for (int k = 1; k <= k_max; ++k) {
    int top = (1 << k) - 1;
    // order-1 shell includes the constant exponents -e_i; scan in degree-lex order
    auto shell = enumerate_N(n, done + 1 < 0 ? 0 : done + 1, top, done < 1);
    for (auto &q : shell) {
      Scalar w = weight(q, lambda);
      if (!w.is_zero()) tr.offer(q, w);
    }
    done = top;
    if (!tr.has()) throw InvalidInput("lambda has no nonzero divisor (all weights vanish)");
    out.entries.push_back(tr.entry(k));
  }
  double s = 0;
  for (auto &e : out.entries) {
    // ln(1/omega) <= ln(1/lower)
    double lo = to_double_down(e.value.lo);
    double term = lo > 0 ? -std::log(lo) : HUGE_VAL;
    if (term == 0) continue;  // omega_k >= 1 exactly
    term = std::nextafter(term, HUGE_VAL) / std::ldexp(1.0, e.k);
    s = std::nextafter(s + term, HUGE_VAL);
  }
  out.partial_sum_upper = s;
  return out;
}

// ---------------------------------------------------------------- Siegel-Pliss

struct SiegelPlissCertificate {
  int nu = 0;
  Rational C;       // |<Q,lambda>| >= C |Q|^-nu whenever the weight is nonzero
  Rational C_star;  // upper bound on all |sigma(lambda_i)| (rescaled generator)
  Integer N_den;    // N_den * lambda_i are algebraic integers
  Integer scale;    // generator rescaled to scale*t so the minimal polynomial is integral
};

struct SiegelPlissScan {
  bool pass = true;
  long checked = 0;
  std::optional<Exponent> witness;
};

inline auto siegel_pliss_certificate(const std::vector<Scalar> &lambda) -> SiegelPlissCertificate {
  const Field *f = field_of(lambda);
  const int m = f->degree();
  SiegelPlissCertificate c;
  c.nu = m - 1;
  // s = D t has an integral monic minimal polynomial
  Integer D = 1;
  for (auto &q : f->minpoly()) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), q.get_den().get_mpz_t());
  if (m == 1) D = 1;
  c.scale = D;
  // lambda_i = sum a_j t^j = sum (a_j / D^j) s^j
  Integer Nd = 1;
  for (auto &l : lambda) {
    Scalar s = l.in(f);
    Rational Dj = 1;
    for (int j = 0; j < m; ++j) {
      Rational a = s.coeff(j) / Dj;
      mpz_lcm(Nd.get_mpz_t(), Nd.get_mpz_t(), a.get_den().get_mpz_t());
      Dj *= Rational(D);
    }
  }
  c.N_den = Nd;
  Rational cs = 0;
  for (auto &l : lambda)
    for (auto &b : all_embeddings(l.in(f), 40)) {
      Rational up = sqrt_upper(b.abs2().hi, 40);
      if (up > cs) cs = up;
    }
  if (sgn(cs) == 0) cs = 1;
  c.C_star = round_up(cs, 30);
  // |Norm(N_den <Q,lambda>)| >= 1 and the other m-1 conjugates are <= N_den |Q| C*
  Rational denom = Rational(Nd);
  for (int j = 0; j < m - 1; ++j) denom *= Rational(Nd) * c.C_star;
  c.C = Rational(1) / denom;
  return c;
}

// certified check of |<Q,lambda>| |Q|^nu >= C for all Q in N, ||Q|| <= B
inline auto siegel_pliss_scan(const std::vector<Scalar> &lambda, const SiegelPlissCertificate &c, int B)
    -> SiegelPlissScan {
  SiegelPlissScan out;
  for (auto &q : enumerate_N(static_cast<int>(lambda.size()), 0, B, true)) {
    Scalar w = weight(q, lambda);
    if (w.is_zero()) continue;
    ++out.checked;
    Rational qn = 1;
    for (int j = 0; j < c.nu; ++j) qn *= q.size();
    // cheap certified path first, exact comparison if it is inconclusive
    Interval iv = abs_interval(w, 64);
    if (iv.lo * qn >= c.C) continue;
    if (compare_abs(w.scaled(qn), c.C) == Cmp::less) {
      out.pass = false;
      out.witness = q;
      return out;
    }
  }
  return out;
}

}  // namespace nfkit
