#pragma once
// Exact arithmetic in Q, Q(i) and Q[t]/(p), plus certified complex boxes for
// the designated embedding (and all the others, for norm arguments).

#include <gmpxx.h>

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfkit {

using Rational = mpq_class;
using Integer = mpz_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};
struct ReducibleMinpoly : Error {
  ReducibleMinpoly() : Error("minimal polynomial is reducible (zero divisor found)") {}
};
struct PrecisionError : Error {
  using Error::Error;
};
struct FieldMismatch : Error {
  FieldMismatch() : Error("operands live in different coefficient fields") {}
};
struct InvalidInput : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  DimensionMismatch() : Error("dimension mismatch") {}
};

// Bits; raise with NFKIT_PRECISION_FLOOR.
inline int precision_floor() {
  static const int v = [] {
    if (const char *s = std::getenv("NFKIT_PRECISION_FLOOR")) {
      int b = std::atoi(s);
      if (b >= 64) return b;
    }
    return 4096;
  }();
  return v;
}

// ---------------------------------------------------------------- rationals

inline auto round_down(const Rational &x, int bits) -> Rational {
  Integer num = x.get_num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
  Rational r(q);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), bits);
  return r;
}

inline auto round_up(const Rational &x, int bits) -> Rational {
  Integer num = x.get_num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
  Rational r(q);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), bits);
  return r;
}

inline auto pow2(int e) -> Rational {
  Rational r(1);
  if (e >= 0)
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), e);
  else
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), -e);
  return r;
}

// x >= 0
inline auto sqrt_upper(const Rational &x, int bits) -> Rational {
  if (sgn(x) <= 0) return Rational(0);
  Rational s = x * pow2(2 * bits);
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), s.get_num().get_mpz_t(), s.get_den().get_mpz_t());
  Integer r;
  mpz_sqrt(r.get_mpz_t(), c.get_mpz_t());
  if (r * r < c) r += 1;
  return Rational(r) / pow2(bits);
}

inline auto sqrt_lower(const Rational &x, int bits) -> Rational {
  if (sgn(x) <= 0) return Rational(0);
  Rational s = x * pow2(2 * bits);
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), s.get_num().get_mpz_t(), s.get_den().get_mpz_t());
  Integer r;
  mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
  return Rational(r) / pow2(bits);
}

inline auto to_double_up(const Rational &q) -> double {
  double d = q.get_d();
  if (std::isinf(d)) return d;
  if (Rational(d) < q) d = std::nextafter(d, HUGE_VAL);
  return d;
}

inline auto to_double_down(const Rational &q) -> double {
  double d = q.get_d();
  if (std::isinf(d)) return d;
  if (Rational(d) > q) d = std::nextafter(d, -HUGE_VAL);
  return d;
}

// exact value of a finite double
inline auto from_double(double d) -> Rational { return Rational(d); }

inline auto rational_str(const Rational &q) -> std::string { return q.get_str(); }

inline auto parse_rational(const std::string &s) -> Rational {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw InvalidInput("empty rational literal");
  if (t[0] == '+') t.erase(0, 1);
  auto valid_int = [](const std::string &x) {
    std::size_t i = (!x.empty() && x[0] == '-') ? 1 : 0;
    if (i >= x.size()) return false;
    for (; i < x.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(x[i]))) return false;
    return true;
  };
  auto slash = t.find('/');
  std::string num = t.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-')
    throw InvalidInput("bad rational literal '" + s + "'");
  Integer nz(num), dz(den);
  if (dz == 0) throw InvalidInput("zero denominator in '" + s + "'");
  Rational q(nz, dz);
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------- intervals

struct Interval {
  Rational lo, hi;

  static auto point(const Rational &q) -> Interval { return {q, q}; }
  auto contains(const Rational &q) const -> bool { return lo <= q && q <= hi; }
  auto contains_zero() const -> bool { return sgn(lo) <= 0 && sgn(hi) >= 0; }
  auto width() const -> Rational { return hi - lo; }
  auto mid() const -> Rational { return (lo + hi) / 2; }
  auto rounded(int bits) const -> Interval { return {round_down(lo, bits), round_up(hi, bits)}; }
};

inline auto operator+(const Interval &a, const Interval &b) -> Interval {
  return {a.lo + b.lo, a.hi + b.hi};
}
inline auto operator-(const Interval &a, const Interval &b) -> Interval {
  return {a.lo - b.hi, a.hi - b.lo};
}
inline auto operator-(const Interval &a) -> Interval { return {-a.hi, -a.lo}; }
inline auto operator*(const Interval &a, const Interval &b) -> Interval {
  Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}
inline auto sqr(const Interval &a) -> Interval {
  Rational l2 = a.lo * a.lo, h2 = a.hi * a.hi;
  if (a.contains_zero()) return {Rational(0), std::max(l2, h2)};
  return {std::min(l2, h2), std::max(l2, h2)};
}
inline auto intersects(const Interval &a, const Interval &b) -> bool {
  return !(a.hi < b.lo || b.hi < a.lo);
}

struct ComplexBox {
  Interval re, im;

  auto mid() const -> std::complex<double> { return {re.mid().get_d(), im.mid().get_d()}; }
  auto radius() const -> Rational { return std::max(re.width(), im.width()) / 2; }
  auto contains(const Rational &x, const Rational &y) const -> bool {
    return re.contains(x) && im.contains(y);
  }
  auto conj() const -> ComplexBox { return {re, -im}; }
  auto rounded(int bits) const -> ComplexBox { return {re.rounded(bits), im.rounded(bits)}; }
  // |z|^2
  auto abs2() const -> Interval { return sqr(re) + sqr(im); }
};

inline auto operator+(const ComplexBox &a, const ComplexBox &b) -> ComplexBox {
  return {a.re + b.re, a.im + b.im};
}
inline auto operator-(const ComplexBox &a, const ComplexBox &b) -> ComplexBox {
  return {a.re - b.re, a.im - b.im};
}
inline auto operator*(const ComplexBox &a, const ComplexBox &b) -> ComplexBox {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline auto overlaps(const ComplexBox &a, const ComplexBox &b) -> bool {
  return intersects(a.re, b.re) && intersects(a.im, b.im);
}

namespace detail {

using RPoly = std::vector<Rational>;  // low degree first

inline void trim(RPoly &p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

// r = a mod b, q = a div b  (b nonzero, trimmed)
inline void divmod(RPoly a, const RPoly &b, RPoly &q, RPoly &r) {
  trim(a);
  q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rational(0));
  const Rational &lead = b.back();
  while (a.size() >= b.size() && !a.empty()) {
    std::size_t shift = a.size() - b.size();
    Rational c = a.back() / lead;
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= c * b[i];
    a.pop_back();
    trim(a);
  }
  r = std::move(a);
}

inline auto mul(const RPoly &a, const RPoly &b) -> RPoly {
  if (a.empty() || b.empty()) return {};
  RPoly c(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  trim(c);
  return c;
}

inline auto sub(const RPoly &a, const RPoly &b) -> RPoly {
  RPoly c(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  trim(c);
  return c;
}

// complex rationals, only used by root refinement
struct CQ {
  Rational re, im;
};
inline auto operator+(const CQ &a, const CQ &b) -> CQ { return {a.re + b.re, a.im + b.im}; }
inline auto operator-(const CQ &a, const CQ &b) -> CQ { return {a.re - b.re, a.im - b.im}; }
inline auto operator*(const CQ &a, const CQ &b) -> CQ {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline auto norm2(const CQ &a) -> Rational { return a.re * a.re + a.im * a.im; }

}  // namespace detail

// ---------------------------------------------------------------- fields

class Field {
 public:
  enum class Kind { rationals, gaussian_rationals, number_field };

  static auto rationals() -> const Field * {
    static const Field f(Kind::rationals, {Rational(0), Rational(1)}, {0.0, 0.0}, std::nullopt);
    return &f;
  }
  static auto gaussian() -> const Field * {
    static const Field f(Kind::gaussian_rationals, {Rational(1), Rational(0), Rational(1)},
                         {0.0, 1.0}, 3);
    return &f;
  }
  // minpoly = [c0, ..., c_{m-1}, 1]
  static auto number_field(std::vector<Rational> minpoly, std::complex<double> selector,
                           std::optional<int> conj_pow = std::nullopt) -> const Field * {
    static std::mutex mu;
    static std::deque<std::unique_ptr<Field>> pool;
    if (minpoly.size() < 3) throw InvalidInput("number field needs a minimal polynomial of degree >= 2");
    if (minpoly.back() != 1) throw InvalidInput("minimal polynomial must be monic");
    std::lock_guard lock(mu);
    for (auto &f : pool)
      if (f->minpoly_ == minpoly && f->conj_pow_ == conj_pow && f->selector_ == selector)
        return f.get();
    pool.push_back(std::unique_ptr<Field>(new Field(Kind::number_field, minpoly, selector, conj_pow)));
    return pool.back().get();
  }

  auto kind() const -> Kind { return kind_; }
  auto degree() const -> int { return static_cast<int>(minpoly_.size()) - 1; }
  auto minpoly() const -> const std::vector<Rational> & { return minpoly_; }
  auto selector() const -> std::complex<double> { return selector_; }
  auto conj_pow() const -> std::optional<int> { return conj_pow_; }
  auto has_conjugation() const -> bool { return kind_ != Kind::number_field || conj_pow_.has_value(); }
  auto root_count() const -> int { return degree(); }
  auto selected_root() const -> int { return selected_; }
  // t^(m+j) mod p for j = 0..m-2
  auto reduction() const -> const std::vector<std::vector<Rational>> & { return red_; }
  // column j = image of t^j under conjugation
  auto conj_matrix() const -> const std::vector<std::vector<Rational>> & { return conj_; }

  auto describe() const -> std::string {
    switch (kind_) {
      case Kind::rationals: return "Q";
      case Kind::gaussian_rationals: return "Q(i)";
      default: break;
    }
    std::ostringstream os;
    os << "Q[t]/(";
    bool first = true;
    for (int j = degree(); j >= 0; --j) {
      if (sgn(minpoly_[j]) == 0) continue;
      Rational c = minpoly_[j];
      os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      Rational a = abs(c);
      if (a != 1 || j == 0) os << a.get_str() << (j ? "*" : "");
      if (j) os << "t" << (j > 1 ? "^" + std::to_string(j) : "");
      first = false;
    }
    os << ")";
    return os.str();
  }

  // Certified box containing root number `idx` with radius <= 2^-bits.
  auto root_box(int idx, int bits) const -> ComplexBox {
    if (kind_ == Kind::rationals) return {Interval::point(0), Interval::point(0)};
    if (kind_ == Kind::gaussian_rationals) {
      Rational y = idx == 0 ? Rational(1) : Rational(-1);
      return {Interval::point(0), Interval::point(y)};
    }
    std::lock_guard lock(mu_);
    refine_locked(bits);
    const Disk &d = disks_[idx];
    return {{d.re - d.rad, d.re + d.rad}, {d.im - d.rad, d.im + d.rad}};
  }

  auto approx_root(int idx) const -> std::complex<double> {
    if (kind_ == Kind::rationals) return {0, 0};
    if (kind_ == Kind::gaussian_rationals) return {0, idx == 0 ? 1.0 : -1.0};
    return {static_cast<double>(approx_[idx].real()), static_cast<double>(approx_[idx].imag())};
  }

 private:
  struct Disk {
    Rational re, im, rad;
  };

  Field(Kind k, std::vector<Rational> minpoly, std::complex<double> sel, std::optional<int> conj)
      : kind_(k), minpoly_(std::move(minpoly)), selector_(sel), conj_pow_(conj) {
    const int m = degree();
    // reduction table
    std::vector<Rational> cur(m, Rational(0));
    if (m >= 2) cur[m - 1] = 1;  // t^(m-1)
    for (int j = 0; m >= 2 && j <= m - 2; ++j) {
      std::vector<Rational> nxt(m, Rational(0));
      Rational top = cur[m - 1];
      for (int i = m - 1; i > 0; --i) nxt[i] = cur[i - 1];
      for (int i = 0; i < m; ++i) nxt[i] -= top * minpoly_[i];
      red_.push_back(nxt);
      cur = nxt;
    }
    if (kind_ == Kind::number_field) {
      isolate_initial();
      pick_selected();
    }
    build_conjugation();
  }

  void build_conjugation() {
    const int m = degree();
    conj_.assign(m, std::vector<Rational>(m, Rational(0)));
    if (kind_ == Kind::rationals) {
      conj_[0][0] = 1;
      return;
    }
    if (!conj_pow_) return;
    int e = *conj_pow_;
    if (e < 0) throw InvalidInput("conj_pow must be nonnegative");
    // tau = t^e mod p
    detail::RPoly p(minpoly_.begin(), minpoly_.end()), q, tau;
    detail::RPoly te(e + 1, Rational(0));
    te[e] = 1;
    detail::divmod(te, p, q, tau);
    detail::RPoly pw{Rational(1)};
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m && i < static_cast<int>(pw.size()); ++i) conj_[i][j] = pw[i];
      detail::RPoly r;
      detail::divmod(detail::mul(pw, tau), p, q, r);
      pw = r;
    }
    // p(tau) == 0 mod p
    detail::RPoly acc;
    for (int j = m; j >= 0; --j) {
      detail::RPoly r;
      detail::divmod(detail::mul(acc, tau), p, q, r);
      acc = r;
      if (acc.empty()) acc.push_back(Rational(0));
      acc[0] += minpoly_[j];
      detail::trim(acc);
    }
    if (!acc.empty()) throw InvalidInput("conj_pow does not define a field automorphism");
    // involution: tau(tau) == t
    detail::RPoly tt(m, Rational(0));
    for (int j = 0; j < m && j < static_cast<int>(tau.size()); ++j)
      for (int i = 0; i < m; ++i) tt[i] += tau[j] * conj_[i][j];
    detail::trim(tt);
    detail::RPoly t1{Rational(0), Rational(1)};
    if (m == 1) t1 = {};
    if (tt != t1) throw InvalidInput("conj_pow is not an involution");
    if (kind_ == Kind::number_field) {
      // must act as complex conjugation at the designated root
      std::complex<long double> z = approx_[selected_], w = 0;
      for (int j = static_cast<int>(tau.size()) - 1; j >= 0; --j)
        w = w * z + static_cast<long double>(tau[j].get_d());
      if (std::abs(w - std::conj(z)) > 1e-6L * (1 + std::abs(z)))
        throw InvalidInput("conj_pow does not realize complex conjugation at the selected root");
    }
  }

  auto eval_ld(std::complex<long double> z, bool deriv) const -> std::complex<long double> {
    const int m = degree();
    std::complex<long double> v = 0;
    for (int j = m; j >= (deriv ? 1 : 0); --j)
      v = v * z + static_cast<long double>(minpoly_[j].get_d()) * (deriv ? static_cast<long double>(j) : 1.0L);
    return v;
  }

  void isolate_initial() {
    const int m = degree();
    long double bound = 1;
    for (int j = 0; j < m; ++j) bound = std::max(bound, 1 + std::abs(static_cast<long double>(minpoly_[j].get_d())));
    std::vector<std::complex<long double>> z(m);
    std::complex<long double> seed(0.4L, 0.9L), pw = 1;
    for (int k = 0; k < m; ++k) {
      pw *= seed;
      z[k] = pw * bound;
    }
    for (int it = 0; it < 2000; ++it) {
      long double change = 0;
      for (int k = 0; k < m; ++k) {
        std::complex<long double> den = 1;
        for (int j = 0; j < m; ++j)
          if (j != k) den *= (z[k] - z[j]);
        if (std::abs(den) == 0) den = 1e-30L;
        auto step = eval_ld(z[k], false) / den;
        z[k] -= step;
        change = std::max(change, std::abs(step));
      }
      if (change < 1e-30L) break;
    }
    // newton polish in long double
    for (auto &r : z)
      for (int it = 0; it < 8; ++it) {
        auto d = eval_ld(r, true);
        if (std::abs(d) == 0) break;
        r -= eval_ld(r, false) / d;
      }
    for (auto &r : z) {
      if (std::abs(r.imag()) < 1e-300L) r = {r.real(), 0.0L};
    }
    std::sort(z.begin(), z.end(), [](auto a, auto b) {
      if (std::abs(a.real() - b.real()) > 1e-12L) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    approx_ = z;
    disks_.clear();
    for (auto &r : z) disks_.push_back({Rational(static_cast<double>(r.real())), Rational(static_cast<double>(r.imag())), Rational(-1)});
  }

  void pick_selected() {
    const int m = degree();
    long double gap = HUGE_VALL;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) gap = std::min(gap, std::abs(approx_[i] - approx_[j]));
    std::complex<long double> s(selector_.real(), selector_.imag());
    int best = -1;
    long double bd = HUGE_VALL;
    for (int i = 0; i < m; ++i) {
      auto d = std::abs(approx_[i] - s);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (!(bd < gap / 2))
      throw InvalidInput("root selector does not identify a unique root of the minimal polynomial");
    selected_ = best;
  }

  void refine_locked(int bits) const {
    if (bits <= disk_bits_) return;
    const int m = degree();
    const int floor_bits = precision_floor();
    using detail::CQ;
    auto eval = [&](const CQ &z, bool deriv) {
      CQ v{Rational(0), Rational(0)};
      for (int j = m; j >= (deriv ? 1 : 0); --j) {
        v = v * z;
        v.re += minpoly_[j] * (deriv ? j : 1);
      }
      return v;
    };
    for (int b = std::max(bits, 64);; b *= 2) {
      const int wb = b + 32;
      std::vector<Disk> out(m);
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) {
        CQ z{disks_[i].re, disks_[i].im};
        for (int it = 0; it < 200; ++it) {
          CQ f = eval(z, false), d = eval(z, true);
          Rational dn = detail::norm2(d);
          if (sgn(dn) == 0) {
            ok = false;
            break;
          }
          // step = f / d
          CQ step{(f.re * d.re + f.im * d.im) / dn, (f.im * d.re - f.re * d.im) / dn};
          CQ nz{round_down(z.re - step.re, wb), round_down(z.im - step.im, wb)};
          bool small = detail::norm2(step) < pow2(-2 * wb);
          z = nz;
          if (small) break;
        }
        if (!ok) break;
        CQ f = eval(z, false), d = eval(z, true);
        Rational dn = detail::norm2(d);
        if (sgn(dn) == 0) {
          ok = false;
          break;
        }
        Rational r2 = Rational(m * m) * detail::norm2(f) / dn;
        out[i] = {z.re, z.im, sqrt_upper(r2, wb + 8)};
        if (out[i].rad > pow2(-bits)) ok = false;
      }
      for (int i = 0; i < m && ok; ++i)
        for (int j = i + 1; j < m && ok; ++j) {
          Rational dx = out[i].re - out[j].re, dy = out[i].im - out[j].im;
          Rational s = out[i].rad + out[j].rad;
          if (dx * dx + dy * dy <= s * s) ok = false;
        }
      if (ok) {
        disks_ = out;
        disk_bits_ = bits;
        return;
      }
      if (b > floor_bits) throw PrecisionError("root isolation failed at the precision floor");
    }
  }

  Kind kind_;
  std::vector<Rational> minpoly_;
  std::complex<double> selector_;
  std::optional<int> conj_pow_;
  int selected_ = 0;
  std::vector<std::vector<Rational>> red_;
  std::vector<std::vector<Rational>> conj_;
  std::vector<std::complex<long double>> approx_;
  mutable std::mutex mu_;
  mutable std::vector<Disk> disks_;
  mutable int disk_bits_ = 0;
};

// ---------------------------------------------------------------- scalars

class Scalar {
 public:
  using Coeffs = boost::container::small_vector<Rational, 2>;

  Scalar() : f_(Field::rationals()), c_(1) {}
  explicit Scalar(const Field *f) : f_(f), c_(f->degree()) {}
  Scalar(long v) : f_(Field::rationals()), c_(1) { c_[0] = v; }  // NOLINT
  Scalar(int v) : Scalar(static_cast<long>(v)) {}                 // NOLINT
  Scalar(const Rational &q) : f_(Field::rationals()), c_(1) { c_[0] = q; }  // NOLINT
  Scalar(const Field *f, const Rational &q) : f_(f), c_(f->degree()) { c_[0] = q; }
  // arbitrary-length coefficient list, reduced mod p
  Scalar(const Field *f, const std::vector<Rational> &cs) : f_(f), c_(f->degree()) {
    const int m = f->degree();
    for (int j = 0; j < static_cast<int>(cs.size()); ++j) {
      if (sgn(cs[j]) == 0) continue;
      if (j < m) {
        c_[j] += cs[j];
      } else {
        Scalar tj = generator(f).pow(j);
        *this += tj * Scalar(f, cs[j]);
      }
    }
  }

  static auto generator(const Field *f) -> Scalar {
    Scalar s(f);
    if (f->degree() == 1) {
      s.c_[0] = 0;  // t is the root of t, i.e. zero
    } else {
      s.c_[1] = 1;
    }
    return s;
  }
  static auto imag_unit() -> Scalar { return generator(Field::gaussian()); }

  auto field() const -> const Field * { return f_; }
  auto coeffs() const -> const Coeffs & { return c_; }
  auto coeff(int j) const -> const Rational & { return c_[j]; }
  auto is_zero() const -> bool {
    for (auto &c : c_)
      if (sgn(c) != 0) return false;
    return true;
  }
  auto is_rational() const -> bool {
    for (std::size_t j = 1; j < c_.size(); ++j)
      if (sgn(c_[j]) != 0) return false;
    return true;
  }
  auto is_one() const -> bool { return is_rational() && c_[0] == 1; }
  auto rational_value() const -> const Rational & { return c_[0]; }

  // rational scalars adopt the other operand's field
  auto in(const Field *f) const -> Scalar {
    if (f == f_) return *this;
    if (!is_rational()) throw FieldMismatch();
    return Scalar(f, c_[0]);
  }

  auto operator-() const -> Scalar {
    Scalar r = *this;
    for (auto &c : r.c_) c = -c;
    return r;
  }
  auto operator+=(const Scalar &o) -> Scalar & {
    unify(o);
    if (o.f_ == f_) {
      for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
    } else {
      c_[0] += o.c_[0];
    }
    return *this;
  }
  auto operator-=(const Scalar &o) -> Scalar & {
    unify(o);
    if (o.f_ == f_) {
      for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
    } else {
      c_[0] -= o.c_[0];
    }
    return *this;
  }
  auto operator*=(const Scalar &o) -> Scalar & {
    *this = *this * o;
    return *this;
  }
  auto operator/=(const Scalar &o) -> Scalar & {
    *this = *this * o.inv();
    return *this;
  }
  auto operator*=(long k) -> Scalar & {
    for (auto &c : c_) c *= k;
    return *this;
  }

  friend auto operator+(Scalar a, const Scalar &b) -> Scalar { return a += b; }
  friend auto operator-(Scalar a, const Scalar &b) -> Scalar { return a -= b; }
  friend auto operator*(const Scalar &a, long k) -> Scalar {
    Scalar r = a;
    return r *= k;
  }
  friend auto operator*(const Scalar &a, const Scalar &b) -> Scalar {
    if (a.f_ != b.f_) {
      if (b.f_->degree() == 1 && b.f_ == Field::rationals()) return a.scaled(b.c_[0]);
      if (a.f_->degree() == 1 && a.f_ == Field::rationals()) return b.scaled(a.c_[0]);
      throw FieldMismatch();
    }
    const int m = a.f_->degree();
    Scalar r(a.f_);
    if (m == 1) {
      r.c_[0] = a.c_[0] * b.c_[0];
      return r;
    }
    boost::container::small_vector<Rational, 4> prod(2 * m - 1);
    for (int i = 0; i < m; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (int j = 0; j < m; ++j)
        if (sgn(b.c_[j]) != 0) prod[i + j] += a.c_[i] * b.c_[j];
    }
    const auto &red = a.f_->reduction();
    for (int k = 2 * m - 2; k >= m; --k) {
      if (sgn(prod[k]) == 0) continue;
      const auto &rv = red[k - m];
      for (int i = 0; i < m; ++i)
        if (sgn(rv[i]) != 0) prod[i] += prod[k] * rv[i];
    }
    for (int i = 0; i < m; ++i) r.c_[i] = std::move(prod[i]);
    return r;
  }
  friend auto operator/(const Scalar &a, const Scalar &b) -> Scalar { return a * b.inv(); }

  auto scaled(const Rational &q) const -> Scalar {
    Scalar r = *this;
    for (auto &c : r.c_) c *= q;
    return r;
  }

  auto inv() const -> Scalar {
    if (is_zero()) throw DivisionByZero();
    const int m = f_->degree();
    if (m == 1 || is_rational()) return Scalar(f_, Rational(1) / c_[0]);
    if (f_->kind() == Field::Kind::gaussian_rationals) {
      Rational n = c_[0] * c_[0] + c_[1] * c_[1];
      Scalar r(f_);
      r.c_[0] = c_[0] / n;
      r.c_[1] = -c_[1] / n;
      return r;
    }
    using detail::RPoly;
    RPoly r0(f_->minpoly().begin(), f_->minpoly().end());
    RPoly r1(c_.begin(), c_.end());
    detail::trim(r1);
    RPoly s0, s1{Rational(1)};
    while (!r1.empty()) {
      RPoly q, r;
      detail::divmod(r0, r1, q, r);
      r0 = std::move(r1);
      r1 = std::move(r);
      RPoly ns = detail::sub(s0, detail::mul(q, s1));
      s0 = std::move(s1);
      s1 = std::move(ns);
    }
    if (r0.size() != 1) throw ReducibleMinpoly();
    Rational k = Rational(1) / r0[0];
    RPoly q, rem;
    detail::divmod(s0, RPoly(f_->minpoly().begin(), f_->minpoly().end()), q, rem);
    Scalar out(f_);
    for (int j = 0; j < static_cast<int>(rem.size()); ++j) out.c_[j] = rem[j] * k;
    return out;
  }

  auto pow(int e) const -> Scalar {
    if (e < 0) return inv().pow(-e);
    Scalar r(f_, Rational(1)), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  // requires a declared conjugation (always available for Q and Q(i))
  auto conj() const -> Scalar {
    if (!f_->has_conjugation()) throw InvalidInput("field has no declared conjugation");
    const int m = f_->degree();
    if (m == 1) return *this;
    const auto &M = f_->conj_matrix();
    Scalar r(f_);
    for (int j = 0; j < m; ++j) {
      if (sgn(c_[j]) == 0) continue;
      for (int i = 0; i < m; ++i)
        if (sgn(M[i][j]) != 0) r.c_[i] += c_[j] * M[i][j];
    }
    return r;
  }

  friend auto operator==(const Scalar &a, const Scalar &b) -> bool {
    if (a.f_ == b.f_) return a.c_ == b.c_;
    if (!a.is_rational() || !b.is_rational()) return false;
    return a.c_[0] == b.c_[0];
  }
  friend auto operator!=(const Scalar &a, const Scalar &b) -> bool { return !(a == b); }

  // canonical total order on representations (not on values in C)
  friend auto repr_less(const Scalar &a, const Scalar &b) -> bool {
    std::size_t m = std::max(a.c_.size(), b.c_.size());
    for (std::size_t j = 0; j < m; ++j) {
      Rational x = j < a.c_.size() ? a.c_[j] : Rational(0);
      Rational y = j < b.c_.size() ? b.c_[j] : Rational(0);
      if (x != y) return x < y;
    }
    return false;
  }

  auto str() const -> std::string {
    if (is_rational()) return c_[0].get_str();
    const char *var = f_->kind() == Field::Kind::gaussian_rationals ? "i" : "t";
    std::string out;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (sgn(c_[j]) == 0) continue;
      Rational a = abs(c_[j]);
      std::string mono = j == 0 ? "" : (j == 1 ? var : std::string(var) + "^" + std::to_string(j));
      std::string body = j == 0 ? a.get_str() : (a == 1 ? mono : a.get_str() + "*" + mono);
      if (out.empty())
        out = (sgn(c_[j]) < 0 ? "-" : "") + body;
      else
        out += (sgn(c_[j]) < 0 ? " - " : " + ") + body;
    }
    return out;
  }

 private:
  void unify(const Scalar &o) {
    if (o.f_ == f_) return;
    if (o.f_ == Field::rationals()) return;
    if (f_ == Field::rationals() && is_rational()) {
      *this = Scalar(o.f_, c_[0]);
      return;
    }
    throw FieldMismatch();
  }

  const Field *f_;
  Coeffs c_;
};

struct ScalarReprLess {
  auto operator()(const Scalar &a, const Scalar &b) const -> bool { return repr_less(a, b); }
};

inline auto operator<<(std::ostream &os, const Scalar &s) -> std::ostream & { return os << s.str(); }

// ---------------------------------------------------------------- embeddings

namespace detail {

inline auto horner_box(const Scalar &a, const ComplexBox &root, int bits) -> ComplexBox {
  const auto &c = a.coeffs();
  int m = static_cast<int>(c.size());
  ComplexBox acc{Interval::point(c[m - 1]), Interval::point(0)};
  for (int j = m - 2; j >= 0; --j) {
    acc = acc * root;
    acc.re = acc.re + Interval::point(c[j]);
    acc = acc.rounded(bits);
  }
  return acc;
}

inline auto embed_at(const Scalar &a, int idx, int precision) -> ComplexBox {
  if (a.is_rational()) return {Interval::point(a.coeff(0)), Interval::point(0)};
  const Field *f = a.field();
  const Rational target = pow2(-precision);
  for (int guard = 16;; guard *= 2) {
    int bits = precision + guard;
    if (bits > precision_floor() + 64) throw PrecisionError("embedding did not reach requested precision");
    ComplexBox root = f->root_box(idx, bits);
    ComplexBox out = horner_box(a, root, bits + 8);
    if (out.radius() <= target) return out;
  }
}

}  // namespace detail

inline auto embed(const Scalar &a, int precision) -> ComplexBox {
  return detail::embed_at(a, a.field()->selected_root(), precision);
}

inline auto all_embeddings(const Scalar &a, int precision) -> std::vector<ComplexBox> {
  std::vector<ComplexBox> out;
  const Field *f = a.field();
  for (int i = 0; i < f->root_count(); ++i) out.push_back(detail::embed_at(a, i, precision));
  return out;
}

inline auto approx(const Scalar &a) -> std::complex<double> { return embed(a, 60).mid(); }

// |a|^2 enclosure
inline auto abs2_interval(const Scalar &a, int precision) -> Interval {
  if (a.is_rational()) return Interval::point(a.coeff(0) * a.coeff(0));
  return embed(a, precision).abs2();
}

// certified |a| enclosure, width about 2^-precision (for nonzero a)
inline auto abs_interval(const Scalar &a, int precision = 80) -> Interval {
  if (a.is_rational()) return Interval::point(abs(a.coeff(0)));
  Interval q = abs2_interval(a, precision + 8);
  return {sqrt_lower(q.lo, precision + 8), sqrt_upper(q.hi, precision + 8)};
}

inline auto abs_upper(const Scalar &a) -> double { return to_double_up(abs_interval(a, 80).hi); }
inline auto abs_lower(const Scalar &a) -> double { return to_double_down(abs_interval(a, 80).lo); }

// Sign of a scalar that is real under the designated embedding.
inline auto sign_real(const Scalar &a) -> int {
  if (a.is_zero()) return 0;
  if (a.is_rational()) return sgn(a.coeff(0));
  for (int p = 64;; p *= 2) {
    if (p > precision_floor()) throw PrecisionError("sign undecided at the precision floor");
    ComplexBox b = embed(a, p);
    if (sgn(b.re.lo) > 0) return 1;
    if (sgn(b.re.hi) < 0) return -1;
  }
}

enum class Cmp { less, equal, greater, unresolved };

// |a| against |b|; exact whenever the field carries a conjugation.
inline auto compare_abs(const Scalar &a, const Scalar &b) -> Cmp {
  const Field *f = a.is_rational() ? b.field() : a.field();
  if (f->has_conjugation()) {
    Scalar ab = a.in(f), bb = b.in(f);
    Scalar d = ab * ab.conj() - bb * bb.conj();
    int s = sign_real(d);
    return s < 0 ? Cmp::less : (s > 0 ? Cmp::greater : Cmp::equal);
  }
  if (a == b || a == -b) return Cmp::equal;
  for (int p = 64; p <= precision_floor(); p *= 2) {
    Interval x = abs2_interval(a, p), y = abs2_interval(b, p);
    if (x.hi < y.lo) return Cmp::less;
    if (y.hi < x.lo) return Cmp::greater;
  }
  return Cmp::unresolved;
}

// |a| against a nonnegative rational c
inline auto compare_abs(const Scalar &a, const Rational &c) -> Cmp {
  return compare_abs(a, Scalar(a.field(), c));
}

// index of the largest |v_i|; ties and unresolved comparisons go to the smaller index
inline auto argmax_abs(const std::vector<Scalar> &v) -> std::size_t {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (compare_abs(v[i], v[best]) == Cmp::greater) best = i;
  return best;
}

}  // namespace nfkit
