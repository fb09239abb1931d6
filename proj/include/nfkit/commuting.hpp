#pragma once
// Commuting families F^(k) = A^(k)x + ...: commutation checks, the simultaneous
// block step and normalizer, Condition AL and omega#.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfkit/conditions.hpp"

namespace nfkit {

struct NotACommutingFamily : Error {
  Exponent witness;
  int k, l;
  NotACommutingFamily(const Exponent &q, int k_, int l_)
      : Error("not a commuting family: compatibility fails at " + q.str() + " for members " + std::to_string(k_ + 1) +
              ", " + std::to_string(l_ + 1)),
        witness(q), k(k_), l(l_) {}
};

namespace detail {

inline auto lift(const TermMap &t, const Field *f) -> TermMap {
  TermMap r(f, t.dim());
  for (auto &[q, c] : t) {
    Coeff d;
    for (auto &x : c) d.push_back(x.in(f));
    r.set(q, d);
  }
  return r;
}

}  // namespace detail

class CommutingFamily {
 public:
  CommutingFamily() = default;
  explicit CommutingFamily(std::vector<BrunoField> members) {
    if (members.empty()) throw InvalidInput("a family needs at least one member");
    const int n = members[0].dim(), N = members[0].trunc_order();
    const Field *f = Field::rationals();
    for (auto &F : members) {
      if (F.dim() != n) throw DimensionMismatch();
      if (F.trunc_order() != N) throw InvalidInput("members must share the truncation order");
      if (F.field() == Field::rationals()) continue;
      if (f != Field::rationals() && f != F.field()) throw InvalidInput("members live over different fields");
      f = F.field();
    }
    for (auto &F : members) {
      std::vector<Scalar> l;
      for (auto &x : F.lambda()) l.push_back(x.in(f));
      m_.emplace_back(f, l, detail::lift(F.terms(), f), N);
    }
    if (rank(lambdas()) != size()) throw InvalidInput("the linear parts lambda^(k) are linearly dependent");
  }

  auto members() const -> const std::vector<BrunoField> & { return m_; }
  auto operator[](int k) const -> const BrunoField & { return m_[k]; }
  auto size() const -> int { return static_cast<int>(m_.size()); }
  auto dim() const -> int { return m_[0].dim(); }
  auto trunc_order() const -> int { return m_[0].trunc_order(); }
  auto field() const -> const Field * { return m_[0].field(); }
  auto lambdas() const -> std::vector<std::vector<Scalar>> {
    std::vector<std::vector<Scalar>> r;
    for (auto &F : m_) r.push_back(F.lambda());
    return r;
  }
  friend auto operator==(const CommutingFamily &a, const CommutingFamily &b) -> bool { return a.m_ == b.m_; }

 private:
  std::vector<BrunoField> m_;
};

// (<Q,lambda^(1)>, ..., <Q,lambda^(s)>)
inline auto joint_weight(const Exponent &q, const std::vector<std::vector<Scalar>> &L) -> std::vector<Scalar> {
  std::vector<Scalar> d;
  for (auto &l : L) d.push_back(weight(q, l));
  return d;
}

inline auto is_joint_resonant(const Exponent &q, const std::vector<std::vector<Scalar>> &L) -> bool {
  for (auto &l : L)
    if (!weight(q, l).is_zero()) return false;
  return true;
}

// first stored term, over all members, that is not jointly resonant
inline auto joint_normal_up_to(const CommutingFamily &fam, int k) -> std::optional<std::pair<Exponent, int>> {
  auto L = fam.lambdas();
  for (int j = 0; j < fam.size(); ++j)
    for (auto &[q, c] : fam[j].terms()) {
      if (q.order() > k) break;
      if (!is_joint_resonant(q, L)) return std::make_pair(q, j);
    }
  return std::nullopt;
}

// ---------------------------------------------------------------- commutation

struct CommuteReport {
  bool pass = true;
  int k = -1, l = -1;
  std::optional<Exponent> witness;
};

inline auto check_commute(const CommutingFamily &fam, int N) -> CommuteReport {
  CommuteReport out;
  N = std::min(N, fam.trunc_order());
  for (int k = 0; k < fam.size(); ++k)
    for (int l = k + 1; l < fam.size(); ++l) {
      TermMap b = bracket(fam[k].with_linear(), fam[l].with_linear(), N);
      if (!b.empty()) {
        out.pass = false;
        out.k = k;
        out.l = l;
        out.witness = b.begin()->first;
        return out;
      }
    }
  return out;
}

// ---------------------------------------------------------------- simultaneous step

struct JointStepRecord {
  int block = 0;
  Exponent S;
  int index = 0;              // member whose equation eliminated S
  std::vector<Scalar> delta;  // joint weight of S
  Coeff h;
};

struct JointBlockStep {
  CommutingFamily family;
  PointTransform h;
  std::vector<JointStepRecord> log;
};

// One shared h of orders [m, 2m-1]; each jointly nonresonant Q is removed through the
// member k with the largest |delta_k| (smallest k on ties).
inline auto simultaneous_block_step(const CommutingFamily &fam, int m) -> JointBlockStep {
  if (m < 1) throw InvalidInput("block step: m must be >= 1");
  const int s = fam.size(), n = fam.dim(), N = fam.trunc_order(), top = std::min(2 * m - 1, N);
  const Field *f = fam.field();
  if (auto bad = joint_normal_up_to(fam, m - 1)) throw NotInPartialNormalForm(bad->first);
  auto L = fam.lambdas();
  std::vector<TermMap> Gs, W;
  for (int k = 0; k < s; ++k) {
    Gs.push_back(project(fam[k].terms(), m - 1));
    W.push_back(order_slice(fam[k].terms(), m, top));
  }
  TermMap h(f, n);
  std::vector<JointStepRecord> log;
  for (int d = m; d <= top; ++d) {
    std::map<Exponent, int, DegLex> todo;
    for (int k = 0; k < s; ++k)
      for (auto &[q, c] : W[k])
        if (q.order() == d && !is_joint_resonant(q, L)) todo.emplace(q, 0);
    if (todo.empty()) continue;
    TermMap hd(f, n);
    for (auto &[q, unused] : todo) {
      auto delta = joint_weight(q, L);
      const int k = static_cast<int>(argmax_abs(delta));
      Coeff wk = W[k].get(q);
      for (int l = 0; l < s; ++l) {
        if (l == k) continue;
        Coeff wl = W[l].get(q);
        for (int i = 0; i < n; ++i)
          if (delta[k] * wl[i] != delta[l] * wk[i]) throw NotACommutingFamily(q, k, l);
      }
      if (is_zero(wk)) continue;
      Coeff hq = scaled(wk, delta[k].inv());
      hd.set(q, hq);
      log.push_back({m, q, k, delta, hq});
    }
    if (hd.empty()) continue;
    for (int k = 0; k < s; ++k) {
      for (auto &[q, c] : hd) W[k].erase(q);
      if (!Gs[k].empty()) W[k] -= bracket(Gs[k], hd, top);
    }
    h += hd;
  }
  PointTransform H(std::move(h), N);
  std::vector<BrunoField> out;
  for (auto &F : fam.members()) out.push_back(substitute(F, H));
  CommutingFamily res(std::move(out));
  if (auto bad = joint_normal_up_to(res, top)) throw Error("simultaneous block step: term survived at " + bad->first.str());
  return {std::move(res), std::move(H), std::move(log)};
}

struct JointNormalization {
  CommutingFamily family;
  PointTransform H;
  std::vector<JointStepRecord> log;
  bool verified = false;
};

inline auto simultaneous_normalize(const CommutingFamily &fam, int N) -> JointNormalization {
  if (N < 1 || N > fam.trunc_order()) throw InvalidInput("order must be in 1..trunc_order");
  std::vector<BrunoField> start;
  for (auto &F : fam.members()) start.emplace_back(F.field(), F.lambda(), project(F.terms(), N), N);
  CommutingFamily cur(start);
  PointTransform H = PointTransform::identity(fam.field(), fam.dim(), N);
  std::vector<JointStepRecord> log;
  for (int m = 1; m <= N; m *= 2) {
    auto st = simultaneous_block_step(cur, m);
    for (auto &r : st.log) log.push_back(r);
    if (!st.h.is_identity()) H = compose_transforms(H, st.h);
    cur = std::move(st.family);
  }
  JointNormalization res{std::move(cur), std::move(H), std::move(log), false};
  if (auto bad = joint_normal_up_to(res.family, N)) throw Error("normalization left a term at " + bad->first.str());
  for (int k = 0; k < fam.size(); ++k) {
    auto chk = verify_conjugation(start[k], res.H, res.family[k], N);
    if (!chk.pass) throw Error("member " + std::to_string(k + 1) + " failed verification at " + chk.witness->str());
  }
  res.verified = true;
  return res;
}

// ---------------------------------------------------------------- Condition AL

struct ALReport {
  bool holds = true;
  std::optional<Exponent> witness;
  int member = -1;
  // v[i][k] = sum_P v_{ik,P} x^P with G^(k)_P = sum_i v_{ik,P} lambda^(i)
  std::vector<std::vector<ScalarSeries>> v;
};

inline auto check_AL(const CommutingFamily &fam, int N) -> ALReport {
  const int s = fam.size(), n = fam.dim();
  const Field *f = fam.field();
  auto L = fam.lambdas();
  ScalarMatrix M(n, std::vector<Scalar>(s));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < s; ++j) M[i][j] = L[j][i];
  ALReport out;
  out.v.assign(s, std::vector<ScalarSeries>(s, ScalarSeries(f, n)));
  for (int k = 0; k < s; ++k)
    for (auto &[P, c] : fam[k].terms()) {
      if (P.order() > N) break;
      if (!is_joint_resonant(P, L)) throw InvalidInput("check_AL: member " + std::to_string(k + 1) + " has a jointly nonresonant term at " + P.str());
      auto b = solve_dense(M, c);
      if (!b) {
        out.holds = false;
        out.witness = P;
        out.member = k;
        return out;
      }
      for (int i = 0; i < s; ++i) out.v[i][k].add(P, (*b)[i]);
    }
  return out;
}

// ---------------------------------------------------------------- omega#

struct OmegaSharpEntry {
  int p = 0;
  Interval value;  // max_k omega_p(lambda^(k))
  int index = 0;   // a k attaining the maximum
  std::vector<Interval> per_member;
};

struct OmegaSharpSequence {
  std::vector<OmegaSharpEntry> entries;
  double partial_sum_upper = 0;
};

inline auto omega_sharp(const std::vector<std::vector<Scalar>> &L, int p_max) -> OmegaSharpSequence {
  std::vector<OmegaSequence> per;
  for (auto &l : L) per.push_back(omega_sequence(l, p_max));
  OmegaSharpSequence out;
  for (int p = 1; p <= p_max; ++p) {
    OmegaSharpEntry e;
    e.p = p;
    for (std::size_t k = 0; k < per.size(); ++k) {
      const Interval &v = per[k].entries[p - 1].value;
      e.per_member.push_back(v);
      if (k == 0 || v.lo > e.value.lo) {
        e.value.lo = v.lo;
        e.index = static_cast<int>(k);
      }
      if (k == 0 || v.hi > e.value.hi) e.value.hi = v.hi;
    }
    out.entries.push_back(e);
  }
  double s = 0;
  for (auto &e : out.entries) {
    double lo = to_double_down(e.value.lo);
    double term = lo > 0 ? -std::log(lo) : HUGE_VAL;
    if (term <= 0) continue;
    term = std::nextafter(term, HUGE_VAL) / std::ldexp(1.0, e.p);
    s = std::nextafter(s + term, HUGE_VAL);
  }
  out.partial_sum_upper = s;
  return out;
}

// ---------------------------------------------------------------- AL closed form

struct ALClosedForm {
  TermMap h;
  int index = 0;                // k used
  std::vector<Scalar> alpha;    // delta_i / delta_k
  bool alpha_bounded = true;    // |alpha_i| <= 1
  NilpotencyReport nilpotency;  // Delta^2_{G*^(k)}
};

// h_delta for the joint weight `delta` from member k's equation, via the span of
// the lambda^(i): delta_k h + [G*^(k), h] = Pr F^(k)_{*,delta}.
inline auto al_closed_form(const std::vector<TermMap> &Gstar, const std::vector<TermMap> &Fstar,
                           const std::vector<std::vector<Scalar>> &L, const std::vector<Scalar> &delta, int m, int top)
    -> ALClosedForm {
  const int s = static_cast<int>(L.size());
  if (static_cast<int>(Gstar.size()) != s || static_cast<int>(Fstar.size()) != s || static_cast<int>(delta.size()) != s)
    throw DimensionMismatch();
  ALClosedForm out;
  out.index = static_cast<int>(argmax_abs(delta));
  const int k = out.index;
  if (delta[k].is_zero()) throw InvalidInput("al_closed_form: joint weight is zero");
  for (int i = 0; i < s; ++i) {
    out.alpha.push_back(delta[i] * delta[k].inv());
    Cmp c = compare_abs(out.alpha.back(), Rational(1));
    if (c == Cmp::greater || c == Cmp::unresolved) out.alpha_bounded = false;
  }
  out.nilpotency = nilpotency_check(Gstar[k], top);
  TermMap Fd(Fstar[k].field(), Fstar[k].dim());
  for (auto &[q, c] : Fstar[k])
    if (joint_weight(q, L) == delta) Fd.set(q, c);
  std::vector<Scalar> e(s, Scalar(0));
  e[k] = Scalar(1);
  out.h = closed_form_homological(Gstar[k], Fd, L[k], Decomposition{L, e}, m, top);
  return out;
}

}  // namespace nfkit
