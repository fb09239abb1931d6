#pragma once
// Normalization engine: termwise steps, blockwise m -> 2m-1 steps, the
// distinguished transformation and a generic homological solver.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfkit/brunovf.hpp"
#include "nfkit/linalg.hpp"
#include "nfkit/substitute.hpp"

namespace nfkit {

struct NotInPartialNormalForm : Error {
  Exponent witness;
  explicit NotInPartialNormalForm(const Exponent &q)
      : Error("not in partial normal form: nonresonant term at " + q.str()), witness(q) {}
};

enum class Mode { termwise, blockwise, distinguished };

inline auto mode_name(Mode m) -> std::string {
  switch (m) {
    case Mode::termwise: return "termwise";
    case Mode::blockwise: return "blockwise";
    default: return "distinguished";
  }
}

inline auto parse_mode(const std::string &s) -> Mode {
  if (s == "termwise") return Mode::termwise;
  if (s == "blockwise") return Mode::blockwise;
  if (s == "distinguished") return Mode::distinguished;
  throw InvalidInput("unknown mode '" + s + "'");
}

struct StepRecord {
  int block = 0;  // m of the block step, 0 outside blockwise mode
  Exponent S;     // exponent treated
  Scalar delta;   // <S, lambda>
  Coeff h;        // h-term added (empty if S was resonant and kept)
};

struct NormalizationResult {
  BrunoField G;
  PointTransform H;
  std::vector<StepRecord> log;
  Mode mode = Mode::termwise;
  bool verified = false;
};

inline auto is_normal_up_to(const BrunoField &F, int k) -> std::optional<Exponent> {
  for (auto &[q, c] : F.terms()) {
    if (q.order() > k) break;
    if (!weight(q, F.lambda()).is_zero()) return q;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- termwise

struct TermStep {
  BrunoField F;
  std::optional<Exponent> S;  // term treated; none when nothing is left past the frontier
  std::optional<PointTransform> h;
};

// Treat the smallest stored term strictly after `frontier` (degree-lex).
inline auto term_step(const BrunoField &F, const std::optional<Exponent> &frontier) -> TermStep {
  const TermMap &T = F.terms();
  auto it = frontier ? T.upper_bound(*frontier) : T.begin();
  if (it == T.end()) return {F, std::nullopt, std::nullopt};
  const Exponent S = it->first;
  Scalar d = weight(S, F.lambda());
  if (d.is_zero()) return {F, S, std::nullopt};
  TermMap h(F.field(), F.dim());
  h.set(S, scaled(it->second, d.inv()));
  PointTransform H(std::move(h), F.trunc_order());
  return {substitute(F, H), S, H};
}

// ---------------------------------------------------------------- homological equation

// Solves delta h + Pr_top [G*, h] = Pr_top F*_delta on each eigenspace delta != 0
// by a generic sparse linear solve (no triangular structure assumed).
inline auto homological_solve(const TermMap &Gstar, const TermMap &Fstar, const std::vector<Scalar> &lambda, int m,
                              int top) -> TermMap {
  const int n = static_cast<int>(lambda.size());
  const Field *f = Fstar.field() != Field::rationals() ? Fstar.field() : Gstar.field();
  for (auto &[p, c] : Gstar)
    if (!weight(p, lambda).is_zero()) throw Error("homological_solve: G* has a nonresonant term at " + p.str());
  TermMap h(f, n);
  auto parts = eigen_split(order_slice(Fstar, m, top), lambda);
  for (auto &[delta, Fd] : parts) {
    if (delta.is_zero()) continue;
    // closure of the support under adding exponents of G*
    std::map<Exponent, int, DegLex> idx;
    std::vector<Exponent> todo;
    for (auto &[q, c] : Fd) todo.push_back(q);
    std::vector<Exponent> support;
    while (!todo.empty()) {
      Exponent q = todo.back();
      todo.pop_back();
      if (idx.count(q)) continue;
      idx.emplace(q, 0);
      for (auto &[p, c] : Gstar) {
        Exponent r = q + p;
        if (r.order() <= top && r.in_N() && r.sum() >= 1) todo.push_back(r);
      }
    }
    // unknowns: allowed components at each support exponent
    std::vector<std::pair<Exponent, int>> vars;
    std::map<std::pair<Exponent, int>, int, std::function<bool(const std::pair<Exponent, int> &,
                                                                const std::pair<Exponent, int> &)>>
        var_of([](const std::pair<Exponent, int> &a, const std::pair<Exponent, int> &b) {
          if (a.first == b.first) return a.second < b.second;
          return DegLex{}(a.first, b.first);
        });
    for (auto &[q, unused] : idx)
      for (int k = 0; k < n; ++k)
        if (q.allows_component(k)) {
          var_of.emplace(std::make_pair(q, k), static_cast<int>(vars.size()));
          vars.emplace_back(q, k);
        }
    std::vector<SparseSystem::Row> rows(vars.size());
    for (std::size_t v = 0; v < vars.size(); ++v) {
      auto &[q, k] = vars[v];
      rows[v][static_cast<int>(v)] += delta;
      TermMap unit(f, n);
      unit.add_component(q, k, Scalar(f, Rational(1)));
      for (auto &[r, c] : bracket(Gstar, unit, top))
        for (int j = 0; j < n; ++j) {
          if (c[j].is_zero()) continue;
          auto it = var_of.find({r, j});
          if (it == var_of.end()) throw Error("homological_solve: closure is not stable");
          auto &cell = rows[it->second][static_cast<int>(v)];
          cell += c[j];
        }
    }
    SparseSystem sys(static_cast<int>(vars.size()));
    for (std::size_t v = 0; v < vars.size(); ++v) {
      auto &[q, k] = vars[v];
      SparseSystem::Row r;
      for (auto &[col, val] : rows[v])
        if (!val.is_zero()) r.emplace(col, val);
      sys.add_row(std::move(r), Fd.get(q)[k]);
    }
    auto x = sys.solve(f);
    if (!x) throw Error("homological_solve: singular or inconsistent system at delta = " + delta.str());
    for (std::size_t v = 0; v < vars.size(); ++v) h.add_component(vars[v].first, vars[v].second, (*x)[v]);
  }
  return h;
}

// ---------------------------------------------------------------- blockwise

struct BlockStep {
  BrunoField F;
  PointTransform h;
  std::vector<StepRecord> log;
};

// F normal up to order m-1  ->  F' normal up to order min(2m-1, N), h of orders in [m, 2m-1].
inline auto block_step(const BrunoField &F, int m) -> BlockStep {
  if (m < 1) throw InvalidInput("block_step: m must be >= 1");
  const int N = F.trunc_order(), top = std::min(2 * m - 1, N);
  if (auto q = is_normal_up_to(F, m - 1)) throw NotInPartialNormalForm(*q);
  const auto &lambda = F.lambda();
  TermMap Gstar = project(F.terms(), m - 1);
  TermMap W = order_slice(F.terms(), m, top);
  TermMap h(F.field(), F.dim());
  std::vector<StepRecord> log;
  for (int d = m; d <= top; ++d) {
    TermMap hd(F.field(), F.dim());
    for (auto &[q, c] : W) {
      if (q.order() < d) continue;
      if (q.order() > d) break;
      Scalar delta = weight(q, lambda);
      if (delta.is_zero()) continue;
      Coeff hq = scaled(c, delta.inv());
      hd.set(q, hq);
      log.push_back({m, q, delta, hq});
    }
    if (hd.empty()) continue;
    // W <- W - delta h_d - Pr_top [G*, h_d]
    for (auto &[q, c] : hd) W.erase(q);
    if (!Gstar.empty()) W -= bracket(Gstar, hd, top);
    h += hd;
  }
  PointTransform H(std::move(h), N);
  BrunoField out = substitute(F, H);
  if (auto q = is_normal_up_to(out, top)) throw Error("block_step: term survived at " + q->str());
  return {std::move(out), std::move(H), std::move(log)};
}

// ---------------------------------------------------------------- distinguished

namespace detail {

inline auto at_order(const TermMap &t, int d) -> TermMap {
  TermMap r(t.field(), t.dim());
  for (auto &[q, c] : t)
    if (q.sum() == d) r.set(q, c);
  return r;
}

}  // namespace detail

// Unknowns per order d: nonresonant h_Q and resonant G_Q; resonant h_Q = 0.
inline auto solve_distinguished(const BrunoField &F, int N) -> NormalizationResult {
  if (N < 1 || N > F.trunc_order()) throw InvalidInput("order must be in 1..trunc_order");
  const int n = F.dim();
  const Field *f = F.field();
  BrunoField Fp = project(F, N);
  Fp = BrunoField(f, F.lambda(), Fp.terms(), N);
  PolyVec P = detail::to_polys(Fp.with_linear(), n, f);
  TermMap h(f, n), G(f, n);
  std::vector<StepRecord> log;
  G.add(Exponent::zero(n), F.lambda());
  for (int d = 1; d <= N; ++d) {
    const int D = d + 1;
    PolyVec rhs = detail::compose(P, detail::identity_plus(h, n, f), D, f);
    PolyVec g = detail::to_polys(G, n, f);
    PolyVec lhs = g;
    if (!h.empty()) {
      PolyVec add = detail::apply(detail::jacobian(detail::to_polys(h, n, f)), g, D);
      for (int k = 0; k < n; ++k) lhs[k] += add[k];
    }
    for (int k = 0; k < n; ++k) rhs[k] -= lhs[k];
    TermMap R = detail::at_order(detail::from_polys(rhs, n, f, d), d);
    for (auto &[q, c] : R) {
      Scalar delta = weight(q, F.lambda());
      if (delta.is_zero()) {
        G.set(q, c);
        log.push_back({0, q, delta, {}});
      } else {
        Coeff hq = scaled(c, delta.inv());
        h.set(q, hq);
        log.push_back({0, q, delta, hq});
      }
    }
  }
  G.erase(Exponent::zero(n));
  NormalizationResult res{BrunoField(f, F.lambda(), std::move(G), N), PointTransform(std::move(h), N), std::move(log),
                          Mode::distinguished, false};
  auto chk = verify_conjugation(Fp, res.H, res.G, N);
  if (!chk.pass) throw Error("distinguished solve failed verification at " + chk.witness->str());
  res.verified = true;
  return res;
}

// ---------------------------------------------------------------- driver

inline auto normalize(const BrunoField &F, int N, Mode mode) -> NormalizationResult {
  if (N < 1 || N > F.trunc_order()) throw InvalidInput("order must be in 1..trunc_order");
  if (mode == Mode::distinguished) return solve_distinguished(F, N);
  const Field *f = F.field();
  const int n = F.dim();
  BrunoField start(f, F.lambda(), project(F.terms(), N), N);
  BrunoField cur = start;
  PointTransform H = PointTransform::identity(f, n, N);
  std::vector<StepRecord> log;
  if (mode == Mode::termwise) {
    std::optional<Exponent> frontier;
    for (;;) {
      TermStep st = term_step(cur, frontier);
      if (!st.S) break;
      frontier = st.S;
      if (st.h) {
        log.push_back({0, *st.S, weight(*st.S, F.lambda()), st.h->terms().get(*st.S)});
        H = compose_transforms(H, *st.h);
        cur = std::move(st.F);
      }
    }
  } else {
    for (int m = 1; m <= N; m *= 2) {
      BlockStep st = block_step(cur, m);
      for (auto &r : st.log) log.push_back(r);
      if (!st.h.is_identity()) H = compose_transforms(H, st.h);
      cur = std::move(st.F);
    }
  }
  NormalizationResult res{std::move(cur), std::move(H), std::move(log), mode, false};
  if (auto q = is_normal_up_to(res.G, N)) throw Error("normalization left a nonresonant term at " + q->str());
  auto chk = verify_conjugation(start, res.H, res.G, N);
  if (!chk.pass) throw Error("normalization failed verification at " + chk.witness->str());
  res.verified = true;
  return res;
}

}  // namespace nfkit
