// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "nfkit/io.hpp"
#include "support.hpp"

using namespace nfkit;
using namespace support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  int failures = 0;
  std::string first;

  void expect(bool ok, const std::string &what) {
    if (ok) return;
    pass = false;
    if (failures++ == 0) first = what;
  }
};

auto linear_part(const BrunoField &F) -> TermMap {
  TermMap a(F.field(), F.dim());
  a.add(Exponent::zero(F.dim()), F.lambda());
  return a;
}

auto dump(const TermMap &t) -> std::string { return io::terms_json(t).dump(); }
auto dump(const BrunoField &F) -> std::string { return io::field_document(F).dump(); }

// ---------------------------------------------------------------- AC1, AC2, AC6

struct NormalizeRun {
  Outcome conj, normal, dist;
};

auto normalize_run() -> NormalizeRun {
  NormalizeRun out;
  Rng rng(2024);
  auto cases = standard_lambdas();
  int instances = 0, dist_checked = 0;
  for (int it = 0; it < 210; ++it) {
    auto &lc = cases[it % cases.size()];
    int n = static_cast<int>(lc.lambda.size());
    int N = n == 2 ? rng.uniform(3, 8) : rng.uniform(3, 5);
    auto F = random_field(rng, lc, N, n == 2 ? rng.uniform(3, 8) : rng.uniform(3, 6));
    for (Mode m : {Mode::termwise, Mode::blockwise, Mode::distinguished}) {
      auto r = normalize(F, N, m);
      std::string tag = lc.name + " N=" + std::to_string(N) + " " + mode_name(m);
      out.conj.expect(verify_conjugation(F, r.H, r.G, N).pass, tag);
      for (auto &[q, c] : r.G.terms())
        if (q.order() <= N) out.normal.expect(weight(q, lc.lambda).is_zero(), tag + " at " + q.str());
      if (m == Mode::distinguished) {
        for (auto &[q, c] : r.H.terms()) out.dist.expect(!weight(q, lc.lambda).is_zero(), tag + " resonant " + q.str());
        auto again = normalize(F, N, m);
        out.dist.expect(dump(again.G) == dump(r.G) && dump(again.H.terms()) == dump(r.H.terms()), tag + " rerun differs");
        ++dist_checked;
      }
    }
    ++instances;
  }
  out.conj.expect(instances >= 200, "too few instances");
  out.conj.detail = std::to_string(instances) + " instances x 3 modes";
  out.normal.detail = std::to_string(3 * instances) + " outputs";
  out.dist.detail = std::to_string(dist_checked) + " instances, re-run compared";
  return out;
}

// ---------------------------------------------------------------- AC3

auto lie_laws() -> Outcome {
  Outcome o;
  Rng rng(303);
  auto cases = standard_lambdas();
  int pairs = 0;
  for (int it = 0; it < 520; ++it, ++pairs) {
    auto &lc = cases[it % cases.size()];
    int n = static_cast<int>(lc.lambda.size());
    int N = rng.uniform(2, n == 2 ? 6 : 5);
    TermMap U = random_terms(rng, lc.field, n, 1, N, rng.uniform(1, 5));
    TermMap V = random_terms(rng, lc.field, n, 1, N, rng.uniform(1, 5));
    TermMap W = random_terms(rng, lc.field, n, 1, N, rng.uniform(1, 3));
    TermMap UV = bracket(U, V, N);
    o.expect(UV == bracket(V, U, N).scaled_by(-1), "antisymmetry " + lc.name);
    o.expect(UV == delta_apply(V, U, N) - delta_apply(U, V, N), "delta identity " + lc.name);
    TermMap jac = bracket(U, bracket(V, W, N), N) + bracket(V, bracket(W, U, N), N) + bracket(W, bracket(U, V, N), N);
    o.expect(jac.empty(), "jacobi " + lc.name);
  }
  int dense_cases = 0;
  for (int n = 1; n <= 3; ++n)
    for (int it = 0; it < 60; ++it, ++dense_cases) {
      int N = rng.uniform(1, 6);
      const Field *f = it % 3 == 0 ? Field::gaussian() : Field::rationals();
      TermMap U = random_terms(rng, f, n, 1, N, rng.uniform(1, 6));
      TermMap V = random_terms(rng, f, n, 1, N, rng.uniform(1, 6));
      if (it % 2) U.add(Exponent::zero(n), std::vector<Scalar>(n, Scalar(f, Rational(it))));
      auto got = dense::from_terms(bracket(U, V, N));
      auto want = dense::jacobian_bracket(dense::from_terms(U), dense::from_terms(V), N + 1);
      o.expect(dense::equal(got, want), "dense oracle n=" + std::to_string(n));
    }
  o.detail = std::to_string(pairs) + " pairs, " + std::to_string(dense_cases) + " dense comparisons";
  return o;
}

// ---------------------------------------------------------------- AC4

auto block_contract() -> Outcome {
  Outcome o;
  Rng rng(404);
  int count = 0;
  for (auto &lc : standard_lambdas()) {
    int n = static_cast<int>(lc.lambda.size());
    for (int m : {1, 2, 4})
      for (int it = 0; it < 7; ++it, ++count) {
        int N = n == 3 ? std::min(2 * m + 1, 6) : 2 * m + 2;
        TermMap t = m > 1 ? resonant_only(random_terms(rng, lc.field, n, 1, m - 1, 6), lc.lambda) : TermMap(lc.field, n);
        t += random_terms(rng, lc.field, n, m, N, 6);
        BrunoField F(lc.field, lc.lambda, t, N);
        auto b = block_step(F, m);
        const int top = std::min(2 * m - 1, N);
        std::string tag = lc.name + " m=" + std::to_string(m);
        for (auto &[q, c] : b.h.terms()) o.expect(q.order() >= m && q.order() <= top, tag + " h order " + q.str());
        o.expect(project(b.F.terms(), m - 1) == project(F.terms(), m - 1), tag + " low orders moved");
        o.expect(resonant_only(order_slice(b.F.terms(), m, top), lc.lambda) ==
                     resonant_only(order_slice(F.terms(), m, top), lc.lambda),
                 tag + " resonant block changed");
        o.expect(!is_normal_up_to(b.F, top).has_value(), tag + " not normal to 2m-1");
        o.expect(verify_conjugation(F, b.h, b.F, N).pass, tag + " conjugation");
      }
  }
  o.expect(count >= 100, "too few instances");
  o.detail = std::to_string(count) + " block steps";
  return o;
}

// ---------------------------------------------------------------- AC5

auto closed_form() -> Outcome {
  Outcome o;
  Rng rng(505);
  int count = 0;
  for (auto &c : as_cases()) {
    int n = static_cast<int>(c.lambda.size());
    for (int it = 0; it < 14; ++it) {
      int m = it % 2 == 0 ? 2 : 4, N = std::min(2 * m + 1, n == 2 ? 8 : 6);
      int top = std::min(2 * m - 1, N);
      TermMap Gs = as_terms(rng, c, 1, m - 1, 3);
      TermMap Fs = random_terms(rng, c.field, n, m, N, 6);
      if (!check_AS(Gs, c.lambda, c.D).span_holds) {
        o.expect(false, c.name + " generator left the span");
        continue;
      }
      o.expect(nilpotency_check(Gs, N).nilpotent, c.name + " Delta^2 != 0");
      o.expect(closed_form_homological(Gs, Fs, c.lambda, c.D, m, top) == homological_solve(Gs, Fs, c.lambda, m, top),
               c.name + " closed form differs");
      ++count;
    }
  }
  o.expect(count >= 50, "too few instances");
  o.detail = std::to_string(count) + " AS instances";
  return o;
}

// ---------------------------------------------------------------- AC7

auto siegel_pliss() -> Outcome {
  Outcome o;
  const Field *s2 = sqrt2_field();
  std::vector<Scalar> l{Scalar(s2, Rational(1)), gen(s2)};
  auto c = siegel_pliss_certificate(l);
  o.expect(c.nu == 1, "sqrt2 nu != 1");
  auto s = siegel_pliss_scan(l, c, 64);
  o.expect(s.pass, "sqrt2 scan failed");
  std::ostringstream d;
  d << "(1,sqrt2): nu=" << c.nu << " C=" << c.C.get_d() << " over " << s.checked << " exponents";
  for (const Field *f : {zeta3_field(), zeta6_field()}) {
    Scalar z = gen(f);
    std::vector<Scalar> lz = f == zeta3_field() ? std::vector<Scalar>{Scalar(f, Rational(1)), z, z * z}
                                                : std::vector<Scalar>{Scalar(f, Rational(1)), z * z, z * z * z * z};
    auto cz = siegel_pliss_certificate(lz);
    auto sz = siegel_pliss_scan(lz, cz, 64);
    o.expect(sz.pass, "cyclotomic scan failed");
    d << "; (1,z,z^2) deg-" << f->degree() << " field " << (f == zeta3_field() ? "zeta3" : "zeta6") << ": nu=" << cz.nu
      << " over " << sz.checked;
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- AC8

auto omega_oracle() -> Outcome {
  Outcome o;
  int compared = 0;
  for (auto &lc : standard_lambdas()) {
    auto om = omega_sequence(lc.lambda, 3);
    for (int k = 1; k <= 3; ++k, ++compared) {
      auto nb = naive::naive_omega(lc.lambda, k);
      auto &e = om.entries[k - 1];
      std::string tag = lc.name + " k=" + std::to_string(k);
      o.expect(e.resolved, tag + " unresolved");
      o.expect(e.value.lo.get_d() <= nb.value + 1e-12 && e.value.hi.get_d() >= nb.value - 1e-12, tag + " value");
      o.expect(e.argmin.to_vector() == nb.argmin, tag + " argmin");
    }
  }
  o.detail = std::to_string(compared) + " (lambda, k) pairs on 5 lambdas";
  return o;
}

// ---------------------------------------------------------------- AC9

auto hull() -> Outcome {
  Outcome o;
  const Field *f = sqrt2_field();
  Scalar t = gen(f), one(f, Rational(1)), zero(f);
  std::vector<Scalar> l1{one, -one, zero, zero}, l2{zero, zero, t, -t}, lam{one, -one, t, -t};
  Decomposition D{{l1, l2}, {Scalar(1), Scalar(1)}};
  auto r = check_hull(lam, D, 50, 30);
  std::ostringstream d;
  o.expect(r.status == HullStatus::violated && r.witness.has_value(), "Pell case not violated");
  if (r.witness) {
    o.expect(r.ratio.lo > 50, "ratio not above 50");
    Scalar w = weight(*r.witness, lam), w1 = weight(*r.witness, l1);
    o.expect(compare_abs(w1, w.scaled(50)) == Cmp::greater, "witness does not violate c = 50");
    d << "Pell witness " << r.witness->str() << " ratio >= " << r.ratio.lo.get_d();
  }
  // lambda, conj(lambda) independent
  const Field *G = Field::gaussian();
  Scalar i = Scalar::imag_unit(), g1(G, Rational(1));
  std::vector<std::vector<Scalar>> lams{{i, g1 + i * 2L, g1 * 3L - i}, {g1 + i, g1 - i * 2L}, {g1, i, -g1 - i * 3L, i * 2L}};
  int certified = 0;
  for (auto &l : lams) {
    std::vector<Scalar> re, im;
    for (auto &x : l) {
      re.push_back(Scalar(G, x.coeff(0)));
      im.push_back(Scalar(G, x.coeff(1)));
    }
    auto tl = check_hull(l, Decomposition{{re, im}, {Scalar(1), i}}, 1, 10);
    auto a2 = check_hull(l, a2_decomposition(l), 1, 10);
    o.expect(tl.status == HullStatus::certified_two_lines, "Re/Im not certified");
    o.expect(a2.status == HullStatus::certified_A2, "A2 not certified");
    certified += tl.certified() + a2.certified();
  }
  d << "; " << certified << " Re/Im and A2 decompositions certified";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- AC10

auto step_estimate() -> Outcome {
  Outcome o;
  Rng rng(1010);
  auto c = as_cases()[0];  // (1,-1): every divisor is an integer, omega_k = 1
  const auto &lam = c.lambda;
  const Rational rho = 1;
  int met = 0, tried = 0;
  while (met < 24 && tried < 400) {
    ++tried;
    int k = 1 + tried % 2, m = 1 << k, N = 2 * m + 1;
    TermMap t = as_terms(rng, c, 1, m - 1, 1, 16);
    t += random_terms(rng, c.field, 2, m, N, 3, 1).scaled_by(Scalar(Rational(1, 24)));
    BrunoField F(c.field, lam, t, N);
    auto rep = step_estimate_check(F, c.D, 1, rho, k);
    if (!rep.hypothesis_met) continue;
    ++met;
    std::string tag = "instance " + std::to_string(tried);
    o.expect(rep.per_delta_ok && rep.aggregate_ok, tag + " library bound failed");
    // recomputed with exact rationals: |a| is exact over Q
    const int top = std::min(2 * m - 1, N);
    TermMap Gs = project(t, m - 1), Fs = order_slice(t, m, N);
    TermMap h = closed_form_homological(Gs, Fs, lam, c.D, m, top);
    auto norm = [&](const TermMap &x) {
      Rational s = 0;
      for (auto &[q, v] : x)
        for (auto &a : v) s += abs(a.coeff(0));  // rho = 1
      return s;
    };
    Rational c1 = rep.beta / 2;  // r = 1, c = 1
    Rational hsum = 0;
    for (auto &[delta, hd] : eigen_split(h, lam)) {
      Rational dabs = abs(delta.coeff(0));
      Rational rhs = 2 / dabs * (2 + 2 * c1 / dabs) * norm(eigencomponent(order_slice(Fs, m, top), lam, delta));
      o.expect(norm(hd) <= rhs, tag + " per-delta bound");
      hsum += norm(hd);
    }
    Rational c2 = 2 * (2 * 1 + 2 * c1);  // omega_1 = omega_{k+1} = 1
    o.expect(hsum < c2, tag + " aggregate bound");
    o.expect(abs(rep.h_norm.hi - hsum) <= Rational(1, 1000000), tag + " library |h| disagrees");
  }
  o.expect(met >= 20, "only " + std::to_string(met) + " instances met the hypothesis");
  o.detail = std::to_string(met) + " instances meeting the hypothesis (" + std::to_string(tried) + " drawn)";
  return o;
}

// ---------------------------------------------------------------- AC11

auto commuting() -> Outcome {
  Outcome o;
  Rng rng(1111);
  int count = 0;
  for (auto &fc : family_cases())
    for (int it = 0; it < 26; ++it, ++count) {
      const int N = it % 2 ? 5 : 6;
      auto fam = random_family(rng, fc, N, 5);
      auto r = simultaneous_normalize(fam, N);
      std::string tag = fc.name + " #" + std::to_string(it);
      for (int k = 0; k < 2; ++k) {
        o.expect(verify_conjugation(fam[k], r.H, r.family[k], N).pass, tag + " conjugation");
        for (int l = 0; l < 2; ++l)
          o.expect(bracket(linear_part(r.family[l]), r.family[k].with_linear(), N).empty(), tag + " [A, G] != 0");
      }
      o.expect(check_commute(r.family, N).pass, tag + " members do not commute");
    }
  int single = 0;
  for (auto &lc : standard_lambdas())
    for (int it = 0; it < 4; ++it, ++single) {
      int N = lc.lambda.size() == 2 ? 6 : 4;
      auto F = random_field(rng, lc, N, 6);
      auto a = normalize(F, N, Mode::blockwise);
      auto b = simultaneous_normalize(CommutingFamily({F}), N);
      o.expect(dump(a.G) == dump(b.family[0]) && dump(a.H.terms()) == dump(b.H.terms()), lc.name + " s = 1 differs");
    }
  o.expect(count >= 50, "too few families");
  o.detail = std::to_string(count) + " families (s=2, n=3), " + std::to_string(single) + " single-member reductions";
  return o;
}

// ---------------------------------------------------------------- AC12

// integer vector orthogonal to the n-1 lattice rows
auto complement(const std::vector<std::vector<int>> &B, int n) -> std::vector<long> {
  if (n == 2) return {-static_cast<long>(B[0][1]), B[0][0]};
  auto &a = B[0], &b = B[1];
  return {static_cast<long>(a[1]) * b[2] - static_cast<long>(a[2]) * b[1],
          static_cast<long>(a[2]) * b[0] - static_cast<long>(a[0]) * b[2],
          static_cast<long>(a[0]) * b[1] - static_cast<long>(a[1]) * b[0]};
}

auto integrability() -> Outcome {
  Outcome o;
  Rng rng(1212);
  int cyc = 0, as = 0;
  for (int n : {3, 4, 6})
    for (int it = 0; it < 18; ++it, ++cyc) {
      auto G = cyclotomic_normal_form(rng, n, n == 6 ? 4 : 6, 4, it % 2 == 0);
      bool span = check_AS(G, cyclotomic_decomposition(G.lambda())).span_holds;
      bool psi = is_first_integral(G, std::vector<int>(n, 1), G.trunc_order()).holds;
      o.expect(span == psi, "n=" + std::to_string(n) + " span/integral disagree");
      as += span;
    }
  o.expect(as > 0 && as < cyc, "equivalence only exercised on one side");

  // d = n-1: terms orthogonal to every lattice vector, built from an integer complement
  const Field *Q = Field::rationals(), *Gf = Field::gaussian();
  Scalar i = Scalar::imag_unit();
  std::vector<std::pair<const Field *, std::vector<Scalar>>> full{
      {Q, {Scalar(1), Scalar(-1)}},
      {Gf, {i, -i}},
      {Q, {Scalar(1), Scalar(2), Scalar(-3)}},
      {Gf, {i, i * 2L, i * -3L}},
  };
  int dn1 = 0;
  for (auto &[f, lam] : full) {
    const int n = static_cast<int>(lam.size());
    auto L = lattice(lam);
    o.expect(L.rank == n - 1, "lattice rank");
    auto k = complement(L.basis, n);
    std::vector<Exponent> pool;
    for (auto &q : resonant_exponents(lam, n == 2 ? 5 : 4))
      if (q.order() >= 1 && q.nonnegative()) pool.push_back(q);
    for (int it = 0; it < 5; ++it, ++dn1) {
      TermMap t(f, n);
      for (int j = 0; j < 3; ++j) {
        Scalar a = rng.nonzero_scalar(f, 2);
        Coeff c;
        for (long x : k) c.push_back(a * x);
        t.add(pool[rng.uniform(0, static_cast<int>(pool.size()) - 1)], c);
      }
      BrunoField G(f, lam, t, n == 2 ? 5 : 4);
      auto rep = integrability_report(G, G.trunc_order());
      o.expect(rep.all_basis_integrals, "constructed integrals missing");
      for (auto &[P, c] : G.terms()) o.expect(rank({c, lam}) <= 1, "G_P outside K lambda at " + P.str());
      o.expect(rep.simplified_A_case && !rep.simplified_A_witness, "report disagrees");
    }
  }

  auto lc = cyclotomic_lambda(6);
  auto L6 = lattice(lc.lambda);
  std::vector<std::vector<int>> six{{1, -1, 1, 0, 0, 0}, {0, 1, -1, 1, 0, 0}, {0, 0, 1, -1, 1, 0},
                                    {0, 0, 0, 1, -1, 1}, {1, 0, 0, 0, 1, -1}, {-1, 1, 0, 0, 0, 1}};
  for (auto &m : six) o.expect(lattice_coordinates(L6, m).has_value(), "six-dim monomial outside the lattice");
  o.detail = std::to_string(cyc) + " cyclotomic forms (" + std::to_string(as) + " with the span), " +
             std::to_string(dn1) + " d=n-1 forms, 6 monomials in the n=6 lattice";
  return o;
}

// ---------------------------------------------------------------- AC13

auto run(const std::string &cmd) -> std::pair<int, std::string> {
  std::string out;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
  int st = pclose(p);
  return {st, out};
}

auto cli_determinism() -> Outcome {
  Outcome o;
  const std::string cli = NFKIT_CLI, dir = NFKIT_SAMPLES;
  std::vector<std::string> cmds{
      "normalize " + dir + "/lambda13.json --json",
      "normalize " + dir + "/saddle.json --mode distinguished --json",
      "check " + dir + "/sqrt2.json --as --omega 3 --siegel --json",
      "check " + dir + "/pell.json --hull 50 --json",
      "integrals " + dir + "/cyclic6.json --json",
      "commuting " + dir + "/family.json --json",
  };
  for (auto &c : cmds) {
    std::string first;
    for (int r = 0; r < 3; ++r) {
      auto [st, text] = run(cli + " " + c);
      if (st != 0) {
        o.expect(false, c + ": exit status " + std::to_string(st));
        break;
      }
      auto j = io::json::parse(text);
      o.expect(j.contains("timings"), c + ": no timings block");
      j.erase("timings");
      if (r == 0)
        first = j.dump();
      else
        o.expect(j.dump() == first, c + ": run " + std::to_string(r + 1) + " differs");
    }
  }
  o.detail = std::to_string(cmds.size()) + " commands x 3 runs";
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  NormalizeRun nr;
  bool nr_done = false;
  auto nrun = [&]() -> NormalizeRun & {
    if (!nr_done) nr = normalize_run(), nr_done = true;
    return nr;
  };
  criteria.emplace_back("conjugation oracle", [&] { return nrun().conj; });
  criteria.emplace_back("normal-form property", [&] { return nrun().normal; });
  criteria.emplace_back("Lie-calculus laws", lie_laws);
  criteria.emplace_back("blockwise contract", block_contract);
  criteria.emplace_back("closed-form homological solution", closed_form);
  criteria.emplace_back("distinguished transformation", [&] { return nrun().dist; });
  criteria.emplace_back("Siegel-Pliss certificates", siegel_pliss);
  criteria.emplace_back("omega brute force", omega_oracle);
  criteria.emplace_back("diophantine hull", hull);
  criteria.emplace_back("step estimate", step_estimate);
  criteria.emplace_back("commuting families", commuting);
  criteria.emplace_back("integrability equivalence", integrability);
  criteria.emplace_back("CLI determinism", cli_determinism);

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception &e) {
      o.pass = false;
      o.first = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << "AC" << k + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << ": " << o.detail;
    if (!o.pass) std::cout << " [" << o.failures << " failures, first: " << o.first << "]";
    std::cout << " (" << static_cast<int>(s * 1000) << " ms)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
