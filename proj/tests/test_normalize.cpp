#include <gtest/gtest.h>

#include "nfkit/normalize.hpp"
#include "nfkit/resonance.hpp"
#include "support.hpp"

using namespace nfkit;
using namespace support;

namespace {

auto ex(std::initializer_list<int> v) -> Exponent { return Exponent(v); }
auto Q() -> const Field * { return Field::rationals(); }

auto lam13_field(int N) -> BrunoField {
  return from_monomials(Q(), 2, N, {Scalar(1), Scalar(3)}, {{Scalar(1), {2, 0}, 1}});
}

// F = A + G* (resonant, orders < m) + random tail of orders [m, N]
auto partial_normal(Rng &rng, const LambdaCase &lc, int m, int N) -> BrunoField {
  int n = static_cast<int>(lc.lambda.size());
  TermMap t = m > 1 ? resonant_only(random_terms(rng, lc.field, n, 1, m - 1, 6), lc.lambda) : TermMap(lc.field, n);
  t += random_terms(rng, lc.field, n, m, N, 6);
  return BrunoField(lc.field, lc.lambda, t, N);
}

}  // namespace

TEST(Normalize, TermStepExamples) {
  auto F = from_monomials(Q(), 2, 3, {Scalar(1), Scalar(2)}, {{Scalar(1), {2, 0}, 1}});
  auto st = term_step(F, std::nullopt);
  EXPECT_EQ(*st.S, ex({2, -1}));
  EXPECT_FALSE(st.h.has_value());
  EXPECT_EQ(st.F, F);
  EXPECT_FALSE(term_step(F, st.S).S.has_value());

  auto F2 = lam13_field(4);
  auto st2 = term_step(F2, std::nullopt);
  ASSERT_TRUE(st2.h.has_value());
  EXPECT_EQ(st2.h->terms().get(ex({2, -1})), (Coeff{Scalar(0), Scalar(-1)}));
  EXPECT_TRUE(st2.F.is_linear());

  auto F3 = from_monomials(Q(), 2, 3, {Scalar(1), Scalar(-1)}, {{Scalar(1), {2, 1}, 0}});
  auto st3 = term_step(F3, std::nullopt);
  EXPECT_EQ(*st3.S, ex({1, 1}));
  EXPECT_EQ(st3.F, F3);
}

TEST(Normalize, TermStepLeavesEarlierTerms) {
  Rng rng(11);
  for (auto &lc : standard_lambdas()) {
    for (int it = 0; it < 5; ++it) {
      auto F = random_field(rng, lc, 4, 8);
      std::optional<Exponent> frontier;
      for (int s = 0; s < 6; ++s) {
        auto st = term_step(F, frontier);
        if (!st.S) break;
        for (auto &[q, c] : F.terms()) {
          if (!DegLex{}(q, *st.S)) break;
          EXPECT_EQ(st.F.terms().get(q), c);
        }
        if (st.h) {
          EXPECT_FALSE(st.F.terms().contains(*st.S));
        }
        frontier = st.S;
        F = st.F;
      }
    }
  }
}

TEST(Normalize, BlockStepExamples) {
  auto F = lam13_field(3);
  // Q = (2,-1) has order 1, so the m = 1 block removes it
  auto b1 = block_step(F, 1);
  EXPECT_TRUE(b1.F.is_linear());
  auto b2 = block_step(b1.F, 2);
  EXPECT_TRUE(b2.h.is_identity());
  auto tw = normalize(F, 3, Mode::termwise);
  EXPECT_EQ(tw.G, b2.F);
  EXPECT_EQ(tw.H, b1.h);

  auto lin = BrunoField(Q(), {Scalar(1), Scalar(3)}, 5);
  auto b = block_step(lin, 2);
  EXPECT_TRUE(b.h.is_identity());
  EXPECT_EQ(b.F, lin);

  auto bad = from_monomials(Q(), 2, 5, {Scalar(1), Scalar(3)}, {{Scalar(1), {1, 1}, 0}});
  try {
    block_step(bad, 2);
    FAIL();
  } catch (const NotInPartialNormalForm &e) {
    EXPECT_EQ(e.witness, ex({0, 1}));
  }
}

TEST(Normalize, BlockStepContract) {
  Rng rng(21);
  int count = 0;
  for (auto &lc : standard_lambdas()) {
    int n = static_cast<int>(lc.lambda.size());
    for (int m : {1, 2, 4}) {
      for (int it = 0; it < 5; ++it) {
        int N = n == 3 ? std::min(2 * m + 1, 6) : 2 * m + 2;
        auto F = partial_normal(rng, lc, m, N);
        auto b = block_step(F, m);
        const int top = std::min(2 * m - 1, N);
        for (auto &[q, c] : b.h.terms()) {
          EXPECT_GE(q.order(), m);
          EXPECT_LE(q.order(), top);
        }
        EXPECT_EQ(project(b.F.terms(), m - 1), project(F.terms(), m - 1));
        EXPECT_EQ(resonant_only(order_slice(b.F.terms(), m, top), lc.lambda),
                  resonant_only(order_slice(F.terms(), m, top), lc.lambda));
        EXPECT_FALSE(is_normal_up_to(b.F, top).has_value());
        EXPECT_TRUE(verify_conjugation(F, b.h, b.F, N).pass);
        // generic solver gives the same h, and h solves the homological equation
        TermMap Gs = project(F.terms(), m - 1);
        TermMap hs = homological_solve(Gs, order_slice(F.terms(), m, N), lc.lambda, m, top);
        EXPECT_EQ(hs, b.h.terms());
        for (auto &[delta, hd] : eigen_split(hs, lc.lambda)) {
          TermMap lhs = hd.scaled_by(delta) + bracket(Gs, hd, top);
          EXPECT_EQ(lhs, eigencomponent(order_slice(F.terms(), m, top), lc.lambda, delta));
        }
        ++count;
      }
    }
  }
  EXPECT_GE(count, 75);
}

TEST(Normalize, HomologicalTrivialCase) {
  auto F = from_monomials(Q(), 2, 3, {Scalar(1), Scalar(3)},
                          {{Scalar(2), {2, 0}, 1}, {Scalar(5), {0, 2}, 0}});
  TermMap h = homological_solve(TermMap(Q(), 2), F.terms(), F.lambda(), 1, 1);
  EXPECT_EQ(h.get(ex({2, -1})), (Coeff{Scalar(0), Scalar(-2)}));
  EXPECT_EQ(h.get(ex({-1, 2})), (Coeff{Scalar(Rational(1)), Scalar(0)}));
}

TEST(Normalize, DriverExamples) {
  auto lin = BrunoField(Q(), {Scalar(1), Scalar(2)}, 4);
  for (Mode m : {Mode::termwise, Mode::blockwise, Mode::distinguished}) {
    auto r = normalize(lin, 4, m);
    EXPECT_EQ(r.G, lin);
    EXPECT_TRUE(r.H.is_identity());
  }
  auto F = from_monomials(Q(), 2, 4, {Scalar(1), Scalar(2)},
                          {{Scalar(1), {0, 2}, 0}, {Scalar(3), {2, 0}, 1}});
  for (Mode m : {Mode::termwise, Mode::blockwise, Mode::distinguished}) {
    auto r = normalize(F, 4, m);
    EXPECT_FALSE(r.G.terms().contains(ex({-1, 2})));
    EXPECT_EQ(r.G.terms().get(ex({2, -1})), (Coeff{Scalar(0), Scalar(3)}));
    EXPECT_TRUE(r.verified);
  }
  auto d = solve_distinguished(lam13_field(4), 4);
  EXPECT_TRUE(d.G.is_linear());
  EXPECT_EQ(d.H.terms().size(), 1u);
  EXPECT_EQ(d.H.terms().get(ex({2, -1})), (Coeff{Scalar(0), Scalar(-1)}));
}

TEST(Normalize, CrossModeRandom) {
  Rng rng(33);
  for (auto &lc : standard_lambdas()) {
    int n = static_cast<int>(lc.lambda.size());
    for (int it = 0; it < 4; ++it) {
      int N = n == 3 ? 4 : 6;
      auto F = random_field(rng, lc, N, n == 3 ? 6 : 8);
      std::vector<NormalizationResult> rs;
      for (Mode m : {Mode::termwise, Mode::blockwise, Mode::distinguished}) rs.push_back(normalize(F, N, m));
      for (auto &r : rs) {
        EXPECT_TRUE(verify_conjugation(F, r.H, r.G, N).pass);
        for (auto &[q, c] : r.G.terms()) EXPECT_TRUE(weight(q, lc.lambda).is_zero());
      }
      for (auto &[q, c] : rs[2].H.terms()) EXPECT_FALSE(weight(q, lc.lambda).is_zero()) << lc.name;
      // resonant terms of lowest order agree across modes
      int lo = F.terms().empty() ? 1 : F.terms().begin()->first.order();
      for (auto &r : rs) EXPECT_EQ(project(r.G.terms(), lo), project(rs[0].G.terms(), lo));
    }
  }
}

TEST(Normalize, DistinguishedDeterministic) {
  Rng rng(5);
  auto lc = standard_lambdas()[4];
  auto F = random_field(rng, lc, 4, 8);
  auto a = solve_distinguished(F, 4), b = solve_distinguished(F, 4);
  EXPECT_EQ(a.G, b.G);
  EXPECT_EQ(a.H, b.H);
}
