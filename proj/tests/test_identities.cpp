#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "generators.hpp"
#include "goursat/classify.hpp"
#include "goursat/families.hpp"
#include "goursat/identities.hpp"

using namespace goursat;

namespace {

// d with a_pqh shifted by -a_pq w_h, i.e. the same web seen under gauge w.
PfaffianDerivs regauge(const TorsionTensor& t, const PfaffianDerivs& d0, const Gauge& w) {
  const int n = t.arity();
  PfaffianDerivs d(n, w);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = 1; c <= n; ++c) d.set(a, b, c, d0(a, b, c) - t(a, b) * w[c]);
  return d;
}

Gauge random_gauge(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& v : w) v = u(rng);
  return Gauge{w};
}

TorsionSample constrained(std::mt19937_64& rng) {
  for (;;) {
    TorsionSample s = sample_torsion(rng, true);
    if (s.ok) return s;
  }
}

}  // namespace

TEST(ABC, Examples) {
  TorsionTensor t(5);
  for (int q = 3; q <= 5; ++q) {
    t.set(1, q, 0.3 * q);
    t.set(2, q, 0.6 * q);
  }
  const ABC z = abc(t);
  EXPECT_EQ(z.A, 0.0);
  EXPECT_EQ(z.B, 0.0);
  EXPECT_EQ(z.C, 0.0);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) EXPECT_LE(abc(constrained(rng).t).sum.relative(), 1e-12);

  const WebFunction f = WebFunction::from_expr(parse("x1*x3 + x2*x4 + x1*x4 + x5^2/2", 5));
  const ABC g = abc(torsion(f, Point{1, 1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(g.A, 0.25);
  EXPECT_EQ(g.B, 0.0);
  EXPECT_EQ(g.C, 0.0);
  EXPECT_THROW(abc(TorsionTensor(4)), ContractError);
}

TEST(Lemma1, ZeroInputs) {
  for (const Residual& r : lemma1_residuals(TorsionTensor(4), PfaffianDerivs(4))) EXPECT_EQ(r.value, 0.0);
}

TEST(Lemma1, HoldsOnFirstKindWebsInAnyGauge) {
  gtest_support::Rng rng(41);
  std::mt19937_64 grng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 4 + trial % 3;
    const WebFunction f = family_web(gtest_support::random_first_kind(rng, n));
    for (const Point& p : sample_regular_points(f, Box::uniform(n, 0.5, 1.5), 4, 17, 3).points) {
      const TorsionTensor t = torsion(f, p);
      const auto r0 = lemma1_residuals(t, pfaffian_derivs(f, p, Gauge::zero(n)));
      const auto rg = lemma1_residuals(t, pfaffian_derivs(f, p, random_gauge(grng, n)));
      for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_LE(r0[c].relative(), 1e-7);
        EXPECT_LE(rg[c].relative(), 1e-7);
        EXPECT_LE(std::abs(r0[c].value - rg[c].value), 1e-9 * std::max(1.0, rg[c].scale));
      }
    }
  }
}

TEST(Lemma2, ConstrainedVersusFree) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const TorsionTensor t = constrained(rng).t;
    const auto entries = lemma2_residuals(t);
    ASSERT_EQ(entries.size(), 12u);
    for (const Lemma2Entry& e : entries) {
      EXPECT_LE(e.quadratic.relative(), 1e-10);
      EXPECT_LE(e.cubic.relative(), 1e-10);
    }
  }
  int violated = 0;
  for (int k = 0; k < 100; ++k) {
    const TorsionTensor t = sample_torsion(rng, false).t;
    double worst = 0.0;
    for (const Lemma2Entry& e : lemma2_residuals(t)) worst = std::max(worst, e.quadratic.relative());
    if (worst > 1e-3) ++violated;
  }
  EXPECT_GE(violated, 95);
}

TEST(Conditions, ZeroInputs) {
  const ConditionValues v = condition_values(TorsionTensor(5), PfaffianDerivs(5));
  for (const Residual& r : v.m) EXPECT_EQ(r.value, 0.0);
  for (const Residual& r : v.n) EXPECT_EQ(r.value, 0.0);
  for (const Residual& r : v.uv) EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(v.residual40.value, 0.0);
  EXPECT_EQ(v.m.size(), 5u);
}

TEST(Conditions, Residual40IsDifferenceOfN1N2) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const TorsionTensor t = sample_torsion(rng, false).t;
    const ConditionValues v = condition_values(t, sample_derivs(rng, 5, Gauge::zero(5)));
    const double diff = v.n[0].value - v.n[1].value;
    EXPECT_NEAR(v.residual40.value, diff, 1e-13 * std::max({1.0, v.n[0].scale, v.n[1].scale}));
  }
}

TEST(Conditions, GaugeInvariantOnConstrainedTorsion) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 500; ++k) {
    const TorsionTensor t = constrained(rng).t;
    const PfaffianDerivs d0 = sample_derivs(rng, 5, Gauge::zero(5));
    const Gauge w = random_gauge(rng, 5);
    const ConditionValues a = condition_values(t, d0), b = condition_values(t, regauge(t, d0, w));
    for (std::size_t i = 0; i < 3; ++i) {
      const double tol = 1e-12 * std::max({1.0, a.n[i].scale, b.n[i].scale, a.s[i].scale, b.s[i].scale});
      EXPECT_NEAR(a.n[i].value, b.n[i].value, tol);
      EXPECT_NEAR(a.r[i].value, b.r[i].value, 1e-12 * std::max({1.0, a.r[i].scale, b.r[i].scale}));
      EXPECT_NEAR(a.s[i].value, b.s[i].value, tol);
    }
  }
}

TEST(Conditions, GaugeSlopes) {
  // m_h moves by -expr26 w_h; u_k by -w_k (2 a13 a23 - a13 a24 - a14 a23)
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const TorsionTensor t = sample_torsion(rng, false).t;
    const PfaffianDerivs d0 = sample_derivs(rng, 5, Gauge::zero(5));
    const Gauge w = random_gauge(rng, 5);
    const ConditionValues a = condition_values(t, d0), b = condition_values(t, regauge(t, d0, w));
    const double e26 = second_kind_residuals(t).expr26;
    for (int h = 1; h <= 5; ++h) {
      const auto i = static_cast<std::size_t>(h - 1);
      EXPECT_NEAR(b.m[i].value - a.m[i].value, -e26 * w[h], 1e-12 * std::max({1.0, a.m[i].scale, b.m[i].scale}));
    }
    const double slope = 2 * t(1, 3) * t(2, 3) - t(1, 3) * t(2, 4) - t(1, 4) * t(2, 3);
    EXPECT_NEAR(b.uv[0].value - a.uv[0].value, -slope * w[4], 1e-12 * std::max({1.0, a.uv[0].scale, b.uv[0].scale}));
  }
}

TEST(Conditions, RowMatchesExpansion) {
  std::mt19937_64 rng(6);
  const TorsionTensor t = constrained(rng).t;
  const PfaffianDerivs d = sample_derivs(rng, 5, Gauge::zero(5));
  const double a34 = t(3, 4), a35 = t(3, 5), a45 = t(4, 5);
  const ABC k = abc(t);
  const std::array<double, 3> rhs{k.C * a34 + k.A * a35, k.B * a34 + k.A * a45, k.B * a35 + k.C * a45};
  for (int h = 3; h <= 5; ++h) {
    const ConditionRow row = condition_row(ConditionKind::M, t, h);
    EXPECT_NEAR(row.rhs(), rhs[static_cast<std::size_t>(h - 3)], 1e-13);
    double lhs = 0.0;
    const auto x = deriv_vector(d, h);
    for (std::size_t i = 0; i < 6; ++i) lhs += row.coef(i) * x[i];
    EXPECT_NEAR(evaluate_row(row, x).value, lhs - row.rhs(), 1e-12);
  }
  const double a13 = t(1, 3), a14 = t(1, 4), a15 = t(1, 5);
  EXPECT_NEAR(condition_row(ConditionKind::N, t, 3).rhs(), a13 * ((a15 - a13) * a34 + (a13 - a14) * a35), 1e-13);
  EXPECT_EQ(condition_row(ConditionKind::R, t, 1).rhs(), 0.0);
}

TEST(Remark, AnyTwoImplyTheThird) {
  const IdentityReport r = remark_implication_test(200, 7);
  EXPECT_TRUE(r.passed) << r.worst;
  EXPECT_EQ(r.max_relative.size(), 9u);
  EXPECT_LE(r.worst, 1e-8);
  const IdentityReport again = remark_implication_test(200, 7);
  EXPECT_EQ(again.worst, r.worst);
  EXPECT_THROW(remark_implication_test(0, 1), ContractError);
}

TEST(Witness, SConditionsDoNotForceUV) {
  const WitnessResult w = witness_s_not_uv(100, 1);
  ASSERT_TRUE(w.found);
  EXPECT_LE(w.s_residual, 1e-10);
  EXPECT_GT(w.uv_residual, 1e-2);
}
