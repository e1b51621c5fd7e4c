#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "goursat/families.hpp"

using namespace goursat;

namespace {

FamilySpec first_example(int n = 4) {
  return FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + a^2/2", "a*(x3+x4) - a^2", n, 0.0);
}
FamilySpec second_example() {
  return FamilySpec::from_text(FamilyKind::Second, "a*(x1+x2) + s^2/2", "a + x3 + x4 + x5", 5, 0.0);
}

}  // namespace

TEST(Constraint, Examples) {
  EXPECT_DOUBLE_EQ(constraint(first_example(), Point{1, 1, 1, 1}, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(constraint(first_example(), Point{1, 1, 1, 1}, 0.0), 4.0);
  // G = (x1 + x2) + psi
  const Point p{0.5, 1.5, 0.2, 0.3, 0.4};
  for (double a : {-2.0, 0.0, 1.5}) EXPECT_NEAR(constraint(second_example(), p, a), 2.0 + a + 0.9, 1e-14);
}

TEST(SolveParameter, Examples) {
  const NewtonResult r1 = solve_parameter(first_example(), Point{1, 1, 1, 1});
  EXPECT_NEAR(r1.a, 4.0, 1e-12);
  EXPECT_LE(r1.iterations, 8);
  const NewtonResult r2 = solve_parameter(second_example(), Point{1, 1, 1, 1, 1});
  EXPECT_NEAR(r2.a, -5.0, 1e-12);
  EXPECT_LE(r2.iterations, 8);

  const FamilySpec linear = FamilySpec::from_text(FamilyKind::First, "a*x1 + x2", "a*x3 + x4", 4, 0.0);
  EXPECT_THROW(solve_parameter(linear, Point{1, 1, 1, 1}), SingularEnvelope);
}

TEST(SolveParameter, NoConvergenceWithoutRoot) {
  const FamilySpec none = FamilySpec::from_text(FamilyKind::First, "a^3/3 + a + x1 + x2", "x3 + x4 + a*0", 4, 3.0);
  EXPECT_THROW(solve_parameter(none, Point{1, 1, 1, 1}), Error);
}

TEST(FamilySpec, DependencyPatternEnforced) {
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::First, "a*x3 + a^2", "a*x4", 4, 0.0), ContractError);
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::First, "a*x1 + a^2", "a*x2", 4, 0.0), ContractError);
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::Second, "a*x1 + s^2 + x5", "a + x3", 5, 0.0), ContractError);
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::Second, "a*x1 + s^2", "a + x1", 5, 0.0), ContractError);
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::First, "a*x1", "a*x3", 3, 0.0), ContractError);
  EXPECT_THROW(FamilySpec::from_text(FamilyKind::Second, "a*x1 + s", "a + x3", 4, 0.0), ContractError);
  // shared variables are allowed on both sides
  EXPECT_NO_THROW(FamilySpec::from_text(FamilyKind::First, "a*(x1 + x5) + a^2", "a*(x3 + x5)", 5, 0.0));
  EXPECT_NO_THROW(FamilySpec::from_text(FamilyKind::Second, "a*(x1 + x6) + s^2", "a + x5 + x6", 6, 0.0));
}

TEST(FamilyWeb, FirstKindClosedForm) {
  // F = s^2/2 with s = x1 + x2 + x3 + x4
  const WebFunction f = family_web(first_example());
  gtest_support::Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> x(4);
    for (double& v : x) v = gtest_support::uniform(rng, 0.2, 2.0);
    const Jet j = f.jet(Point(x), 3);
    const double s = x[0] + x[1] + x[2] + x[3];
    EXPECT_NEAR(j.value(), s * s / 2, 1e-10);
    for (int a = 0; a < 4; ++a) {
      EXPECT_NEAR(j.derivative({a}), s, 1e-10);
      for (int b = 0; b < 4; ++b) {
        EXPECT_NEAR(j.derivative({a, b}), 1.0, 1e-10);
        for (int c = 0; c < 4; ++c) EXPECT_NEAR(j.derivative({a, b, c}), 0.0, 1e-10);
      }
    }
  }
}

TEST(FamilyWeb, SecondKindClosedForm) {
  // F = -u^2/2 - u v, u = x1 + x2, v = x3 + x4 + x5
  const WebFunction f = family_web(second_example());
  gtest_support::Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> x(5);
    for (double& v : x) v = gtest_support::uniform(rng, 0.2, 2.0);
    const Jet j = f.jet(Point(x), 2);
    const double u = x[0] + x[1], v = x[2] + x[3] + x[4];
    EXPECT_NEAR(j.value(), -u * u / 2 - u * v, 1e-10);
    for (int a = 0; a < 5; ++a) {
      EXPECT_NEAR(j.derivative({a}), a < 2 ? -u - v : -u, 1e-10);
      for (int b = 0; b < 5; ++b) {
        const double want = (a < 2 && b < 2) ? -1.0 : (a < 2 || b < 2) ? -1.0 : 0.0;
        EXPECT_NEAR(j.derivative({a, b}), want, 1e-10);
      }
    }
  }
}

TEST(FamilyWeb, EnvelopeProperty) {
  gtest_support::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const FamilySpec spec =
        trial % 2 == 0 ? gtest_support::random_first_kind(rng, 5) : gtest_support::random_second_kind(rng, 5);
    const WebFunction f = family_web(spec);
    std::vector<double> x(5);
    for (double& v : x) v = gtest_support::uniform(rng, 0.5, 1.5);
    const Point p(x);
    const double a = solve_parameter(spec, p).a;
    const Jet j = f.jet(p, 1);
    // explicit gradient at frozen a
    std::vector<Symbol> active;
    for (int i = 1; i <= 5; ++i) active.push_back(Symbol::variable(i));
    Jet frozen(5, 1);
    if (spec.kind() == FamilyKind::First) {
      const std::vector<double> pa{a};
      frozen = eval_jet(spec.phi(), x, pa, active, 1) + eval_jet(spec.psi(), x, pa, active, 1);
    } else {
      const std::vector<double> pa{a};
      const Jet psi = eval_jet(spec.psi(), x, pa, active, 1);
      const std::vector<double> pp = spec.phi_params(a, psi.value());
      std::vector<Symbol> with_slot = active;
      with_slot.push_back(spec.phi_slot_symbol());
      const Jet phi = eval_jet(spec.phi(), x, pp, with_slot, 1);
      for (int i = 0; i < 5; ++i)
        frozen.coefficients()[static_cast<std::size_t>(i + 1)] =
            phi.derivative({i}) + phi.derivative({5}) * psi.derivative({i});
    }
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(j.derivative({i}), frozen.derivative({i}), 1e-10);
  }
}

TEST(FamilyWeb, JetsMatchFiniteDifferencesOfValue) {
  gtest_support::Rng rng(12);
  const FamilySpec spec = gtest_support::random_second_kind(rng, 6);
  const WebFunction f = family_web(spec);
  const Point p{0.8, 1.1, 0.9, 1.2, 0.7, 1.0};
  const Jet j = f.jet(p, 3);
  const double h = 1e-4;
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      auto val = [&](double da, double db) {
        std::vector<double> x = p.vector();
        x[static_cast<std::size_t>(a)] += da;
        x[static_cast<std::size_t>(b)] += db;
        return f.jet(Point(x), 0).value();
      };
      const double fd = (val(h, h) - val(h, -h) - val(-h, h) + val(-h, -h)) / (4 * h * h);
      EXPECT_NEAR(j.derivative({a, b}), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
}
