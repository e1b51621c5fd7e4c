#ifndef GOURSAT_SELFTEST_HPP
#define GOURSAT_SELFTEST_HPP

// Bundled example corpus: small checks with known answers, run by
// `goursat-kit selftest`.

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "goursat/classify.hpp"
#include "goursat/exterior.hpp"
#include "goursat/families.hpp"
#include "goursat/identities.hpp"
#include "goursat/run.hpp"

namespace goursat {

struct SelfCheck {
  std::string name;
  double expected = 0.0;
  double tol = 0.0;
  std::function<double()> compute;
};

struct BundledSpec {
  std::string name;
  FamilySpec spec;  // a0 lies within 10% of the root at `point`
  Point point;
};

/// Family specs used for the Newton iteration-count check.
inline std::vector<BundledSpec> bundled_specs() {
  const Point ones4{1, 1, 1, 1}, ones5{1, 1, 1, 1, 1};
  return {
      {"first_quadratic", FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + a^2/2", "a*(x3+x4) - a^2", 4, 3.7),
       ones4},
      {"second_linear", FamilySpec::from_text(FamilyKind::Second, "a*(x1+x2) + s^2/2", "a + x3 + x4 + x5", 5, -4.6),
       ones5},
      // root of 4 + e^a - a^2 near -2.03
      {"first_exp", FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + exp(a)", "a*(x3+x4) - a^3/3", 4, -2.2),
       ones4},
      // root of a^2 + 7a + 11 at (-7 + sqrt 5)/2
      {"second_cubic",
       FamilySpec::from_text(FamilyKind::Second, "a*(x1+x2) + a^2/2 + s^3/3", "a + x3 + x4 + x5", 5, -2.5), ones5},
  };
}

/// Spec whose constraint does not depend on a.
inline FamilySpec degenerate_spec() {
  return FamilySpec::from_text(FamilyKind::First, "a*x1 + x2", "a*x3 + x4", 4, 0.0);
}

namespace selftest_detail {

template <class E, class F>
double throws(F&& f) {
  try {
    f();
  } catch (const E&) {
    return 1.0;
  } catch (...) {
    return 0.0;
  }
  return 0.0;
}

inline WebFunction web(const std::string& text, int n) { return WebFunction::from_expr(parse(text, n)); }

inline Jet jet_of(const std::string& text, int n, std::vector<double> x, int order) {
  return eval_jet(parse(text, n), x, std::span<const double>{}, order);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline FamilySpec first_example() {
  return FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + a^2/2", "a*(x3+x4) - a^2", 4, 0.0);
}
// n = 5 variant; the x5 term keeps F5 away from zero
inline FamilySpec first_example5() {
  return FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + a^2/2 + x5^2/2", "a*(x3+x4) - a^2", 5, 0.0);
}
inline FamilySpec second_example() {
  return FamilySpec::from_text(FamilyKind::Second, "a*(x1+x2) + s^2/2", "a + x3 + x4 + x5", 5, 0.0);
}

// Largest deviation of F, grad F, Hess F from a closed form at 10 points.
inline double closed_form_error(const WebFunction& f, const std::function<void(const std::vector<double>&, double&,
                                                                                std::vector<double>&,
                                                                                std::vector<double>&)>& exact) {
  const int n = f.arity();
  HaltonSampler s(Box::uniform(n, 0.2, 2.0), 5);
  double err = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Point p = s.next();
    const Jet j = f.jet(p, 2);
    double v = 0.0;
    std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n * n));
    exact(p.vector(), v, g, h);
    err = std::max(err, std::abs(j.value() - v));
    for (int a = 0; a < n; ++a) {
      err = std::max(err, std::abs(j.derivative({a}) - g[static_cast<std::size_t>(a)]));
      for (int b = 0; b < n; ++b)
        err = std::max(err, std::abs(j.derivative({a, b}) - h[static_cast<std::size_t>(a * n + b)]));
    }
  }
  return err;
}

inline double kernel_dim(const WebFunction& f, SystemTag tag, const Point& p) {
  return rank_at(make_system(f, tag), p).kernel_dim;
}

inline RunConfig example_config(const std::string& text) { return parse_config(text, "selftest"); }

}  // namespace selftest_detail

/// The bundled corpus.
inline std::vector<SelfCheck> selftest_corpus() {
  using namespace selftest_detail;
  const Point ones4{1, 1, 1, 1}, ones5{1, 1, 1, 1, 1};
  const double e = std::numbers::e;
  std::vector<SelfCheck> c;

  // expr
  c.push_back({"expr.parse_product_sum", 1, 0, [] {
                 const Expr x = parse("x1*x3 + x2*x4", 4);
                 return double(x.arity() == 4 && x.root().op == Op::Add && x.root().lhs->op == Op::Mul);
               }});
  c.push_back({"expr.parse_error_offset", 4, 0, [] {
                 try {
                   parse("x1 +", 4);
                 } catch (const ParseError& err) {
                   return double(err.offset());
                 }
                 return -1.0;
               }});
  c.push_back({"expr.parse_parameter", 1, 0,
               [] { return double(parse("a*(x1+x2) + a^2/2", 2, {"a"}).params_used().count("a")); }});
  c.push_back({"expr.eval_product", 10, 0, [] { return parse("x1*x3", 3).evaluate(std::vector<double>{2, 0, 5}); }});
  c.push_back({"expr.eval_ln_zero_domain", 1, 0,
               [] { return throws<DomainError>([] { parse("ln(x1)", 1).evaluate(std::vector<double>{0.0}); }); }});
  c.push_back({"expr.eval_parameter", 20, 1e-15, [] {
                 return parse("a*(x1+x2)+a^2/2", 2, {"a"}).evaluate(std::vector<double>{1, 2}, {{"a", 4.0}});
               }});

  // jets
  c.push_back({"jets.seed_gradient", 1, 0, [] {
                 const Jet j = Jet::seed(0, 3.0, 2, 2);
                 return double(j.value() == 3 && j.derivative({0}) == 1 && j.derivative({1}) == 0 &&
                               j.derivative({0, 0}) == 0);
               }});
  c.push_back({"jets.seed_out_of_range", 1, 0, [] { return throws<ContractError>([] { Jet::seed(2, 0.0, 2, 2); }); }});
  c.push_back({"jets.square_second_derivative", 2, 1e-15, [] {
                 const Jet x = Jet::seed(0, 3.0, 1, 2);
                 return combine(BinaryOp::Mul, x, x).derivative({0, 0});
               }});
  c.push_back({"jets.reciprocal_third_derivative", -0.375, 1e-15, [] {
                 return combine(BinaryOp::Div, Jet::constant(1.0, 1, 3), Jet::seed(0, 2.0, 1, 3)).derivative({0, 0, 0});
               }});
  c.push_back({"jets.order_mismatch", 1, 0, [] {
                 return throws<ContractError>(
                     [] { combine(BinaryOp::Add, Jet::seed(0, 1.0, 1, 1), Jet::seed(0, 1.0, 1, 2)); });
               }});
  c.push_back({"jets.exp_third_derivative", 1, 1e-15,
               [] { return apply_unary(UnaryFn::Exp, Jet::seed(0, 0.0, 1, 3)).derivative({0, 0, 0}); }});
  c.push_back({"jets.ln_second_derivative", -1, 1e-15,
               [] { return apply_unary(UnaryFn::Ln, Jet::seed(0, 1.0, 1, 2)).derivative({0, 0}); }});
  c.push_back({"jets.sqrt_domain", 1, 0, [] {
                 return throws<DomainError>([] { apply_unary(UnaryFn::Sqrt, Jet::seed(0, -1.0, 1, 1)); });
               }});
  c.push_back({"jets.bilinear_mixed", 1, 0, [] {
                 const std::vector<double> x{1, 2, 3, 4};
                 const std::vector<Symbol> active{Symbol::variable(1), Symbol::variable(3)};
                 const Jet j = eval_jet(parse("(x1+x2)*(x3+x4)", 4), x, {}, active, 2);
                 return j.value() == 21 ? j.derivative({0, 1}) : -1.0;
               }});
  c.push_back({"jets.cube_third_derivative", 6, 1e-14, [] { return jet_of("x1^3", 1, {2.0}, 3).derivative({0, 0, 0}); }});
  c.push_back({"jets.exp_product_mixed", 2 * e, 1e-14,
               [] { return jet_of("exp(x1*x2)", 2, {1.0, 1.0}, 2).derivative({0, 1}); }});

  // web
  c.push_back({"web.coframe_product", 2, 1e-15, [ones4] { return coframe(web("(x1+x2)*(x3+x4)", 4), ones4)[0][0]; }});
  c.push_back({"web.coframe_quadratic", 1, 1e-15,
               [ones4] { return coframe(web("x1^2/2 + x2^2/2 + x3^2/2 + x4^2/2", 4), ones4)[3][3]; }});
  c.push_back({"web.coframe_missing_variable", 2, 0, [] {
                 try {
                   coframe(web("x1*x3", 4), Point{0, 1, 1, 1});
                 } catch (const RegularityError& err) {
                   return double(err.alpha());
                 }
                 return -1.0;
               }});
  c.push_back({"web.torsion_product_a13", 0.25, 1e-15, [ones4] { return torsion(web("(x1+x2)*(x3+x4)", 4), ones4)(1, 3); }});
  c.push_back({"web.torsion_product_a34", 0, 1e-15, [ones4] { return torsion(web("(x1+x2)*(x3+x4)", 4), ones4)(3, 4); }});
  c.push_back({"web.torsion_generic_a13", 0.5, 1e-15,
               [ones4] { return torsion(web("x1*x3 + x2*x4 + x1*x4", 4), ones4)(1, 3); }});
  c.push_back({"web.torsion_generic_a14", 0.25, 1e-15,
               [ones4] { return torsion(web("x1*x3 + x2*x4 + x1*x4", 4), ones4)(1, 4); }});
  c.push_back({"web.torsion_generic_a23", 0, 1e-15,
               [ones4] { return torsion(web("x1*x3 + x2*x4 + x1*x4", 4), ones4)(2, 3); }});
  c.push_back({"web.pfaffian_gauge_zero", -0.125, 1e-15, [ones4] {
                 return pfaffian_derivs(web("(x1+x2)*(x3+x4)", 4), ones4, Gauge::zero(4))(1, 3, 1);
               }});
  c.push_back({"web.pfaffian_gauge_shift", -0.375, 1e-15, [ones4] {
                 return pfaffian_derivs(web("(x1+x2)*(x3+x4)", 4), ones4, Gauge{{1, 0, 0, 0}})(1, 3, 1);
               }});
  c.push_back({"web.pfaffian_quadratic_zero", 0, 0, [] {
                 const PfaffianDerivs d =
                     pfaffian_derivs(web("x1^2/2 + x2^2/2 + x3^2/2 + x4^2/2", 4), Point{1, 2, 3, 4}, Gauge{{1, 2, 3, 4}});
                 double m = 0.0;
                 for (int a = 1; a <= 4; ++a)
                   for (int b = a + 1; b <= 4; ++b)
                     for (int g = 1; g <= 4; ++g) m = std::max(m, std::abs(d(a, b, g)));
                 return m;
               }});

  // families
  c.push_back({"families.constraint_at_root", 0, 1e-14, [ones4] { return constraint(first_example(), ones4, 4.0); }});
  c.push_back({"families.constraint_at_zero", 4, 1e-14, [ones4] { return constraint(first_example(), ones4, 0.0); }});
  c.push_back({"families.constraint_second", 0, 1e-14, [] {
                 const Point p{0.5, 1.5, 0.2, 0.3, 0.4};
                 return constraint(second_example(), p, 1.5) - (2.0 + 1.5 + 0.9);
               }});
  c.push_back({"families.solve_first", 4, 1e-12, [ones4] { return solve_parameter(first_example(), ones4).a; }});
  c.push_back({"families.solve_second", -5, 1e-12, [ones5] { return solve_parameter(second_example(), ones5).a; }});
  c.push_back({"families.singular_envelope", 1, 0, [ones4] {
                 return throws<SingularEnvelope>([ones4] { solve_parameter(degenerate_spec(), ones4); });
               }});
  c.push_back({"families.first_closed_form", 0, 1e-10, [] {
                 return closed_form_error(family_web(first_example()), [](const std::vector<double>& x, double& v,
                                                                          std::vector<double>& g, std::vector<double>& h) {
                   const double s = x[0] + x[1] + x[2] + x[3];
                   v = s * s / 2;
                   for (double& gi : g) gi = s;
                   for (double& hi : h) hi = 1.0;
                 });
               }});
  c.push_back({"families.second_closed_form", 0, 1e-10, [] {
                 return closed_form_error(family_web(second_example()), [](const std::vector<double>& x, double& v,
                                                                           std::vector<double>& g, std::vector<double>& h) {
                   const double u = x[0] + x[1], w = x[2] + x[3] + x[4];
                   v = -u * u / 2 - u * w;
                   for (int a = 0; a < 5; ++a) {
                     g[static_cast<std::size_t>(a)] = a < 2 ? -u - w : -u;
                     for (int b = 0; b < 5; ++b) h[static_cast<std::size_t>(a * 5 + b)] = (a < 2 || b < 2) ? -1.0 : 0.0;
                   }
                 });
               }});
  for (const BundledSpec& b : bundled_specs())
    c.push_back({"families.newton_" + b.name, 1, 0, [b] { return double(solve_parameter(b.spec, b.point).iterations <= 8); }});

  // classify
  c.push_back({"classify.first_product", 0, 0,
               [ones4] { return first_kind_residual(torsion(web("(x1+x2)*(x3+x4)", 4), ones4)).value(); }});
  c.push_back({"classify.first_generic", 0.25, 1e-15,
               [ones4] { return first_kind_residual(torsion(web("x1*x3 + x2*x4 + x1*x4", 4), ones4)).value(); }});
  c.push_back({"classify.first_zero_degenerate", 1, 0,
               [] { return double(first_kind_residual(TorsionTensor(4)).degenerate); }});
  c.push_back({"classify.first_pde_product", 0, 0, [] {
                 return first_kind_pde_residual(web("(x1+x2)*(x3+x4)", 4), Point{0.3, 0.9, 1.7, 2.2}).value;
               }});
  c.push_back({"classify.first_pde_generic", 1, 1e-15,
               [ones4] { return first_kind_pde_residual(web("x1*x3 + x2*x4 + x1*x4", 4), ones4).value; }});
  c.push_back({"classify.second_proportional_rows", 0, 0, [] {
                 TorsionTensor t(5);
                 for (int q = 3; q <= 5; ++q) t.set(1, q, 0.7), t.set(2, q, q - 1.3);
                 return second_kind_residuals(t).det24;
               }});
  c.push_back({"classify.second_family_torsion", 0, 1e-12, [] {
                 return second_kind_residuals(torsion(family_web(second_example()), Point{0.4, 0.9, 1.3, 0.6, 1.1}))
                     .relative();
               }});
  c.push_back({"classify.second_pde_composed", 0, 1e-14, [] {
                 return second_kind_pde_residual(web("x1*sin(x3+x4+x5) + x2*exp(x3+x4+x5)", 5), Point{0.5, 0.7, 0.1, 0.2, 0.3})
                     .relative();
               }});
  c.push_back({"classify.second_pde_closed_family", 0, 1e-14, [] {
                 return second_kind_pde_residual(web("-(x1+x2)^2/2 - (x1+x2)*(x3+x4+x5)", 5), Point{0.4, 0.9, 1.3, 0.6, 1.1})
                     .relative();
               }});
  c.push_back({"classify.second_pde_control", 0.5, 1e-15, [ones5] {
                 return second_kind_pde_residual(web("x1*x3 + x2*x4 + x1^2*x4/2 + x2*x5^2/2 + x1*x5", 5), ones5).value;
               }});
  c.push_back({"classify.first_family_detected", 1, 0, [] {
                 return double(classify(family_web(first_example5()), Box::uniform(5, 0.5, 1.5), 10, 1e-7, 1).first_kind);
               }});
  c.push_back({"classify.second_family_detected", 1, 0, [] {
                 return double(
                     classify(family_web(second_example()), Box::uniform(5, 0.5, 1.5), 10, 1e-7, 1).second_kind.value_or(false));
               }});
  c.push_back({"classify.generic_not_first", 0, 0, [] {
                 return double(classify(web("x1*x3 + x2*x4 + x1*x4", 4), Box::uniform(4, 0.5, 1.5), 10, 1e-7, 1).first_kind);
               }});

  // exterior
  c.push_back({"exterior.theta_rho_product", 0, 1e-15, [] {
                 Eigen::MatrixXd want(2, 4);
                 want << 0, 0, 1, 1, 1, 1, 0, 0;
                 const PfaffianSystem s = make_system(web("(x1+x2)*(x3+x4)", 4), SystemTag::THETA_RHO);
                 return max_abs(coefficient_matrix(s, Point{0.7, 1.2, 0.4, 2.0}) - want);
               }});
  c.push_back({"exterior.delta4_zero_form_degenerate", 1, 0, [ones5] {
                 const PfaffianSystem s = make_system(web("(x1+x2)*(x3+x4+x5)", 5), SystemTag::DELTA4);
                 return double(frobenius_residual(s, ones5).verdict == Verdict::Degenerate);
               }});
  c.push_back({"exterior.s10_generators_n6", 3, 0, [] {
                 return double(make_system(web("x1*x3 + x2*x4 + x1*x4 + x5^2/2 + x6^2/2", 6), SystemTag::S10).generator_count());
               }});
  c.push_back({"exterior.union_kernel_first_kind", 3, 0, [] {
                 return kernel_dim(family_web(first_example5()), SystemTag::S10_11, Point{0.7, 1.1, 0.9, 1.3, 0.8});
               }});
  c.push_back({"exterior.union_kernel_generic", 2, 0, [] {
                 return kernel_dim(web("x1*x3 + x2*x4 + x1*x4 + x5^2/2", 5), SystemTag::S10_11, Point{0.7, 1.1, 0.9, 1.3, 0.8});
               }});
  c.push_back({"exterior.delta2_kernel_second_kind", 2, 0, [] {
                 // the closed-form example has a13 = a14 = a15, too special for a rank count
                 const FamilySpec spec = FamilySpec::from_text(FamilyKind::Second, "a*(x1 + 2*x2) + a^2 + s^2/2 + s*x1*x2",
                                                               "a*(1 + x3) + x3*x4 + x4*x5 + x5^2/2", 5, 0.0);
                 return kernel_dim(family_web(spec), SystemTag::DELTA2, Point{0.7, 1.1, 0.9, 1.3, 0.8});
               }});
  c.push_back({"exterior.delta2_kernel_control", 1, 0, [] {
                 return kernel_dim(web("x1*x3 + x2*x4 + x1^2*x4/2 + x2*x5^2/2 + x1*x5", 5), SystemTag::DELTA2,
                                   Point{0.7, 1.1, 0.9, 1.3, 0.8});
               }});
  c.push_back({"exterior.d_of_x2_dx1", 1, 0, [] {
                 const CoFormField t = CoFormField::from_exprs({parse("x2", 3), parse("0", 3), parse("0", 3)}, "x2 dx1");
                 return d_form(t, Point{0.3, -1.2, 2.0})(1, 0);
               }});
  c.push_back({"exterior.d_of_exact_form", 0, 1e-15, [] {
                 const CoFormField t =
                     CoFormField::from_exprs({parse("2*x1*x2", 3), parse("x1^2", 3), parse("cos(x3)", 3)}, "dF");
                 return max_abs(d_form(t, Point{0.3, -1.2, 2.0}));
               }});
  c.push_back({"exterior.d_of_contact_form", 1, 0, [] {
                 const CoFormField t = CoFormField::from_exprs({parse("1", 3), parse("0", 3), parse("x2", 3)}, "contact");
                 const Eigen::MatrixXd d = d_form(t, Point{0.3, -1.2, 2.0});
                 return d(1, 2) == 1.0 && std::abs(d(0, 1)) + std::abs(d(0, 2)) == 0.0 ? 1.0 : 0.0;
               }});
  c.push_back({"exterior.coordinate_pair_integrable", 0, 0, [] {
                 return frobenius_residual(PfaffianSystem::custom({}, {3, 4}), Point{1, 2, 3, 4}).max_residual;
               }});
  c.push_back({"exterior.contact_form_residual", 1.0 / std::sqrt(2.0), 1e-15, [] {
                 const CoFormField t = CoFormField::from_exprs({parse("1", 3), parse("0", 3), parse("x2", 3)}, "contact");
                 return frobenius_residual(PfaffianSystem::custom({t}), Point{0.0, 1.0, 0.0}).max_residual;
               }});
  c.push_back({"exterior.theta_rho_first_family", 0, 1e-7, [] {
                 const WebFunction f = family_web(first_example5());
                 const PfaffianSystem s = make_system(f, SystemTag::THETA_RHO);
                 double worst = 0.0;
                 for (const Point& p : sample_regular_points(f, Box::uniform(5, 0.5, 1.5), 5, 3, 3).points)
                   worst = std::max(worst, frobenius_residual(s, p).max_residual);
                 return worst;
               }});

  // identities
  c.push_back({"identities.abc_proportional_rows", 0, 0, [] {
                 TorsionTensor t(5);
                 for (int q = 3; q <= 5; ++q) t.set(1, q, 0.3 * q), t.set(2, q, 0.6 * q);
                 const ABC k = abc(t);
                 return std::abs(k.A) + std::abs(k.B) + std::abs(k.C);
               }});
  c.push_back({"identities.abc_generic_A", 0.25, 1e-15,
               [ones5] { return abc(torsion(web("x1*x3 + x2*x4 + x1*x4 + x5^2/2", 5), ones5)).A; }});
  c.push_back({"identities.lemma1_zero", 0, 0, [] {
                 double m = 0.0;
                 for (const Residual& r : lemma1_residuals(TorsionTensor(4), PfaffianDerivs(4))) m = std::max(m, std::abs(r.value));
                 return m;
               }});
  c.push_back({"identities.lemma2_equal_rows", 0, 1e-15, [] {
                 TorsionTensor t(5);
                 for (int q = 3; q <= 5; ++q) t.set(1, q, 0.4 * q - 1), t.set(2, q, 0.4 * q - 1);
                 double m = 0.0;
                 for (const Lemma2Entry& en : lemma2_residuals(t)) m = std::max(m, std::abs(en.quadratic.value));
                 return m;
               }});
  c.push_back({"identities.conditions_zero", 0, 0, [] {
                 const ConditionValues v = condition_values(TorsionTensor(5), PfaffianDerivs(5));
                 double m = std::abs(v.residual40.value);
                 for (const Residual& r : v.m) m = std::max(m, std::abs(r.value));
                 for (const auto* arr : {&v.n, &v.r, &v.s})
                   for (const Residual& r : *arr) m = std::max(m, std::abs(r.value));
                 for (const Residual& r : v.uv) m = std::max(m, std::abs(r.value));
                 return m;
               }});
  c.push_back({"identities.remark_mnr", 0, 1e-8, [] { return remark_implication_test(200, 1).worst; }});
  c.push_back({"identities.witness_s_not_uv", 1, 0, [] { return double(witness_s_not_uv(1000, 1).found); }});

  // cli
  c.push_back({"cli.product_web_all_suites", 1, 0, [] {
                 const RunReport r = run(example_config("[web]\narity = 4\nexpr = (x1+x2)*(x3+x4)\n[suites]\ntrials = 50\n"));
                 bool theta = false;
                 for (const SystemRun& s : *r.frobenius)
                   if (s.tag == SystemTag::THETA_RHO) theta = s.verdict == "integrable";
                 return double(r.classification->first_kind && theta);
               }});
  c.push_back({"cli.second_family_classify", 1, 0, [] {
                 const RunReport r = run(example_config(
                     "[web]\narity = 5\nfamily = second\nphi = a*(x1+x2) + s^2/2\npsi = a + x3 + x4 + x5\n"
                     "[suites]\nrun = classify\n"));
                 return double(r.classification->second_kind.value_or(false));
               }});
  c.push_back({"cli.singular_box", 1, 0, [] {
                 try {
                   run(example_config("[web]\narity = 4\nexpr = 1e-12*(x1 + x2 + x3 + x4)\n[suites]\nrun = classify\n"));
                 } catch (const SamplingError& err) {
                   return double(std::string(err.what()).find("too few regular sample points") != std::string::npos);
                 }
                 return 0.0;
               }});
  return c;
}

struct SelfCheckResult {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  bool passed = false;
  std::string error;
};

inline SelfCheckResult run_check(const SelfCheck& c) {
  SelfCheckResult r{c.name, c.expected, std::nan(""), false, ""};
  try {
    r.actual = c.compute();
    r.passed = std::isfinite(r.actual) && std::abs(r.actual - c.expected) <= c.tol;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

/// Runs every check, one PASS/FAIL line each. Returns 0 if all pass, else 1.
inline int run_selftest(const std::vector<SelfCheck>& corpus, std::ostream& out) {
  int failed = 0;
  for (const SelfCheck& c : corpus) {
    const SelfCheckResult r = run_check(c);
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) {
      out << " (expected " << r.expected << ", got ";
      if (r.error.empty())
        out << r.actual;
      else
        out << "error: " << r.error;
      out << ")";
      ++failed;
    }
    out << "\n";
  }
  out << (corpus.size() - static_cast<std::size_t>(failed)) << "/" << corpus.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace goursat

#endif  // GOURSAT_SELFTEST_HPP
