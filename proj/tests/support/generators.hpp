#ifndef GOURSAT_TESTS_GENERATORS_HPP
#define GOURSAT_TESTS_GENERATORS_HPP

// Random inputs for property tests. Each generated expression carries its
// own evaluator built from std:: math, independent of the library's
// interpreter and jet code.

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "goursat/goursat.hpp"

namespace gtest_support {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

/// " + c*t" or " - |c|*t".
inline std::string signed_term(double c, const std::string& t) {
  return (c < 0 ? " - " : " + ") + num(std::abs(c)) + (t.empty() ? "" : "*" + t);
}

struct GenExpr {
  std::string text;
  std::function<double(std::span<const double>)> eval;
};

/// Smooth random expression over x1..x_arity; finite for x in [-1, 1]^n.
inline GenExpr random_expr(Rng& rng, int arity, int depth) {
  if (depth == 0 || uniform_int(rng, 0, 4) == 0) {
    if (uniform_int(rng, 0, 2) == 0) {
      const double c = uniform_int(rng, 1, 12) / 4.0;
      return {num(c), [c](std::span<const double>) { return c; }};
    }
    const int i = uniform_int(rng, 1, arity);
    return {"x" + std::to_string(i), [i](std::span<const double> x) { return x[static_cast<std::size_t>(i - 1)]; }};
  }
  const GenExpr a = random_expr(rng, arity, depth - 1);
  switch (uniform_int(rng, 0, 10)) {
    case 0: {
      const GenExpr b = random_expr(rng, arity, depth - 1);
      return {"(" + a.text + ") + (" + b.text + ")", [a, b](auto x) { return a.eval(x) + b.eval(x); }};
    }
    case 1: {
      const GenExpr b = random_expr(rng, arity, depth - 1);
      return {"(" + a.text + ") - (" + b.text + ")", [a, b](auto x) { return a.eval(x) - b.eval(x); }};
    }
    case 2: {
      const GenExpr b = random_expr(rng, arity, depth - 1);
      return {"(" + a.text + ")*(" + b.text + ")", [a, b](auto x) { return a.eval(x) * b.eval(x); }};
    }
    case 3: {
      const GenExpr b = random_expr(rng, arity, depth - 1);
      return {"(" + a.text + ")/(1.5 + (" + b.text + ")^2)", [a, b](auto x) {
                const double d = b.eval(x);
                return a.eval(x) / (1.5 + d * d);
              }};
    }
    case 4: return {"exp(sin(" + a.text + "))", [a](auto x) { return std::exp(std::sin(a.eval(x))); }};
    case 5: return {"ln(1 + (" + a.text + ")^2)", [a](auto x) {
                      const double v = a.eval(x);
                      return std::log(1 + v * v);
                    }};
    case 6: return {"sqrt(2 + cos(" + a.text + "))", [a](auto x) { return std::sqrt(2 + std::cos(a.eval(x))); }};
    case 7: return {"sin(" + a.text + ")", [a](auto x) { return std::sin(a.eval(x)); }};
    case 8: return {"cos(" + a.text + ")", [a](auto x) { return std::cos(a.eval(x)); }};
    case 9: return {"(" + a.text + ")^3", [a](auto x) { return std::pow(a.eval(x), 3); }};
    default: return {"-(" + a.text + ")", [a](auto x) { return -a.eval(x); }};
  }
}

/// Polynomial with exact derivatives.
struct Polynomial {
  int arity = 0;
  std::map<std::vector<int>, double> terms;  // exponents -> coefficient

  std::string text() const {
    std::string s = "0";
    for (const auto& [e, c] : terms) {
      std::string t;
      for (int i = 0; i < arity; ++i) {
        if (e[static_cast<std::size_t>(i)] == 0) continue;
        if (!t.empty()) t += "*";
        t += "x" + std::to_string(i + 1);
        if (e[static_cast<std::size_t>(i)] > 1) t += "^" + std::to_string(e[static_cast<std::size_t>(i)]);
      }
      s += signed_term(c, t.empty() ? "1" : t);
    }
    return s;
  }

  /// d^|slots| p / dx_{slots...} at x (slots 0-based, repeats allowed).
  double derivative(std::span<const int> slots, std::span<const double> x) const {
    double total = 0.0;
    for (const auto& [e, c] : terms) {
      std::vector<int> k(static_cast<std::size_t>(arity), 0);
      for (int s : slots) ++k[static_cast<std::size_t>(s)];
      double v = c;
      for (int i = 0; i < arity; ++i) {
        const int ei = e[static_cast<std::size_t>(i)], ki = k[static_cast<std::size_t>(i)];
        if (ki > ei) {
          v = 0.0;
          break;
        }
        for (int j = 0; j < ki; ++j) v *= ei - j;
        v *= std::pow(x[static_cast<std::size_t>(i)], ei - ki);
      }
      total += v;
    }
    return total;
  }
};

inline Polynomial random_polynomial(Rng& rng, int arity, int terms, int max_exp) {
  Polynomial p{arity, {}};
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(static_cast<std::size_t>(arity));
    for (int& v : e) v = uniform_int(rng, 0, max_exp);
    p.terms[e] += uniform_int(rng, -3, 3) + 0.5;
  }
  return p;
}

/// Non-first-kind, non-second-kind web regular on positive boxes:
///   x1 x3 + x2 x4 + x1^2 x4 / 2 [+ x2 x5^2 / 2 + x1 x5] [+ x6^2 / 2 + ...].
inline std::string control_web_text(int n) {
  std::string s = "x1*x3 + x2*x4 + x1^2*x4/2";
  if (n >= 5) s += " + x2*x5^2/2 + x1*x5";
  for (int i = 6; i <= n; ++i) s += " + x" + std::to_string(i) + "^2/2";
  return s;
}

inline goursat::WebFunction control_web(int n) { return goursat::WebFunction::from_expr(goursat::parse(control_web_text(n), n)); }

/// Shared-variable linear tail " + c5*x5 + ..." for indices in [from, n].
inline std::string tail(Rng& rng, int from, int n) {
  std::string s;
  for (int i = from; i <= n; ++i) s += signed_term(uniform(rng, -1, 1), "x" + std::to_string(i));
  return s;
}

inline goursat::FamilySpec random_first_kind(Rng& rng, int n) {
  const bool with_exp = uniform_int(rng, 0, 1) == 1;
  const std::string P = num(uniform(rng, 0.5, 1.5)) + signed_term(uniform(rng, -1, 1), "x1") +
                        signed_term(uniform(rng, -1, 1), "x2") + signed_term(uniform(rng, -1, 1), "x1*x2") +
                        signed_term(uniform(rng, -1, 1), "x1^2") + tail(rng, 5, n);
  const std::string Q = num(uniform(rng, 0.5, 1.5)) + signed_term(uniform(rng, -1, 1), "x3") +
                        signed_term(uniform(rng, -1, 1), "x4") + signed_term(uniform(rng, -1, 1), "x3*x4") +
                        signed_term(uniform(rng, -1, 1), "x4^2") + tail(rng, 5, n);
  std::string phi = "a*(" + P + ")" + signed_term(uniform(rng, 0.25, 0.75), "a^2");
  std::string psi = "a*(" + Q + ")" + signed_term(uniform(rng, 0.25, 0.75), "a^2");
  if (with_exp) {
    phi += signed_term(uniform(rng, 0.1, 0.5), "exp(" + num(uniform(rng, -0.5, 0.5)) + "*a" +
                                                   signed_term(uniform(rng, -0.5, 0.5), "x1") + ")");
    psi += signed_term(uniform(rng, 0.1, 0.5), "exp(" + num(uniform(rng, -0.5, 0.5)) + "*a" +
                                                   signed_term(uniform(rng, -0.5, 0.5), "x3") + ")");
  }
  return goursat::FamilySpec::from_text(goursat::FamilyKind::First, phi, psi, n, 0.0);
}

inline goursat::FamilySpec random_second_kind(Rng& rng, int n) {
  const bool with_exp = uniform_int(rng, 0, 1) == 1;
  const std::string P = num(uniform(rng, 0.5, 1.5)) + signed_term(uniform(rng, -1, 1), "x1") +
                        signed_term(uniform(rng, -1, 1), "x2") + signed_term(uniform(rng, -1, 1), "x1*x2") +
                        tail(rng, 6, n);
  const std::string R = num(uniform(rng, -1, 1)) + signed_term(uniform(rng, 0.3, 1), "x1") +
                        signed_term(uniform(rng, -1, -0.3), "x2") + signed_term(uniform(rng, -0.5, 0.5), "x1^2");
  const std::string L = num(uniform(rng, 0.5, 1.0)) + signed_term(uniform(rng, 0.2, 1), "x3") +
                        signed_term(uniform(rng, 0.2, 1), "x4") + signed_term(uniform(rng, 0.2, 1), "x5");
  const std::string Q = signed_term(uniform(rng, -1, 1), "x3") + signed_term(uniform(rng, -1, 1), "x4") +
                        signed_term(uniform(rng, -1, 1), "x5") + signed_term(uniform(rng, -1, 1), "x3*x4") +
                        signed_term(uniform(rng, -1, 1), "x5^2") + tail(rng, 6, n);
  std::string phi = "a*(" + P + ")" + signed_term(uniform(rng, 0.25, 0.75), "a^2") +
                    signed_term(uniform(rng, 0.25, 0.75), "s^2") + " + s*(" + R + ")";
  if (with_exp) phi += signed_term(uniform(rng, 0.1, 0.4), "exp(" + num(uniform(rng, -0.4, 0.4)) + "*s)");
  const std::string psi = "a*(" + L + ")" + Q;
  return goursat::FamilySpec::from_text(goursat::FamilyKind::Second, phi, psi, n, 0.0);
}

}  // namespace gtest_support

#endif  // GOURSAT_TESTS_GENERATORS_HPP
