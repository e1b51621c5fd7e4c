#ifndef GOURSAT_WEB_HPP
#define GOURSAT_WEB_HPP

// A codimension-one (n+1)-web given in closed form x_{n+1} = F(x_1..x_n).
// Foliations are x_alpha = const (alpha = 1..n) and F = const; the co-frame
// is omega_alpha = F_alpha dx_alpha. Domain indices (alpha, beta, gamma) are
// 1-based throughout this header; jet slots are 0-based.

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/expr.hpp"
#include "goursat/jets.hpp"

namespace goursat {

inline constexpr double kDefaultRegularity = 1e-9;

class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : x_(std::move(coords)) { check(); }
  Point(std::initializer_list<double> coords) : x_(coords) { check(); }

  std::size_t size() const { return x_.size(); }
  /// 0-based access.
  double operator[](std::size_t i) const { return x_[i]; }
  /// 1-based coordinate x_alpha.
  double coord(int alpha) const { return x_.at(static_cast<std::size_t>(alpha - 1)); }
  std::span<const double> coords() const { return x_; }
  const std::vector<double>& vector() const { return x_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  void check() const {
    for (double v : x_)
      if (!std::isfinite(v)) throw ContractError("point coordinates must be finite");
  }
  std::vector<double> x_;
};

enum class Provenance { ClosedForm, Family };

/// Checks |F_alpha| > threshold for every alpha; throws RegularityError.
inline void require_regular(const Jet& f, double threshold) {
  for (int a = 0; a < f.vars(); ++a) {
    const double g = f.derivative({a});
    if (!(std::abs(g) > threshold)) throw RegularityError(a + 1, g);
  }
}

class WebFunction {
 public:
  /// Returns the order-K jet of F at a point, slots x1..xn.
  using Evaluator = std::function<Jet(const Point&, int)>;

  WebFunction(int arity, Evaluator eval, Provenance provenance, std::string description, int max_order = 3)
      : arity_(arity),
        eval_(std::move(eval)),
        provenance_(provenance),
        description_(std::move(description)),
        max_order_(max_order) {
    if (arity_ < 1) throw ContractError("web arity must be positive");
  }

  /// Closed-form web from an expression without free parameters.
  static WebFunction from_expr(const Expr& f) {
    if (!f.params().empty()) throw ContractError("closed-form web expression must not declare parameters");
    return WebFunction(
        f.arity(),
        [f](const Point& p, int order) { return eval_jet(f, p.coords(), std::span<const double>{}, order); },
        Provenance::ClosedForm, f.str(), kMaxJetOrder);
  }

  int arity() const { return arity_; }
  Provenance provenance() const { return provenance_; }
  const std::string& description() const { return description_; }
  int max_order() const { return max_order_; }
  double regularity_threshold() const { return regularity_; }
  void set_regularity_threshold(double t) { regularity_ = t; }

  Jet jet(const Point& p, int order) const {
    if (static_cast<int>(p.size()) != arity_) throw ContractError("point dimension does not match web arity");
    if (order > max_order_)
      throw ContractError("web supports jets up to order " + std::to_string(max_order_) + " only");
    return eval_(p, order);
  }

  /// Jet with the regularity precondition enforced.
  Jet regular_jet(const Point& p, int order) const {
    Jet j = jet(p, order);
    require_regular(j, regularity_);
    return j;
  }

 private:
  int arity_;
  Evaluator eval_;
  Provenance provenance_;
  std::string description_;
  int max_order_;
  double regularity_ = kDefaultRegularity;
};

/// Off-diagonal symmetric a_{alpha beta}; the diagonal is absent.
class TorsionTensor {
 public:
  explicit TorsionTensor(int n) : n_(n), a_(static_cast<std::size_t>(n * n), 0.0) {}

  int arity() const { return n_; }

  double operator()(int a, int b) const {
    if (a == b) throw ContractError("torsion diagonal a_" + std::to_string(a) + std::to_string(a) + " is undefined");
    return a_[idx(a, b)];
  }
  /// a_{alpha beta} with the convention a_{alpha alpha} := 0.
  double or_zero(int a, int b) const { return a == b ? 0.0 : a_[idx(a, b)]; }

  void set(int a, int b, double v) {
    if (a == b) throw ContractError("torsion diagonal cannot be set");
    a_[idx(a, b)] = v;
    a_[idx(b, a)] = v;
  }

 private:
  std::size_t idx(int a, int b) const {
    if (a < 1 || b < 1 || a > n_ || b > n_) throw ContractError("torsion index out of range");
    return static_cast<std::size_t>((a - 1) * n_ + (b - 1));
  }
  int n_;
  std::vector<double> a_;
};

/// Coefficients of the connection form, omega = sum_gamma w_gamma omega_gamma.
struct Gauge {
  std::vector<double> w;

  static Gauge zero(int n) { return Gauge{std::vector<double>(static_cast<std::size_t>(n), 0.0)}; }
  double operator[](int gamma) const { return w.at(static_cast<std::size_t>(gamma - 1)); }
  int arity() const { return static_cast<int>(w.size()); }
};

/// Pfaffian derivatives a_{alpha beta gamma}, symmetric in alpha, beta.
class PfaffianDerivs {
 public:
  PfaffianDerivs(int n, Gauge g) : n_(n), gauge_(std::move(g)), a_(static_cast<std::size_t>(n * n * n), 0.0) {}
  explicit PfaffianDerivs(int n) : PfaffianDerivs(n, Gauge::zero(n)) {}

  int arity() const { return n_; }
  const Gauge& gauge() const { return gauge_; }

  double operator()(int a, int b, int c) const {
    if (a == b) throw ContractError("Pfaffian derivative with equal first indices is undefined");
    return a_[idx(a, b, c)];
  }
  void set(int a, int b, int c, double v) {
    if (a == b) throw ContractError("Pfaffian derivative with equal first indices cannot be set");
    a_[idx(a, b, c)] = v;
    a_[idx(b, a, c)] = v;
  }

 private:
  std::size_t idx(int a, int b, int c) const {
    if (a < 1 || b < 1 || c < 1 || a > n_ || b > n_ || c > n_) throw ContractError("Pfaffian index out of range");
    return static_cast<std::size_t>(((a - 1) * n_ + (b - 1)) * n_ + (c - 1));
  }
  int n_;
  Gauge gauge_;
  std::vector<double> a_;
};

using Covector = std::vector<double>;

/// omega_alpha = F_alpha dx_alpha.
inline std::vector<Covector> coframe(const WebFunction& web, const Point& p) {
  const Jet f = web.regular_jet(p, 1);
  const int n = web.arity();
  std::vector<Covector> out(static_cast<std::size_t>(n), Covector(static_cast<std::size_t>(n), 0.0));
  for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = f.derivative({a});
  return out;
}

/// a_{alpha beta} = F_{alpha beta} / (F_alpha F_beta) from one order-2 jet.
inline TorsionTensor torsion_from_jet(const Jet& f) {
  const int n = f.vars();
  TorsionTensor t(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      t.set(a + 1, b + 1, f.derivative({a, b}) / (f.derivative({a}) * f.derivative({b})));
  return t;
}

inline TorsionTensor torsion(const WebFunction& web, const Point& p) {
  return torsion_from_jet(web.regular_jet(p, 2));
}

/// a_{abg} = (1/F_g) d_g a_{ab} - a_{ab} (w_g + a_{ga} + a_{bg}), with a_{aa} := 0.
inline PfaffianDerivs pfaffian_derivs_from_jet(const Jet& f, const Gauge& g) {
  if (f.order() < 3) throw ContractError("Pfaffian derivatives need an order-3 jet");
  const int n = f.vars();
  if (g.arity() != n) throw ContractError("gauge length does not match web arity");
  const TorsionTensor t = torsion_from_jet(f);
  PfaffianDerivs d(n, g);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double fa = f.derivative({a}), fb = f.derivative({b}), fab = f.derivative({a, b});
      const double denom = fa * fb;
      for (int c = 0; c < n; ++c) {
        const double dc_tab = f.derivative({a, b, c}) / denom -
                              fab * (f.derivative({a, c}) * fb + fa * f.derivative({b, c})) / (denom * denom);
        const double tab = t(a + 1, b + 1);
        const double value = dc_tab / f.derivative({c}) -
                             tab * (t.or_zero(c + 1, a + 1) + t.or_zero(b + 1, c + 1)) - tab * g[c + 1];
        d.set(a + 1, b + 1, c + 1, value);
      }
    }
  return d;
}

inline PfaffianDerivs pfaffian_derivs(const WebFunction& web, const Point& p, const Gauge& g) {
  if (web.max_order() < 3) throw ContractError("web does not provide order-3 jets");
  return pfaffian_derivs_from_jet(web.regular_jet(p, 3), g);
}

}  // namespace goursat

#endif  // GOURSAT_WEB_HPP
