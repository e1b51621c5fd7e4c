#ifndef GOURSAT_JETS_HPP
#define GOURSAT_JETS_HPP

// Truncated multivariate Taylor series ("jets") in m active slots up to
// total order K <= 4.
//
// A jet stores Taylor coefficients c_beta, one per monomial x^beta with
// |beta| <= K. Monomials are enumerated in graded order and, within a degree,
// lexicographically by their canonical nondecreasing slot tuple, so the
// layout for order K-1 is a prefix of the layout for order K. Partial
// derivatives are beta! * c_beta; the tuple form makes symmetry structural.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/expr.hpp"

namespace goursat {

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetVars = 12;

class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs, rhs, out;
  };

  /// Shared, immutable layout for (vars, order); thread-safe.
  static std::shared_ptr<const JetLayout> get(int vars, int order) {
    if (vars < 1 || vars > kMaxJetVars) throw ContractError("jet: slot count out of range");
    if (order < 0 || order > kMaxJetOrder) throw ContractError("jet: order out of range");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{vars, order}];
    if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(vars, order));
    return slot;
  }

  int vars() const { return vars_; }
  int order() const { return order_; }
  std::size_t size() const { return degree_.size(); }
  int degree(std::size_t i) const { return degree_[i]; }
  /// Product of factorials of the exponents of monomial i.
  double factorial(std::size_t i) const { return factorial_[i]; }
  std::uint8_t exponent(std::size_t i, int slot) const { return exponents_[i][static_cast<std::size_t>(slot)]; }
  /// Number of monomials of degree <= d.
  std::size_t count_up_to(int d) const { return degree_begin_[static_cast<std::size_t>(d) + 1]; }
  const std::vector<Product>& products() const { return products_; }

  /// Index of monomial i times x_slot, or -1 past the truncation order.
  long shifted(std::size_t i, int slot) const { return shift_[static_cast<std::size_t>(slot)][i]; }

  /// Index of the monomial named by a slot tuple in any order.
  std::size_t index_of(std::span<const int> slots) const {
    if (static_cast<int>(slots.size()) > order_) throw ContractError("jet: derivative order exceeds jet order");
    std::array<int, kMaxJetOrder> sorted{};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k] < 0 || slots[k] >= vars_) throw ContractError("jet: slot index out of range");
      sorted[k] = slots[k];
    }
    std::sort(sorted.begin(), sorted.begin() + static_cast<long>(slots.size()));
    return static_cast<std::size_t>(lookup_[encode(std::span<const int>(sorted.data(), slots.size()))]);
  }

 private:
  JetLayout(int vars, int order) : vars_(vars), order_(order) {
    std::size_t table = 1;
    for (int k = 0; k < order; ++k) table *= static_cast<std::size_t>(vars + 1);
    lookup_.assign(table, -1);
    degree_begin_.push_back(0);
    std::vector<int> tuple;
    for (int d = 0; d <= order; ++d) {
      tuple.assign(static_cast<std::size_t>(d), 0);
      enumerate(tuple, 0, 0);
      degree_begin_.push_back(degree_.size());
    }
    shift_.assign(static_cast<std::size_t>(vars), std::vector<long>(degree_.size(), -1));
    for (std::size_t i = 0; i < degree_.size(); ++i) {
      if (degree_[i] == order) continue;
      for (int s = 0; s < vars; ++s) {
        auto e = exponents_[i];
        ++e[static_cast<std::size_t>(s)];
        shift_[static_cast<std::size_t>(s)][i] = lookup_[encode_exponents(e)];
      }
    }
    for (std::size_t i = 0; i < degree_.size(); ++i)
      for (std::size_t j = 0; j < degree_.size() && degree_[i] + degree_[j] <= order; ++j) {
        auto e = exponents_[i];
        for (int s = 0; s < vars; ++s) e[static_cast<std::size_t>(s)] += exponents_[j][static_cast<std::size_t>(s)];
        products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<std::uint32_t>(lookup_[encode_exponents(e)])});
      }
    std::stable_sort(products_.begin(), products_.end(),
                     [](const Product& a, const Product& b) { return a.out < b.out; });
  }

  void enumerate(std::vector<int>& tuple, std::size_t pos, int min_slot) {
    if (pos == tuple.size()) {
      std::array<std::uint8_t, kMaxJetVars> e{};
      for (int s : tuple) ++e[static_cast<std::size_t>(s)];
      double f = 1.0;
      for (auto v : e)
        for (int k = 2; k <= v; ++k) f *= k;
      lookup_[encode(tuple)] = static_cast<long>(degree_.size());
      degree_.push_back(static_cast<int>(tuple.size()));
      exponents_.push_back(e);
      factorial_.push_back(f);
      return;
    }
    for (int s = min_slot; s < vars_; ++s) {
      tuple[pos] = s;
      enumerate(tuple, pos + 1, s);
    }
  }

  std::size_t encode(std::span<const int> sorted) const {
    std::size_t code = 0, base = 1;
    for (int s : sorted) {
      code += static_cast<std::size_t>(s + 1) * base;
      base *= static_cast<std::size_t>(vars_ + 1);
    }
    return code;
  }
  std::size_t encode_exponents(const std::array<std::uint8_t, kMaxJetVars>& e) const {
    std::array<int, kMaxJetOrder> sorted{};
    std::size_t n = 0;
    for (int s = 0; s < vars_; ++s)
      for (int k = 0; k < e[static_cast<std::size_t>(s)]; ++k) sorted[n++] = s;
    return encode(std::span<const int>(sorted.data(), n));
  }

  int vars_;
  int order_;
  std::vector<int> degree_;
  std::vector<std::array<std::uint8_t, kMaxJetVars>> exponents_;
  std::vector<double> factorial_;
  std::vector<std::size_t> degree_begin_;
  std::vector<long> lookup_;
  std::vector<std::vector<long>> shift_;
  std::vector<Product> products_;
};

class Jet {
 public:
  Jet(int vars, int order) : layout_(JetLayout::get(vars, order)), c_(layout_->size(), 0.0) {}

  static Jet constant(double value, int vars, int order) {
    Jet j(vars, order);
    j.c_[0] = value;
    return j;
  }

  /// Jet of the coordinate function of 0-based `slot`.
  static Jet seed(int slot, double value, int vars, int order) {
    if (slot < 0 || slot >= vars) throw ContractError("seed: slot " + std::to_string(slot) + " out of range");
    Jet j = constant(value, vars, order);
    if (order >= 1) j.c_[1 + static_cast<std::size_t>(slot)] = 1.0;
    return j;
  }

  int vars() const { return layout_->vars(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }
  double value() const { return c_[0]; }

  /// Taylor coefficients in layout order.
  std::span<const double> coefficients() const { return c_; }
  std::span<double> coefficients() { return c_; }

  /// Mixed partial derivative along 0-based slots (any order, any repetition).
  double derivative(std::span<const int> slots) const {
    const std::size_t i = layout_->index_of(slots);
    return layout_->factorial(i) * c_[i];
  }
  double derivative(std::initializer_list<int> slots) const {
    return derivative(std::span<const int>(slots.begin(), slots.size()));
  }

  std::vector<double> gradient() const {
    if (order() < 1) throw ContractError("gradient: jet of order 0");
    return std::vector<double>(c_.begin() + 1, c_.begin() + 1 + vars());
  }

  /// Partial derivative along `slot` as a jet of one lower order.
  Jet partial(int slot) const {
    if (order() < 1) throw ContractError("partial: jet of order 0");
    if (slot < 0 || slot >= vars()) throw ContractError("partial: slot out of range");
    Jet out(vars(), order() - 1);
    for (std::size_t i = 0; i < out.c_.size(); ++i) {
      const long up = layout_->shifted(i, slot);
      out.c_[i] = (layout_->exponent(i, slot) + 1.0) * c_[static_cast<std::size_t>(up)];
    }
    return out;
  }

  Jet truncated(int order) const {
    if (order > this->order()) throw ContractError("truncated: cannot raise jet order");
    Jet out(vars(), order);
    std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
    return out;
  }

  /// Substitutes jets for the slots of this jet. `inner[j]` must be the
  /// expansion of slot j about this jet's expansion point; only its
  /// non-constant part is used. Result shares the inner jets' shape.
  Jet compose(std::span<const Jet> inner) const;

  Jet& operator+=(const Jet& o) {
    check_shape(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_shape(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  Jet operator-() const {
    Jet out = *this;
    out *= -1.0;
    return out;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return divide(a, b); }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }

  static Jet multiply(const Jet& a, const Jet& b) {
    a.check_shape(b);
    Jet out(a.vars(), a.order());
    for (const auto& p : a.layout_->products()) out.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
    return out;
  }

  /// Solves out * b = a degree by degree.
  static Jet divide(const Jet& a, const Jet& b) {
    a.check_shape(b);
    const double pivot = b.c_[0];
    if (!(std::abs(pivot) > 1e-300)) throw DomainError("jet division by zero value");
    Jet out(a.vars(), a.order());
    const auto& prods = a.layout_->products();
    std::size_t p = 0;
    for (std::size_t k = 0; k < out.c_.size(); ++k) {
      double acc = a.c_[k];
      for (; p < prods.size() && prods[p].out == k; ++p)
        if (prods[p].rhs != 0) acc -= out.c_[prods[p].lhs] * b.c_[prods[p].rhs];
      out.c_[k] = acc / pivot;
    }
    return out;
  }

  /// sum_k d[k]/k! * (this - value)^k, d[k] the k-th outer derivative at value().
  Jet compose_univariate(std::span<const double> d) const {
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out = constant(d[0], vars(), order());
    Jet power = constant(1.0, vars(), order());
    double fact = 1.0;
    for (int k = 1; k <= order(); ++k) {
      power = multiply(power, h);
      fact *= k;
      const double coef = d[static_cast<std::size_t>(k)] / fact;
      for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += coef * power.c_[i];
    }
    return out;
  }

 private:
  void check_shape(const Jet& o) const {
    if (o.vars() != vars() || o.order() != order())
      throw ContractError("jet shape mismatch: (" + std::to_string(vars()) + "," + std::to_string(order()) +
                          ") vs (" + std::to_string(o.vars()) + "," + std::to_string(o.order()) + ")");
  }

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
};

inline Jet Jet::compose(std::span<const Jet> inner) const {
  if (static_cast<int>(inner.size()) != vars()) throw ContractError("compose: need one inner jet per slot");
  const int m = inner.front().vars();
  const int k_out = inner.front().order();
  for (const Jet& g : inner)
    if (g.vars() != m || g.order() != k_out) throw ContractError("compose: inner jets differ in shape");
  if (k_out > order()) throw ContractError("compose: inner order exceeds outer order");

  std::vector<Jet> h;
  h.reserve(inner.size());
  for (const Jet& g : inner) {
    Jet d = g;
    d.c_[0] = 0.0;
    h.push_back(std::move(d));
  }
  // powers[i] = prod_j h_j^{beta_j} for monomial i; h has no constant term so
  // only degrees <= k_out contribute.
  const std::size_t used = layout_->count_up_to(k_out);
  std::vector<Jet> powers;
  powers.reserve(used);
  powers.push_back(constant(1.0, m, k_out));
  Jet out = constant(c_[0], m, k_out);
  for (std::size_t i = 1; i < used; ++i) {
    int first = 0;
    while (layout_->exponent(i, first) == 0) ++first;
    // monomial i = x_first * (monomial with one fewer x_first); find that index.
    std::array<int, kMaxJetOrder> slots{};
    std::size_t n = 0;
    for (int s = 0; s < vars(); ++s)
      for (int e = 0; e < layout_->exponent(i, s); ++e) slots[n++] = s;
    const std::size_t lower = layout_->index_of(std::span<const int>(slots.data() + 1, n - 1));
    powers.push_back(multiply(powers[lower], h[static_cast<std::size_t>(first)]));
    const double coef = c_[i];
    if (coef != 0.0)
      for (std::size_t q = 0; q < out.c_.size(); ++q) out.c_[q] += coef * powers.back().c_[q];
  }
  return out;
}

enum class BinaryOp { Add, Sub, Mul, Div };
enum class UnaryFn { Exp, Ln, Sin, Cos, Sqrt, PowConst };

inline Jet combine(BinaryOp op, const Jet& a, const Jet& b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return Jet::multiply(a, b);
    default: return Jet::divide(a, b);
  }
}

/// Outer function applied to a jet; `exponent` is used by PowConst only.
inline Jet apply_unary(UnaryFn fn, const Jet& a, double exponent = 1.0) {
  const double u = a.value();
  const int order = a.order();
  std::array<double, kMaxJetOrder + 1> d{};
  switch (fn) {
    case UnaryFn::Exp: d.fill(std::exp(u)); break;
    case UnaryFn::Ln: {
      if (!(u > 0.0)) throw DomainError("ln of non-positive jet value");
      double fact = 1.0;  // d^k ln(u) = (-1)^{k-1} (k-1)! / u^k
      d[0] = std::log(u);
      for (int k = 1; k <= order; ++k) {
        if (k > 1) fact *= (k - 1);
        d[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * fact / std::pow(u, k);
      }
      break;
    }
    case UnaryFn::Sin:
    case UnaryFn::Cos: {
      const double s = std::sin(u), c = std::cos(u);
      const std::array<double, 4> cycle = fn == UnaryFn::Sin ? std::array<double, 4>{s, c, -s, -c}
                                                             : std::array<double, 4>{c, -s, -c, s};
      for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k % 4)];
      break;
    }
    case UnaryFn::Sqrt:
      if (!(u > 0.0)) throw DomainError("sqrt of non-positive jet value");
      return apply_unary(UnaryFn::PowConst, a, 0.5);
    case UnaryFn::PowConst: {
      const bool integral = exponent == std::round(exponent);
      if (!integral && !(u > 0.0)) throw DomainError("non-integer power of non-positive jet value");
      if (integral && exponent < 0.0 && !(std::abs(u) > 1e-300)) throw DomainError("negative power of zero");
      double falling = 1.0;
      for (int k = 0; k <= order; ++k) {
        if (k > 0) falling *= (exponent - (k - 1));
        d[static_cast<std::size_t>(k)] = falling == 0.0 ? 0.0 : falling * std::pow(u, exponent - k);
      }
      break;
    }
  }
  return a.compose_univariate(d);
}

/// An active symbol of an expression: a variable (1-based) or a parameter
/// (0-based position in Expr::params()).
struct Symbol {
  enum class Kind { Variable, Parameter };
  Kind kind;
  int index;

  static Symbol variable(int i) { return {Kind::Variable, i}; }
  static Symbol parameter(int i) { return {Kind::Parameter, i}; }
  static Symbol parameter(const Expr& e, std::string_view name) {
    auto idx = e.param_index(name);
    if (!idx) throw ContractError("expression has no parameter '" + std::string(name) + "'");
    return {Kind::Parameter, *idx};
  }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

namespace detail {

struct JetAlgebra {
  std::span<const double> x;
  std::span<const double> p;
  std::vector<int> var_slot;    // by variable index (1-based); -1 = frozen
  std::vector<int> param_slot;  // by parameter index; -1 = frozen
  int vars;
  int order;

  Jet leaf(double v, int slot) const {
    return slot < 0 ? Jet::constant(v, vars, order) : Jet::seed(slot, v, vars, order);
  }
  Jet constant(double v) const { return Jet::constant(v, vars, order); }
  Jet variable(int i) const {
    return leaf(x[static_cast<std::size_t>(i - 1)], var_slot[static_cast<std::size_t>(i)]);
  }
  Jet parameter(int i) const { return leaf(p[static_cast<std::size_t>(i)], param_slot[static_cast<std::size_t>(i)]); }
  Jet add(const Jet& a, const Jet& b) const { return a + b; }
  Jet sub(const Jet& a, const Jet& b) const { return a - b; }
  Jet mul(const Jet& a, const Jet& b) const { return a * b; }
  Jet neg(const Jet& a) const { return -a; }
  Jet div(const Jet& a, const Jet& b, const Expr& e, const Node& n) const {
    try {
      return a / b;
    } catch (const DomainError&) {
      throw DomainError("division by zero in '" + e.subtree_str(n) + "'");
    }
  }
  Jet pow(const Jet& a, double exponent, const Expr& e, const Node& n) const {
    try {
      return apply_unary(UnaryFn::PowConst, a, exponent);
    } catch (const DomainError&) {
      throw DomainError("power out of domain in '" + e.subtree_str(n) + "'");
    }
  }
  Jet function(Op op, const Jet& a, const Expr& e, const Node& n) const {
    try {
      switch (op) {
        case Op::Exp: return apply_unary(UnaryFn::Exp, a);
        case Op::Ln: return apply_unary(UnaryFn::Ln, a);
        case Op::Sin: return apply_unary(UnaryFn::Sin, a);
        case Op::Cos: return apply_unary(UnaryFn::Cos, a);
        default: return apply_unary(UnaryFn::Sqrt, a);
      }
    } catch (const DomainError& err) {
      throw DomainError(std::string(err.what()) + " in '" + e.subtree_str(n) + "'");
    }
  }
};

}  // namespace detail

/// Jet of `expr` at (x, params) with respect to `active`; slot k of the
/// result is active[k]. Symbols not listed are held constant.
inline Jet eval_jet(const Expr& expr, std::span<const double> x, std::span<const double> params,
                    std::span<const Symbol> active, int order) {
  if (x.size() < static_cast<std::size_t>(expr.arity()) || params.size() < expr.params().size())
    throw ContractError("eval_jet: assignment does not cover every variable and parameter");
  if (active.empty()) throw ContractError("eval_jet: no active symbols");
  detail::JetAlgebra alg{x, params, std::vector<int>(static_cast<std::size_t>(expr.arity()) + 1, -1),
                         std::vector<int>(expr.params().size(), -1), static_cast<int>(active.size()), order};
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Symbol& s = active[k];
    if (s.kind == Symbol::Kind::Variable) {
      if (s.index < 1 || s.index > expr.arity()) throw ContractError("eval_jet: active variable out of range");
      alg.var_slot[static_cast<std::size_t>(s.index)] = static_cast<int>(k);
    } else {
      if (s.index < 0 || s.index >= static_cast<int>(expr.params().size()))
        throw ContractError("eval_jet: active parameter out of range");
      alg.param_slot[static_cast<std::size_t>(s.index)] = static_cast<int>(k);
    }
  }
  return fold<Jet>(expr, expr.root(), alg);
}

/// Jet with every variable x1..xn active, in order.
inline Jet eval_jet(const Expr& expr, std::span<const double> x, std::span<const double> params, int order) {
  std::vector<Symbol> active;
  for (int i = 1; i <= expr.arity(); ++i) active.push_back(Symbol::variable(i));
  return eval_jet(expr, x, params, active, order);
}

}  // namespace goursat

#endif  // GOURSAT_JETS_HPP
