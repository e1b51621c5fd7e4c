#ifndef GOURSAT_EXPR_HPP
#define GOURSAT_EXPR_HPP

// Expression trees for defining functions F, phi, psi over variables
// x1..xn and named parameters.
//
// Grammar (whitespace-insensitive):
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := ['-' | '+'] number | '(' expr ')'      (must be constant)
//   primary  := number | ident | func '(' expr ')' | '(' expr ')'
// Identifiers of the form x<digits> are variables; exp, ln, sin, cos, sqrt
// are functions; every other identifier must be a declared parameter.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "goursat/error.hpp"

namespace goursat {

enum class Op { Constant, Variable, Parameter, Add, Sub, Mul, Div, Pow, Neg, Exp, Ln, Sin, Cos, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Constant;
  double value = 0.0;  // constant value, or exponent for Pow
  int index = 0;       // variable: 1-based; parameter: 0-based into Expr::params()
  NodePtr lhs;         // single child of unary nodes
  NodePtr rhs;

  static NodePtr constant(double v) { return std::make_shared<Node>(Node{Op::Constant, v, 0, nullptr, nullptr}); }
  static NodePtr variable(int i) { return std::make_shared<Node>(Node{Op::Variable, 0.0, i, nullptr, nullptr}); }
  static NodePtr parameter(int i) { return std::make_shared<Node>(Node{Op::Parameter, 0.0, i, nullptr, nullptr}); }
  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    return std::make_shared<Node>(Node{op, 0.0, 0, std::move(a), std::move(b)});
  }
  static NodePtr unary(Op op, NodePtr a) { return std::make_shared<Node>(Node{op, 0.0, 0, std::move(a), nullptr}); }
  static NodePtr power(NodePtr base, double exponent) {
    return std::make_shared<Node>(Node{Op::Pow, exponent, 0, std::move(base), nullptr});
  }
};

inline bool is_binary(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div; }
inline bool is_function(Op op) {
  return op == Op::Exp || op == Op::Ln || op == Op::Sin || op == Op::Cos || op == Op::Sqrt;
}

inline const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

inline std::optional<Op> function_from_name(std::string_view name) {
  for (Op op : {Op::Exp, Op::Ln, Op::Sin, Op::Cos, Op::Sqrt})
    if (name == function_name(op)) return op;
  return std::nullopt;
}

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Constant: return a.value == b.value;
    case Op::Variable:
    case Op::Parameter: return a.index == b.index;
    case Op::Pow: return a.value == b.value && structurally_equal(*a.lhs, *b.lhs);
    default:
      if (is_binary(a.op)) return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
      return structurally_equal(*a.lhs, *b.lhs);
  }
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Binding strength used by the printer: higher binds tighter.
inline int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Constant: return std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

inline void print_node(const Node& n, const std::vector<std::string>& params, std::string& out) {
  auto wrapped = [&](const Node& child, bool parens) {
    if (parens) out += '(';
    print_node(child, params, out);
    if (parens) out += ')';
  };
  switch (n.op) {
    case Op::Constant: out += format_number(n.value); return;
    case Op::Variable: out += "x" + std::to_string(n.index); return;
    case Op::Parameter: out += params.at(static_cast<std::size_t>(n.index)); return;
    case Op::Neg:
      out += '-';
      wrapped(*n.lhs, n.lhs->op == Op::Constant || precedence(*n.lhs) < 3);
      return;
    case Op::Pow:
      wrapped(*n.lhs, precedence(*n.lhs) < 5);
      out += '^';
      out += format_number(n.value);
      return;
    default: break;
  }
  if (is_function(n.op)) {
    out += function_name(n.op);
    wrapped(*n.lhs, true);
    return;
  }
  const int p = precedence(n);
  wrapped(*n.lhs, precedence(*n.lhs) < p);
  switch (n.op) {
    case Op::Add: out += " + "; break;
    case Op::Sub: out += " - "; break;
    case Op::Mul: out += '*'; break;
    default: out += '/'; break;
  }
  // Left association: an equal-precedence right operand needs parentheses.
  wrapped(*n.rhs, precedence(*n.rhs) <= p);
}

}  // namespace detail

/// Immutable expression with its arity and declared parameter names.
class Expr {
 public:
  Expr(NodePtr root, int arity, std::vector<std::string> params)
      : root_(std::move(root)), arity_(arity), params_(std::move(params)) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int arity() const { return arity_; }
  const std::vector<std::string>& params() const { return params_; }

  std::optional<int> param_index(std::string_view name) const {
    auto it = std::find(params_.begin(), params_.end(), name);
    if (it == params_.end()) return std::nullopt;
    return static_cast<int>(it - params_.begin());
  }

  /// 1-based indices of variables that occur in the tree.
  std::set<int> variables_used() const {
    std::set<int> out;
    collect(*root_, Op::Variable, out);
    return out;
  }
  /// Names of parameters that occur in the tree.
  std::set<std::string> params_used() const {
    std::set<int> idx;
    collect(*root_, Op::Parameter, idx);
    std::set<std::string> out;
    for (int i : idx) out.insert(params_[static_cast<std::size_t>(i)]);
    return out;
  }

  std::string str() const { return subtree_str(*root_); }
  std::string subtree_str(const Node& n) const {
    std::string s;
    detail::print_node(n, params_, s);
    return s;
  }

  double evaluate(std::span<const double> x, std::span<const double> params) const;
  double evaluate(std::span<const double> x, const std::map<std::string, double>& params = {}) const;

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.arity_ == b.arity_ && a.params_ == b.params_ && structurally_equal(*a.root_, *b.root_);
  }

 private:
  static void collect(const Node& n, Op kind, std::set<int>& out) {
    if (n.op == kind) out.insert(n.index);
    if (n.lhs) collect(*n.lhs, kind, out);
    if (n.rhs) collect(*n.rhs, kind, out);
  }

  NodePtr root_;
  int arity_;
  std::vector<std::string> params_;
};

/// Folds a tree bottom-up. `Algebra` supplies constant/variable/parameter
/// leaves and add/sub/mul/div/neg/pow/function combinators over `Value`.
/// Shared by the scalar evaluator and the jet evaluator.
template <class Value, class Algebra>
Value fold(const Expr& e, const Node& n, Algebra& alg) {
  switch (n.op) {
    case Op::Constant: return alg.constant(n.value);
    case Op::Variable: return alg.variable(n.index);
    case Op::Parameter: return alg.parameter(n.index);
    case Op::Add: return alg.add(fold<Value>(e, *n.lhs, alg), fold<Value>(e, *n.rhs, alg));
    case Op::Sub: return alg.sub(fold<Value>(e, *n.lhs, alg), fold<Value>(e, *n.rhs, alg));
    case Op::Mul: return alg.mul(fold<Value>(e, *n.lhs, alg), fold<Value>(e, *n.rhs, alg));
    case Op::Div: {
      Value num = fold<Value>(e, *n.lhs, alg);
      Value den = fold<Value>(e, *n.rhs, alg);
      return alg.div(std::move(num), std::move(den), e, n);
    }
    case Op::Neg: return alg.neg(fold<Value>(e, *n.lhs, alg));
    case Op::Pow: return alg.pow(fold<Value>(e, *n.lhs, alg), n.value, e, n);
    default: return alg.function(n.op, fold<Value>(e, *n.lhs, alg), e, n);
  }
}

namespace detail {

struct ScalarAlgebra {
  std::span<const double> x;
  std::span<const double> p;

  double constant(double v) const { return v; }
  double variable(int i) const { return x[static_cast<std::size_t>(i - 1)]; }
  double parameter(int i) const { return p[static_cast<std::size_t>(i)]; }
  double add(double a, double b) const { return a + b; }
  double sub(double a, double b) const { return a - b; }
  double mul(double a, double b) const { return a * b; }
  double neg(double a) const { return -a; }
  double div(double a, double b, const Expr& e, const Node& n) const {
    if (b == 0.0) throw DomainError("division by zero in '" + e.subtree_str(n) + "'");
    return a / b;
  }
  double pow(double base, double exponent, const Expr& e, const Node& n) const {
    const bool integral = exponent == std::round(exponent);
    if ((base < 0.0 && !integral) || (base == 0.0 && exponent < 0.0))
      throw DomainError("power out of domain in '" + e.subtree_str(n) + "'");
    return std::pow(base, exponent);
  }
  double function(Op op, double a, const Expr& e, const Node& n) const {
    switch (op) {
      case Op::Exp: return std::exp(a);
      case Op::Ln:
        if (!(a > 0.0)) throw DomainError("ln of non-positive argument in '" + e.subtree_str(n) + "'");
        return std::log(a);
      case Op::Sin: return std::sin(a);
      case Op::Cos: return std::cos(a);
      default:
        if (!(a >= 0.0)) throw DomainError("sqrt of negative argument in '" + e.subtree_str(n) + "'");
        return std::sqrt(a);
    }
  }
};

class Parser {
 public:
  Parser(std::string_view text, int arity, const std::vector<std::string>& params)
      : text_(text), arity_(arity), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail_syntax("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail_syntax(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool at_number() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return (c >= '0' && c <= '9') || c == '.';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = Node::binary(Op::Add, lhs, term());
      else if (eat('-')) lhs = Node::binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = Node::binary(Op::Mul, lhs, unary());
      else if (eat('/')) lhs = Node::binary(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) {
      // A bare literal after unary minus becomes a negative constant, unless
      // it is the base of a power (-2^2 is -(2^2)).
      if (at_number()) {
        const std::size_t save = pos_;
        double v = number();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '^') return Node::constant(-v);
        pos_ = save;
      }
      return Node::unary(Op::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!eat('^')) return base;
    double exponent = 0.0;
    skip_ws();
    if (eat('(')) {
      const std::size_t start = pos_;
      NodePtr e = expr();
      if (!eat(')')) fail_syntax("expected ')'");
      std::optional<double> v = constant_value(*e);
      if (!v) throw ParseError(ParseError::Kind::Syntax, start, "syntax error: exponent must be constant");
      exponent = *v;
    } else {
      double sign = 1.0;
      if (eat('-')) sign = -1.0;
      else eat('+');
      if (!at_number()) fail_syntax("exponent must be a numeric literal");
      exponent = sign * number();
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') fail_syntax("chained powers need parentheses");
    return Node::power(base, exponent);
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail_syntax("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail_syntax("expected ')'");
      return e;
    }
    if (at_number()) return Node::constant(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail_syntax("unexpected '" + std::string(1, c) + "'");
  }

  double number() {
    skip_ws();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail_syntax("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (auto fn = function_from_name(name)) {
      if (!eat('(')) fail_syntax("expected '(' after " + std::string(name));
      NodePtr arg = expr();
      if (!eat(')')) fail_syntax("expected ')'");
      return Node::unary(*fn, arg);
    }
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      long idx = std::stol(std::string(name.substr(1)));
      if (idx < 1 || idx > arity_)
        throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                         "variable " + std::string(name) + " outside x1..x" + std::to_string(arity_));
      return Node::variable(static_cast<int>(idx));
    }
    auto it = std::find(params_.begin(), params_.end(), name);
    if (it == params_.end())
      throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + std::string(name) + "'");
    return Node::parameter(static_cast<int>(it - params_.begin()));
  }

  static std::optional<double> constant_value(const Node& n) {
    switch (n.op) {
      case Op::Constant: return n.value;
      case Op::Variable:
      case Op::Parameter: return std::nullopt;
      default: break;
    }
    if (n.op == Op::Neg || n.op == Op::Pow || is_function(n.op)) {
      auto a = constant_value(*n.lhs);
      if (!a) return std::nullopt;
      Expr dummy(std::make_shared<Node>(n), 0, {});
      return dummy.evaluate(std::span<const double>{}, std::span<const double>{});
    }
    auto a = constant_value(*n.lhs);
    auto b = constant_value(*n.rhs);
    if (!a || !b) return std::nullopt;
    Expr dummy(std::make_shared<Node>(n), 0, {});
    return dummy.evaluate(std::span<const double>{}, std::span<const double>{});
  }

  std::string_view text_;
  int arity_;
  const std::vector<std::string>& params_;
  std::size_t pos_ = 0;
};

inline bool valid_param_name(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  if (!std::all_of(name.begin(), name.end(),
                   [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
    return false;
  if (function_from_name(name)) return false;
  const bool var_like = name.size() > 1 && name[0] == 'x' &&
                        std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; });
  return !var_like;
}

}  // namespace detail

inline double Expr::evaluate(std::span<const double> x, std::span<const double> params) const {
  if (x.size() < static_cast<std::size_t>(arity_) || params.size() < params_.size())
    throw ContractError("evaluate: assignment does not cover every variable and parameter");
  detail::ScalarAlgebra alg{x, params};
  return fold<double>(*this, *root_, alg);
}

inline double Expr::evaluate(std::span<const double> x, const std::map<std::string, double>& params) const {
  std::vector<double> p(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto it = params.find(params_[i]);
    if (it == params.end()) throw ContractError("evaluate: no value for parameter '" + params_[i] + "'");
    p[i] = it->second;
  }
  return evaluate(x, std::span<const double>(p));
}

/// Parses `text` over variables x1..x<arity> and the declared parameters.
inline Expr parse(std::string_view text, int arity, std::vector<std::string> params = {}) {
  if (arity < 1) throw ContractError("parse: arity must be positive");
  for (const auto& p : params)
    if (!detail::valid_param_name(p))
      throw ParseError(ParseError::Kind::InvalidName, 0, "invalid parameter name '" + p + "'");
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(ParseError::Kind::Syntax, 0, "syntax error: empty expression");
  detail::Parser parser(text, arity, params);
  NodePtr root = parser.parse();
  return Expr(std::move(root), arity, std::move(params));
}

/// Canonical text: minimal parentheses, shortest round-trip numerals.
inline std::string print(const Expr& e) { return e.str(); }

}  // namespace goursat

#endif  // GOURSAT_EXPR_HPP
