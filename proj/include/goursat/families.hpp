#ifndef GOURSAT_FAMILIES_HPP
#define GOURSAT_FAMILIES_HPP

// Webs built from envelope families
//   first kind:  F = phi(x1, x2, x5.., a) + psi(x3, x4, x5.., a),  phi_a + psi_a = 0
//   second kind: F = phi(x1, x2, x6.., a, s), s = psi(x3, x4, x5, x6.., a),
//                phi_a + phi_s psi_a = 0
// The parameter a(x) is eliminated by Newton iteration at the base point and
// its jet is obtained by solving G(x, a(x)) = 0 order by order.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/expr.hpp"
#include "goursat/jets.hpp"
#include "goursat/web.hpp"

namespace goursat {

enum class FamilyKind { First, Second };

inline const char* to_string(FamilyKind k) { return k == FamilyKind::First ? "first" : "second"; }

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
  double min_slope = 1e-10;
  int max_halvings = 20;
};

struct NewtonResult {
  double a = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double slope = 0.0;
};

class FamilySpec {
 public:
  /// `phi` must declare exactly {param} (first kind) or {param, slot}
  /// (second kind); `psi` must declare exactly {param}.
  FamilySpec(FamilyKind kind, Expr phi, Expr psi, int arity, double a0, NewtonOptions newton = {},
             std::string param = "a", std::string slot = "s")
      : kind_(kind),
        phi_(std::move(phi)),
        psi_(std::move(psi)),
        arity_(arity),
        a0_(a0),
        newton_(newton),
        param_(std::move(param)),
        slot_(std::move(slot)) {
    validate();
  }

  static FamilySpec from_text(FamilyKind kind, std::string_view phi, std::string_view psi, int arity, double a0,
                              NewtonOptions newton = {}, const std::string& param = "a",
                              const std::string& slot = "s") {
    std::vector<std::string> phi_params{param};
    if (kind == FamilyKind::Second) phi_params.push_back(slot);
    return FamilySpec(kind, parse(phi, arity, phi_params), parse(psi, arity, {param}), arity, a0, newton, param,
                      slot);
  }

  FamilyKind kind() const { return kind_; }
  const Expr& phi() const { return phi_; }
  const Expr& psi() const { return psi_; }
  int arity() const { return arity_; }
  double a0() const { return a0_; }
  const NewtonOptions& newton() const { return newton_; }
  const std::string& param() const { return param_; }
  const std::string& slot() const { return slot_; }

  /// Parameter vector for phi in its declared order.
  std::vector<double> phi_params(double a, double s = 0.0) const {
    std::vector<double> p(phi_.params().size());
    p[static_cast<std::size_t>(phi_a_)] = a;
    if (kind_ == FamilyKind::Second) p[static_cast<std::size_t>(phi_s_)] = s;
    return p;
  }
  Symbol phi_param_symbol() const { return Symbol::parameter(phi_a_); }
  Symbol phi_slot_symbol() const { return Symbol::parameter(phi_s_); }
  Symbol psi_param_symbol() const { return Symbol::parameter(0); }

 private:
  void validate() {
    const int min_arity = kind_ == FamilyKind::First ? 4 : 5;
    if (arity_ < min_arity)
      throw ContractError(std::string(to_string(kind_)) + "-kind family needs n >= " + std::to_string(min_arity));
    if (phi_.arity() != arity_ || psi_.arity() != arity_)
      throw ContractError("phi and psi must be declared over x1..x" + std::to_string(arity_));

    std::set<std::string> want_phi{param_};
    if (kind_ == FamilyKind::Second) want_phi.insert(slot_);
    const auto& pp = phi_.params();
    if (std::set<std::string>(pp.begin(), pp.end()) != want_phi || pp.size() != want_phi.size())
      throw ContractError("phi must declare exactly the family parameters");
    if (psi_.params() != std::vector<std::string>{param_})
      throw ContractError("psi must declare exactly the parameter '" + param_ + "'");
    phi_a_ = *phi_.param_index(param_);
    if (kind_ == FamilyKind::Second) phi_s_ = *phi_.param_index(slot_);

    std::set<int> phi_vars{1, 2}, psi_vars{3, 4};
    const int shared_from = kind_ == FamilyKind::First ? 5 : 6;
    if (kind_ == FamilyKind::Second) psi_vars.insert(5);
    for (int i = shared_from; i <= arity_; ++i) {
      phi_vars.insert(i);
      psi_vars.insert(i);
    }
    for (int v : phi_.variables_used())
      if (!phi_vars.count(v)) throw ContractError("phi may not depend on x" + std::to_string(v));
    for (int v : psi_.variables_used())
      if (!psi_vars.count(v)) throw ContractError("psi may not depend on x" + std::to_string(v));
  }

  FamilyKind kind_;
  Expr phi_;
  Expr psi_;
  int arity_;
  double a0_;
  NewtonOptions newton_;
  std::string param_;
  std::string slot_;
  int phi_a_ = -1;
  int phi_s_ = -1;
};

namespace detail {

/// Jet in the single slot a of Phi(a) = phi + psi or phi(.., a, psi(.., a)).
inline Jet envelope_jet_in_a(const FamilySpec& spec, const Point& p, double a, int order) {
  const std::vector<double> psi_p{a};
  const Symbol a_only[] = {spec.psi_param_symbol()};
  const Jet psi = eval_jet(spec.psi(), p.coords(), psi_p, a_only, order);
  if (spec.kind() == FamilyKind::First) {
    const Symbol phi_a[] = {spec.phi_param_symbol()};
    return eval_jet(spec.phi(), p.coords(), spec.phi_params(a), phi_a, order) + psi;
  }
  const Symbol phi_as[] = {spec.phi_param_symbol(), spec.phi_slot_symbol()};
  const Jet phi = eval_jet(spec.phi(), p.coords(), spec.phi_params(a, psi.value()), phi_as, order);
  const Jet inner[] = {Jet::seed(0, a, 1, order), psi};
  return phi.compose(inner);
}

/// Jet of Phi(x, a) in slots (x1..xn, a).
inline Jet envelope_jet_joint(const FamilySpec& spec, const Point& p, double a, int order) {
  const int n = spec.arity();
  std::vector<Symbol> xa;
  for (int i = 1; i <= n; ++i) xa.push_back(Symbol::variable(i));
  std::vector<Symbol> psi_active = xa;
  psi_active.push_back(spec.psi_param_symbol());
  const std::vector<double> psi_p{a};
  const Jet psi = eval_jet(spec.psi(), p.coords(), psi_p, psi_active, order);
  if (spec.kind() == FamilyKind::First) {
    std::vector<Symbol> phi_active = xa;
    phi_active.push_back(spec.phi_param_symbol());
    return eval_jet(spec.phi(), p.coords(), spec.phi_params(a), phi_active, order) + psi;
  }
  std::vector<Symbol> phi_active = xa;
  phi_active.push_back(spec.phi_param_symbol());
  phi_active.push_back(spec.phi_slot_symbol());
  const Jet phi = eval_jet(spec.phi(), p.coords(), spec.phi_params(a, psi.value()), phi_active, order);
  std::vector<Jet> inner;
  for (int i = 0; i < n; ++i) inner.push_back(Jet::seed(i, p[static_cast<std::size_t>(i)], n + 1, order));
  inner.push_back(Jet::seed(n, a, n + 1, order));
  inner.push_back(psi);
  return phi.compose(inner);
}

}  // namespace detail

/// G(p, a): phi_a + psi_a (first kind) or phi_a + phi_s psi_a (second kind).
inline double constraint(const FamilySpec& spec, const Point& p, double a) {
  return detail::envelope_jet_in_a(spec, p, a, 1).derivative({0});
}

/// Newton iteration with step halving on |G|, starting from `start`.
inline NewtonResult solve_parameter(const FamilySpec& spec, const Point& p, double start) {
  const NewtonOptions& opt = spec.newton();
  double a = start;
  auto eval = [&](double at) {
    const Jet j = detail::envelope_jet_in_a(spec, p, at, 2);
    return std::pair<double, double>{j.derivative({0}), j.derivative({0, 0})};
  };
  auto [g, slope] = eval(a);
  for (int it = 0; it <= opt.max_iter; ++it) {
    if (!std::isfinite(g) || !std::isfinite(slope)) throw NoConvergence("non-finite envelope constraint");
    if (std::abs(slope) < opt.min_slope)
      throw SingularEnvelope("envelope constraint has slope " + std::to_string(slope) + " in the parameter");
    if (std::abs(g) <= opt.tol) return NewtonResult{a, it, g, slope};
    if (it == opt.max_iter) break;
    const double step = -g / slope;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings && !accepted; ++h, lambda *= 0.5) {
      const double cand = a + lambda * step;
      try {
        auto [gc, sc] = eval(cand);
        if (std::isfinite(gc) && std::abs(gc) < std::abs(g)) {
          a = cand;
          g = gc;
          slope = sc;
          accepted = true;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted) throw NoConvergence("line search failed to reduce |G| at a = " + std::to_string(a));
  }
  throw NoConvergence("Newton iterations exhausted (|G| = " + std::to_string(std::abs(g)) + ")");
}

inline NewtonResult solve_parameter(const FamilySpec& spec, const Point& p) {
  return solve_parameter(spec, p, spec.a0());
}

/// Order-K jet of F(x) = Phi(x, a(x)) at p, given the root a* at p.
inline Jet family_jet(const FamilySpec& spec, const Point& p, double root, int order) {
  if (order == 0) return family_jet(spec, p, root, 1).truncated(0);
  const int n = spec.arity();
  const Jet phi_joint = detail::envelope_jet_joint(spec, p, root, order + 1);
  const Jet g = phi_joint.partial(n);  // order K in (x, a)
  const double pivot = phi_joint.derivative({n, n});
  if (std::abs(pivot) < spec.newton().min_slope) throw SingularEnvelope("envelope constraint is singular at the root");

  std::vector<Jet> inner;
  for (int i = 0; i < n; ++i) inner.push_back(Jet::seed(i, p[static_cast<std::size_t>(i)], n, order));
  inner.push_back(Jet::constant(root, n, order));
  // Each pass fixes one more order of a(x) - a*.
  for (int pass = 0; pass <= order; ++pass) {
    Jet residual = g.compose(inner);
    residual *= -1.0 / pivot;
    Jet& a_jet = inner.back();
    a_jet += residual;
    a_jet.coefficients()[0] = root;
  }
  return phi_joint.compose(inner);
}

namespace detail {

// Per-point roots plus the last solved root as the warm start for the next
// point. Results for a point never change once cached.
struct RootCache {
  std::mutex mutex;
  std::map<std::vector<double>, double> roots;
  std::optional<double> last;
};

}  // namespace detail

/// WebFunction evaluating F through the family (jets up to order 3).
inline WebFunction family_web(const FamilySpec& spec) {
  auto cache = std::make_shared<detail::RootCache>();
  auto eval = [spec, cache](const Point& p, int order) {
    double root = 0.0;
    {
      std::lock_guard<std::mutex> lock(cache->mutex);
      auto it = cache->roots.find(p.vector());
      if (it != cache->roots.end()) {
        root = it->second;
      } else {
        NewtonResult r;
        if (cache->last) {
          try {
            r = solve_parameter(spec, p, *cache->last);
          } catch (const Error&) {
            r = solve_parameter(spec, p, spec.a0());
          }
        } else {
          r = solve_parameter(spec, p, spec.a0());
        }
        root = r.a;
        if (cache->roots.size() > (1u << 16)) cache->roots.clear();
        cache->roots.emplace(p.vector(), root);
        cache->last = root;
      }
    }
    return family_jet(spec, p, root, order);
  };
  std::string desc = std::string(to_string(spec.kind())) + "-kind family: phi = " + spec.phi().str() +
                     "; psi = " + spec.psi().str();
  return WebFunction(spec.arity(), eval, Provenance::Family, desc, 3);
}

}  // namespace goursat

#endif  // GOURSAT_FAMILIES_HPP
