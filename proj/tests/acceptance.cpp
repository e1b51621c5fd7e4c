// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "goursat/goursat.hpp"

using namespace goursat;
namespace gs = gtest_support;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Collects the worst observed value against a bound plus any hard violations.
class Tally {
 public:
  void worst(const std::string& what, double v) {
    auto it = std::find_if(worst_.begin(), worst_.end(), [&](const auto& p) { return p.first == what; });
    if (it == worst_.end())
      worst_.emplace_back(what, v);
    else
      it->second = std::max(it->second, v);
  }
  void require(bool ok, const std::string& what) {
    if (!ok && passed_) first_violation_ = what;
    passed_ = passed_ && ok;
  }
  Outcome outcome() const {
    std::ostringstream s;
    s.precision(3);
    for (std::size_t i = 0; i < worst_.size(); ++i) s << (i ? ", " : "") << worst_[i].first << " " << worst_[i].second;
    if (!passed_) s << (worst_.empty() ? "" : "; ") << "first violation: " << first_violation_;
    return {passed_, s.str()};
  }

 private:
  std::vector<std::pair<std::string, double>> worst_;
  bool passed_ = true;
  std::string first_violation_;
};

std::vector<Point> regular(const WebFunction& f, int count, std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
  return sample_regular_points(f, Box::uniform(f.arity(), lo, hi), count, seed, 3).points;
}

TorsionTensor random_torsion(gs::Rng& rng, int n) {
  TorsionTensor t(n);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) t.set(a, b, gs::uniform(rng, -2, 2));
  return t;
}

TorsionSample constrained(gs::Rng& rng) {
  for (;;) {
    TorsionSample s = sample_torsion(rng, true);
    if (s.ok) return s;
  }
}

Gauge random_gauge(gs::Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& v : w) v = gs::uniform(rng, -2, 2);
  return Gauge{w};
}

// Ridders' extrapolated central difference along coordinate s. A single
// fixed step is not enough for the steep expressions the generator emits,
// so several starting steps are tried.
// Returns {estimate, error estimate} for initial step h.
std::pair<double, double> ridders(const std::function<double(std::span<const double>)>& f,
                                  const std::vector<double>& x, int s, double h) {
  constexpr int kTable = 10;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink;
  double best = 0.0, err = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> a(kTable, std::vector<double>(kTable));
  auto central = [&](double step) {
    std::vector<double> xp = x, xm = x;
    xp[static_cast<std::size_t>(s)] += step;
    xm[static_cast<std::size_t>(s)] -= step;
    return (f(xp) - f(xm)) / (2 * step);
  };
  a[0][0] = central(h);
  for (int i = 1; i < kTable; ++i) {
    h /= kShrink;
    a[0][static_cast<std::size_t>(i)] = central(h);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      const auto I = static_cast<std::size_t>(i), J = static_cast<std::size_t>(j);
      a[J][I] = (a[J - 1][I] * fac - a[J - 1][I - 1]) / (fac - 1);
      fac *= kShrink2;
      const double e = std::max(std::abs(a[J][I] - a[J - 1][I]), std::abs(a[J][I] - a[J - 1][I - 1]));
      if (e <= err) err = e, best = a[J][I];
    }
    const auto I = static_cast<std::size_t>(i);
    if (std::abs(a[I][I] - a[I - 1][I - 1]) >= 2 * err) break;
  }
  return {best, err};
}

double fd_derivative(const std::function<double(std::span<const double>)>& f, const std::vector<double>& x, int s) {
  std::pair<double, double> best{0.0, std::numeric_limits<double>::infinity()};
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto r = ridders(f, x, s, h);
    if (r.second < best.second) best = r;
  }
  return best.first;
}

Outcome determinant_forms() {
  Tally t;
  gs::Rng rng(101);
  for (int k = 0; k < 10000; ++k) {
    const SecondKindResiduals r = second_kind_residuals(random_torsion(rng, 5 + k % 2));
    const double d1 = std::abs(r.sum25 - r.det24) / r.scale, d2 = std::abs(r.expr26 - 2 * r.det24) / r.scale;
    t.worst("|sum25-det24|/scale", d1);
    t.worst("|expr26-2det24|/scale", d2);
    t.require(d1 <= 1e-12 && d2 <= 1e-12, "sample " + std::to_string(k));
  }
  return t.outcome();
}

Outcome first_kind_soundness() {
  Tally t;
  gs::Rng rng(202);
  for (int spec = 0; spec < 25; ++spec) {
    const int n = 4 + spec % 2;
    const WebFunction f = family_web(gs::random_first_kind(rng, n));
    for (const Point& p : regular(f, 10, 300 + static_cast<std::uint64_t>(spec))) {
      const double torsion_rel = first_kind_residual(torsion(f, p)).relative();
      const double pde_rel = first_kind_pde_residual(f, p).relative();
      t.worst("torsion", torsion_rel);
      t.worst("pde", pde_rel);
      t.require(torsion_rel <= 1e-8 && pde_rel <= 1e-8, "spec " + std::to_string(spec));
    }
  }
  return t.outcome();
}

Outcome second_kind_soundness() {
  Tally t;
  gs::Rng rng(303);
  for (int spec = 0; spec < 25; ++spec) {
    const int n = 5 + spec % 2;
    const WebFunction f = family_web(gs::random_second_kind(rng, n));
    for (const Point& p : regular(f, 10, 400 + static_cast<std::uint64_t>(spec))) {
      const double torsion_rel = second_kind_residuals(torsion(f, p)).relative();
      const double pde_rel = second_kind_pde_residual(f, p).relative();
      t.worst("torsion", torsion_rel);
      t.worst("pde", pde_rel);
      t.require(torsion_rel <= 1e-8 && pde_rel <= 1e-8, "spec " + std::to_string(spec));
    }
  }
  return t.outcome();
}

Outcome closed_forms() {
  Tally t;
  gs::Rng rng(404);
  const WebFunction first = family_web(
      FamilySpec::from_text(FamilyKind::First, "a*(x1+x2) + a^2/2", "a*(x3+x4) - a^2", 4, 0.0));
  const WebFunction second = family_web(
      FamilySpec::from_text(FamilyKind::Second, "a*(x1+x2) + s^2/2", "a + x3 + x4 + x5", 5, 0.0));
  for (int k = 0; k < 10; ++k) {
    // F = s^2/2, s = x1 + ... + x4
    std::vector<double> x(4);
    for (double& v : x) v = gs::uniform(rng, 0.2, 2.0);
    Jet j = first.jet(Point(x), 2);
    const double s = x[0] + x[1] + x[2] + x[3];
    double err = std::abs(j.value() - s * s / 2);
    for (int a = 0; a < 4; ++a) {
      err = std::max(err, std::abs(j.derivative({a}) - s));
      for (int b = 0; b < 4; ++b) err = std::max(err, std::abs(j.derivative({a, b}) - 1.0));
    }
    t.worst("first", err);
    t.require(err <= 1e-10, "first-kind point " + std::to_string(k));

    // F = -u^2/2 - u v, u = x1 + x2, v = x3 + x4 + x5
    std::vector<double> y(5);
    for (double& v : y) v = gs::uniform(rng, 0.2, 2.0);
    j = second.jet(Point(y), 2);
    const double u = y[0] + y[1], v = y[2] + y[3] + y[4];
    err = std::abs(j.value() - (-u * u / 2 - u * v));
    for (int a = 0; a < 5; ++a) {
      err = std::max(err, std::abs(j.derivative({a}) - (a < 2 ? -u - v : -u)));
      for (int b = 0; b < 5; ++b) err = std::max(err, std::abs(j.derivative({a, b}) - ((a < 2 || b < 2) ? -1.0 : 0.0)));
    }
    t.worst("second", err);
    t.require(err <= 1e-10, "second-kind point " + std::to_string(k));
  }
  return t.outcome();
}

Outcome theta_rho() {
  Tally t;
  gs::Rng rng(505);
  for (int spec = 0; spec < 9; ++spec) {
    const int n = 4 + spec % 3;
    const WebFunction f = family_web(gs::random_first_kind(rng, n));
    const PfaffianSystem sys = make_system(f, SystemTag::THETA_RHO);
    for (const Point& p : regular(f, 10, 500 + static_cast<std::uint64_t>(spec))) {
      const FrobeniusReport r = frobenius_residual(sys, p);
      t.worst("THETA_RHO", r.max_residual);
      t.require(r.max_residual <= 1e-7, "THETA_RHO spec " + std::to_string(spec));
    }
  }
  for (int n : {4, 5, 6}) {
    const WebFunction f = gs::control_web(n);
    const PfaffianSystem sys = make_system(f, SystemTag::S10);
    int hits = 0, total = 0;
    for (const Point& p : regular(f, 40, 550 + static_cast<std::uint64_t>(n))) {
      ++total;
      hits += frobenius_residual(sys, p).max_residual >= 1e-3;
    }
    t.worst("S10 control miss fraction", 1.0 - double(hits) / total);
    t.require(10 * hits >= 9 * total, "S10 control n=" + std::to_string(n));
  }
  return t.outcome();
}

Outcome dimensions() {
  Tally t;
  gs::Rng rng(606);
  int special = 0, generic = 0;
  auto check_union = [&](const WebFunction& f, std::uint64_t seed) {
    const PfaffianSystem both = make_system(f, SystemTag::S10_11);
    for (const Point& p : regular(f, 8, seed)) {
      const bool first = first_kind_residual(torsion(f, p)).relative() < 1e-7;
      const int k = rank_at(both, p).kernel_dim;
      (first ? special : generic) += 1;
      t.require((k == 3) == first, "S10_11 kernel " + std::to_string(k) + (first ? " on first kind" : " off first kind"));
    }
  };
  for (int spec = 0; spec < 6; ++spec) check_union(family_web(gs::random_first_kind(rng, 5 + spec % 2)), 610);
  for (int n : {5, 6}) check_union(gs::control_web(n), 620);
  check_union(WebFunction::from_expr(parse("x1*x3 + x2*x4 + x1*x4 + x5^2/2 + x2*x5", 5)), 630);
  t.require(special > 0 && generic > 0, "both branches exercised");

  for (int spec = 0; spec < 6; ++spec) {
    const WebFunction f = family_web(gs::random_second_kind(rng, 5 + spec % 2));
    const PfaffianSystem d2 = make_system(f, SystemTag::DELTA2), d3 = make_system(f, SystemTag::DELTA3);
    for (const Point& p : regular(f, 8, 640 + static_cast<std::uint64_t>(spec))) {
      t.require(rank_at(d2, p).kernel_dim == 2, "DELTA2 on second kind");
      t.require(rank_at(d3, p).kernel_dim == 3, "DELTA3 on second kind");
    }
  }
  for (int n : {5, 6}) {
    const WebFunction f = gs::control_web(n);
    const PfaffianSystem d2 = make_system(f, SystemTag::DELTA2), d3 = make_system(f, SystemTag::DELTA3);
    for (const Point& p : regular(f, 8, 650)) {
      t.require(rank_at(d2, p).kernel_dim == 1, "DELTA2 on control");
      t.require(rank_at(d3, p).kernel_dim == 2, "DELTA3 on control");
    }
  }
  Outcome o = t.outcome();
  o.detail = std::to_string(special) + " first-kind / " + std::to_string(generic) + " other points" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome lemma1() {
  Tally t;
  gs::Rng rng(707);
  for (int spec = 0; spec < 9; ++spec) {
    const int n = 4 + spec % 3;
    const WebFunction f = family_web(gs::random_first_kind(rng, n));
    for (const Point& p : regular(f, 5, 700 + static_cast<std::uint64_t>(spec))) {
      const TorsionTensor tor = torsion(f, p);
      const auto r0 = lemma1_residuals(tor, pfaffian_derivs(f, p, Gauge::zero(n)));
      for (const Residual& r : r0) {
        t.worst("gauge 0", r.relative());
        t.require(std::abs(r.value) <= 1e-7 * std::max(r.scale, kScaleFloor), "gauge 0 spec " + std::to_string(spec));
      }
      for (int g = 0; g < 5; ++g) {
        const auto rg = lemma1_residuals(tor, pfaffian_derivs(f, p, random_gauge(rng, n)));
        for (std::size_t c = 0; c < r0.size(); ++c) {
          const double diff = std::abs(rg[c].value - r0[c].value) / std::max(1.0, rg[c].scale);
          t.worst("gauge difference", diff);
          t.require(diff <= 1e-9, "gauge difference spec " + std::to_string(spec));
        }
      }
    }
  }
  return t.outcome();
}

Outcome lemma2() {
  Tally t;
  gs::Rng rng(808);
  for (int k = 0; k < 1000; ++k)
    for (const Lemma2Entry& e : lemma2_residuals(constrained(rng).t)) {
      t.worst("constrained", std::max(e.quadratic.relative(), e.cubic.relative()));
      t.require(e.quadratic.relative() <= 1e-10 && e.cubic.relative() <= 1e-10, "constrained sample " + std::to_string(k));
    }
  double free_worst = 0.0;
  for (int k = 0; k < 100; ++k)
    for (const Lemma2Entry& e : lemma2_residuals(sample_torsion(rng, false).t))
      free_worst = std::max({free_worst, e.quadratic.relative(), e.cubic.relative()});
  t.worst("unconstrained max", free_worst);
  t.require(free_worst > 1e-3, "non-vacuity");
  return t.outcome();
}

Outcome remark() {
  const IdentityReport r = remark_implication_test(1000, 909);
  std::ostringstream s;
  s.precision(3);
  s << "worst " << r.worst << " over " << r.trials << " trials x " << r.max_relative.size() << " pairings";
  return {r.passed && r.worst <= 1e-8 && r.trials == 1000, s.str()};
}

Outcome residual40() {
  Tally t;
  gs::Rng rng(1010);
  for (int k = 0; k < 10000; ++k) {
    const TorsionTensor tor = sample_torsion(rng, false).t;
    const ConditionValues v = condition_values(tor, sample_derivs(rng, 5, Gauge::zero(5)));
    const double diff =
        std::abs(v.residual40.value - (v.n[0].value - v.n[1].value)) / std::max({1.0, v.n[0].scale, v.n[1].scale});
    t.worst("|r40-(n1-n2)|/scale", diff);
    t.require(diff <= 1e-13, "array " + std::to_string(k));
  }
  return t.outcome();
}

Outcome witness() {
  const WitnessResult w = witness_s_not_uv(1000, 1111);
  std::ostringstream s;
  s.precision(3);
  s << "trial " << w.trial << ", s residual " << w.s_residual << ", uv residual " << w.uv_residual;
  return {w.found && w.trial < 1000 && w.s_residual <= 1e-10 && w.uv_residual > 1e-2, s.str()};
}

Outcome hygiene() {
  Tally t;
  gs::Rng rng(1212);
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 4;
    const gs::GenExpr g = gs::random_expr(rng, n, 4);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = gs::uniform(rng, -1, 1);
    const Jet j = eval_jet(parse(g.text, n), x, {}, 1);
    for (int s = 0; s < n; ++s) {
      const double fd = fd_derivative(g.eval, x, s);
      const double rel = std::abs(j.derivative({s}) - fd) / std::max(1.0, std::abs(fd));
      t.worst("fd", rel);
      t.require(rel <= 1e-6, "fd: " + g.text);
    }
  }
  for (int i = 0; i < 200; ++i) {
    const gs::Polynomial poly = gs::random_polynomial(rng, 3, 6, 4);
    const std::vector<double> x{gs::uniform(rng, -1.5, 1.5), gs::uniform(rng, -1.5, 1.5), gs::uniform(rng, -1.5, 1.5)};
    const Jet j = eval_jet(parse(poly.text(), 3), x, {}, 3);
    const JetLayout& lay = j.layout();
    for (std::size_t k = 0; k < lay.size(); ++k) {
      std::vector<int> slots;
      for (int s = 0; s < 3; ++s)
        for (int r = 0; r < lay.exponent(k, s); ++r) slots.push_back(s);
      const double want = poly.derivative(slots, x);
      const double rel = std::abs(j.derivative(slots) - want) / std::max(1.0, std::abs(want));
      t.worst("poly", rel);
      t.require(rel <= 1e-12, "poly: " + poly.text());
    }
  }
  int most = 0;
  for (const BundledSpec& b : bundled_specs()) {
    const NewtonResult r = solve_parameter(b.spec, b.point);
    most = std::max(most, r.iterations);
    t.require(r.iterations <= 8, "newton " + b.name);
  }
  t.worst("newton iterations", most);
  bool singular = false;
  try {
    solve_parameter(degenerate_spec(), Point{1, 1, 1, 1});
  } catch (const SingularEnvelope&) {
    singular = true;
  }
  t.require(singular, "degenerate spec did not raise SingularEnvelope");
  return t.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"determinant forms agree", determinant_forms},
      {"first-kind family soundness", first_kind_soundness},
      {"second-kind family soundness", second_kind_soundness},
      {"closed-form family webs", closed_forms},
      {"theta/rho integrable, S10 control not", theta_rho},
      {"kernel dimensions", dimensions},
      {"lemma1 and gauge independence", lemma1},
      {"lemma2 on constrained torsion", lemma2},
      {"any two of m, n, r imply the third", remark},
      {"residual40 equals n1 - n2", residual40},
      {"s conditions do not force u/v", witness},
      {"numerics hygiene", hygiene},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.passed;
    std::printf("%s %zu %s (%.2fs): %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
