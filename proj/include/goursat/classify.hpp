#ifndef GOURSAT_CLASSIFY_HPP
#define GOURSAT_CLASSIFY_HPP

// First-kind and second-kind conditions in torsion form and in PDE form.
//
// The first-kind PDE is evaluated as the cleared determinant
// F13 F24 - F14 F23, which is what a13 a24 - a14 a23 = 0 becomes after
// substituting a_ab = F_ab / (F_a F_b).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/residual.hpp"
#include "goursat/sampling.hpp"
#include "goursat/web.hpp"

namespace goursat {

inline constexpr double kDegenerateRow = 1e-10;
inline constexpr double kDefaultClassifyTol = 1e-7;

struct FirstKindResidual {
  Residual residual;
  bool degenerate = false;  // a torsion row {a_p3, a_p4} vanishes
  double value() const { return residual.value; }
  double relative() const { return residual.relative(); }
};

namespace detail {
inline double row_norm(const TorsionTensor& t, int p, int last) {
  double s = 0.0;
  for (int q = 3; q <= last; ++q) s += t(p, q) * t(p, q);
  return std::sqrt(s);
}
}  // namespace detail

/// a13 a24 - a14 a23.
inline FirstKindResidual first_kind_residual(const TorsionTensor& t) {
  if (t.arity() < 4) throw ContractError("first-kind condition needs n >= 4");
  FirstKindResidual r;
  r.residual.add(t(1, 3) * t(2, 4)).sub(t(1, 4) * t(2, 3));
  r.degenerate = detail::row_norm(t, 1, 4) < kDegenerateRow || detail::row_norm(t, 2, 4) < kDegenerateRow;
  return r;
}

/// F13 F24 - F14 F23 from an order-2 jet (slots 0-based).
inline Residual first_kind_pde_from_jet(const Jet& f) {
  Residual r;
  r.add(f.derivative({0, 2}) * f.derivative({1, 3})).sub(f.derivative({0, 3}) * f.derivative({1, 2}));
  return r;
}

inline Residual first_kind_pde_residual(const WebFunction& web, const Point& p) {
  if (web.arity() < 4) throw ContractError("first-kind condition needs n >= 4");
  return first_kind_pde_from_jet(web.regular_jet(p, 2));
}

struct SecondKindResiduals {
  double det24 = 0.0;   // det [[1,1,1],[a13,a14,a15],[a23,a24,a25]]
  double sum25 = 0.0;   // A + B + C
  double expr26 = 0.0;  // six-product expansion, equals 2 det24
  double cross27 = 0.0; // (a13-a14)(a23-a25) - (a23-a24)(a13-a15)
  double scale = 0.0;   // largest |a_1i a_2j| entering det24
  bool degenerate = false;
  double relative() const { return std::abs(det24) / std::max(scale, kScaleFloor); }
};

/// Denominator-cleared cross-ratio form for an arbitrary index choice:
/// (a_pa - a_pb)(a_qa - a_qc) - (a_qa - a_qb)(a_pa - a_pc).
inline double cross27(const TorsionTensor& t, int p, int q, int a, int b, int c) {
  return (t(p, a) - t(p, b)) * (t(q, a) - t(q, c)) - (t(q, a) - t(q, b)) * (t(p, a) - t(p, c));
}

inline SecondKindResiduals second_kind_residuals(const TorsionTensor& t) {
  if (t.arity() < 5) throw ContractError("second-kind condition needs n >= 5");
  const double a13 = t(1, 3), a14 = t(1, 4), a15 = t(1, 5);
  const double a23 = t(2, 3), a24 = t(2, 4), a25 = t(2, 5);
  SecondKindResiduals r;
  r.det24 = (a14 * a25 - a15 * a24) - (a13 * a25 - a15 * a23) + (a13 * a24 - a14 * a23);
  const double A = a13 * a24 - a14 * a23;
  const double B = a14 * a25 - a15 * a24;
  const double C = a15 * a23 - a13 * a25;
  r.sum25 = A + B + C;
  r.expr26 = a13 * (a24 - a25) + a14 * (a25 - a23) + a15 * (a23 - a24) + a23 * (a15 - a14) + a24 * (a13 - a15) +
             a25 * (a14 - a13);
  r.cross27 = cross27(t, 1, 2, 3, 4, 5);
  for (double m : {a13 * a24, a14 * a23, a14 * a25, a15 * a24, a15 * a23, a13 * a25})
    r.scale = std::max(r.scale, std::abs(m));
  r.degenerate = detail::row_norm(t, 1, 5) < kDegenerateRow || detail::row_norm(t, 2, 5) < kDegenerateRow;
  return r;
}

/// det [[F3,F4,F5],[F13,F14,F15],[F23,F24,F25]] from an order-2 jet.
inline Residual second_kind_pde_from_jet(const Jet& f) {
  const double r0[3] = {f.derivative({2}), f.derivative({3}), f.derivative({4})};
  const double r1[3] = {f.derivative({0, 2}), f.derivative({0, 3}), f.derivative({0, 4})};
  const double r2[3] = {f.derivative({1, 2}), f.derivative({1, 3}), f.derivative({1, 4})};
  Residual r;
  // Leibniz expansion; each product is one monomial.
  r.add(r0[0] * r1[1] * r2[2]).add(r0[1] * r1[2] * r2[0]).add(r0[2] * r1[0] * r2[1]);
  r.sub(r0[2] * r1[1] * r2[0]).sub(r0[1] * r1[0] * r2[2]).sub(r0[0] * r1[2] * r2[1]);
  return r;
}

inline Residual second_kind_pde_residual(const WebFunction& web, const Point& p) {
  if (web.arity() < 5) throw ContractError("second-kind condition needs n >= 5");
  return second_kind_pde_from_jet(web.regular_jet(p, 2));
}

struct PointClassification {
  Point point;
  FirstKindResidual first;
  Residual first_pde;
  std::optional<SecondKindResiduals> second;
  std::optional<Residual> second_pde;
};

struct ClassificationReport {
  std::vector<PointClassification> points;  // ordered by sample index
  int rejected = 0;
  double tol = kDefaultClassifyTol;
  double max_first_relative = 0.0;
  double max_first_pde_relative = 0.0;
  std::optional<double> max_second_relative;
  std::optional<double> max_second_pde_relative;
  bool first_kind = false;
  std::optional<bool> second_kind;  // absent for n < 5
  int first_degenerate_points = 0;
  int second_degenerate_points = 0;
};

inline PointClassification classify_point(const WebFunction& web, const Point& p) {
  const Jet f = web.regular_jet(p, 2);
  const TorsionTensor t = torsion_from_jet(f);
  PointClassification pc{p, first_kind_residual(t), first_kind_pde_from_jet(f), std::nullopt, std::nullopt};
  if (web.arity() >= 5) {
    pc.second = second_kind_residuals(t);
    pc.second_pde = second_kind_pde_from_jet(f);
  }
  return pc;
}

inline ClassificationReport summarize(std::vector<PointClassification> points, int rejected, double tol) {
  ClassificationReport rep;
  rep.points = std::move(points);
  rep.rejected = rejected;
  rep.tol = tol;
  for (const auto& pc : rep.points) {
    rep.max_first_relative = std::max(rep.max_first_relative, pc.first.relative());
    rep.max_first_pde_relative = std::max(rep.max_first_pde_relative, pc.first_pde.relative());
    if (pc.first.degenerate) ++rep.first_degenerate_points;
    if (pc.second) {
      rep.max_second_relative = std::max(rep.max_second_relative.value_or(0.0), pc.second->relative());
      rep.max_second_pde_relative = std::max(rep.max_second_pde_relative.value_or(0.0), pc.second_pde->relative());
      if (pc.second->degenerate) ++rep.second_degenerate_points;
    }
  }
  rep.first_kind = std::max(rep.max_first_relative, rep.max_first_pde_relative) < tol;
  if (rep.max_second_relative)
    rep.second_kind = std::max(*rep.max_second_relative, *rep.max_second_pde_relative) < tol;
  return rep;
}

/// Classifies the web over `count` regular points drawn from `box`.
inline ClassificationReport classify(const WebFunction& web, const Box& box, int count, double tol,
                                     std::uint64_t seed) {
  if (web.arity() < 4) throw ContractError("classification needs n >= 4");
  RegularSample sample = sample_regular_points(web, box, count, seed, 2);
  std::vector<PointClassification> points;
  points.reserve(sample.points.size());
  for (const Point& p : sample.points) points.push_back(classify_point(web, p));
  return summarize(std::move(points), sample.rejected, tol);
}

}  // namespace goursat

#endif  // GOURSAT_CLASSIFY_HPP
