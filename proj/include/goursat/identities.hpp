#ifndef GOURSAT_IDENTITIES_HPP
#define GOURSAT_IDENTITIES_HPP

// Scalar combinations of torsion components a_pq and Pfaffian derivatives
// a_pqh. Every combination is accumulated as a Residual, so the right-hand
// side of an equation (when it is not 0) is subtracted and the scale is the
// largest expanded monomial.
//
// m_alpha uses the coefficient pattern obtained by differentiating the
// six-product form of the second-kind condition:
//   (a24 - a25) a13h + (a25 - a23) a14h + (a23 - a24) a15h
// + (a15 - a14) a23h + (a13 - a15) a24h + (a14 - a13) a25h.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/residual.hpp"
#include "goursat/web.hpp"

namespace goursat {

struct ABC {
  double A = 0.0, B = 0.0, C = 0.0;
  Residual sum;  // A + B + C
};

inline ABC abc(const TorsionTensor& t) {
  if (t.arity() < 5) throw ContractError("A, B, C need n >= 5");
  const double a13 = t(1, 3), a14 = t(1, 4), a15 = t(1, 5), a23 = t(2, 3), a24 = t(2, 4), a25 = t(2, 5);
  ABC r;
  r.A = a13 * a24 - a14 * a23;
  r.B = a14 * a25 - a15 * a24;
  r.C = a15 * a23 - a13 * a25;
  r.sum.add(a13 * a24).sub(a14 * a23).add(a14 * a25).sub(a15 * a24).add(a15 * a23).sub(a13 * a25);
  return r;
}

/// a24 a13c + a13 a24c - a14 a23c - a23 a14c for c = 1..4.
inline std::array<Residual, 4> lemma1_residuals(const TorsionTensor& t, const PfaffianDerivs& d) {
  if (t.arity() < 4 || d.arity() != t.arity()) throw ContractError("lemma 1 needs matching n >= 4 inputs");
  std::array<Residual, 4> out;
  for (int c = 1; c <= 4; ++c) {
    Residual& r = out[static_cast<std::size_t>(c - 1)];
    r.add(t(2, 4) * d(1, 3, c)).add(t(1, 3) * d(2, 4, c)).sub(t(1, 4) * d(2, 3, c)).sub(t(2, 3) * d(1, 4, c));
  }
  return out;
}

struct Lemma2Entry {
  int p = 0, q = 0, a = 0, b = 0, c = 0;
  Residual quadratic;
  Residual cubic;
};

/// Both lemma identities for p != q in {1, 2} and (a, b, c) ranging over the
/// permutations of (3, 4, 5): 12 selections.
inline std::vector<Lemma2Entry> lemma2_residuals(const TorsionTensor& t) {
  if (t.arity() < 5) throw ContractError("lemma 2 needs n >= 5");
  std::vector<Lemma2Entry> out;
  std::array<int, 3> perm{3, 4, 5};
  for (int p : {1, 2}) {
    const int q = 3 - p;
    std::array<int, 3> abc_ = perm;
    do {
      const auto [a, b, c] = abc_;
      const double pa = t(p, a), pb = t(p, b), pc = t(p, c), qa = t(q, a), qb = t(q, b), qc = t(q, c);
      Lemma2Entry e{p, q, a, b, c, {}, {}};
      e.quadratic.add_diff(pa * qc, pa * qb, 1.0).add_diff(pb * qa, pb * qc, 1.0).add_diff(pc * qb, pc * qa, 1.0);
      e.cubic.add_diff(pa * pa * qb, pa * pa * qc, 1.0)
          .add_diff(pb * pb * qc, pb * pb * qa, 1.0)
          .add_diff(pc * pc * qa, pc * pc * qb, 1.0)
          .add_diff(pa * qa * pc, pa * qa * pb, 1.0)
          .add_diff(pb * qb * pa, pb * qb * pc, 1.0)
          .add_diff(pc * qc * pb, pc * qc * pa, 1.0);
      out.push_back(e);
    } while (std::next_permutation(abc_.begin(), abc_.end()));
  }
  return out;
}

/// One linear condition sum_i coef_i * x_i = rhs in the six unknowns
/// x = (a13h, a14h, a15h, a23h, a24h, a25h). The right-hand side is a sum of
/// monomials in the torsion.
struct ConditionRow {
  std::array<double, 6> coef_plus{};   // coefficient = plus - minus, kept split for scaling
  std::array<double, 6> coef_minus{};
  std::vector<double> rhs_monomials;   // rhs = sum of these
  double coef(std::size_t i) const { return coef_plus[i] - coef_minus[i]; }
  double rhs() const {
    double s = 0.0;
    for (double m : rhs_monomials) s += m;
    return s;
  }
};

enum class ConditionKind { M, N, R };

inline constexpr std::array<std::array<int, 2>, 6> kDerivPairs{{{1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}}};

/// Coefficients of m_h, n_h or r_h with its right-hand side. For m the
/// index h runs over 1..n, for n and r over 1..3.
inline ConditionRow condition_row(ConditionKind kind, const TorsionTensor& t, int h) {
  const double a13 = t(1, 3), a14 = t(1, 4), a15 = t(1, 5), a23 = t(2, 3), a24 = t(2, 4), a25 = t(2, 5);
  ConditionRow row;
  auto set = [&row](std::size_t i, double plus, double minus) {
    row.coef_plus[i] = plus;
    row.coef_minus[i] = minus;
  };
  switch (kind) {
    case ConditionKind::M:
      set(0, a24, a25), set(1, a25, a23), set(2, a23, a24);
      set(3, a15, a14), set(4, a13, a15), set(5, a14, a13);
      if (h == 3) row.rhs_monomials = {a15 * a23 * t(3, 4), -a13 * a25 * t(3, 4), a13 * a24 * t(3, 5), -a14 * a23 * t(3, 5)};
      if (h == 4) row.rhs_monomials = {a14 * a25 * t(3, 4), -a15 * a24 * t(3, 4), a13 * a24 * t(4, 5), -a14 * a23 * t(4, 5)};
      if (h == 5) row.rhs_monomials = {a14 * a25 * t(3, 5), -a15 * a24 * t(3, 5), a15 * a23 * t(4, 5), -a13 * a25 * t(4, 5)};
      break;
    case ConditionKind::N:
      set(0, a15, a14), set(1, a13, a15), set(2, a14, a13);
      if (h == 3)
        row.rhs_monomials = {a13 * a15 * t(3, 4), -a13 * a13 * t(3, 4), a13 * a13 * t(3, 5), -a13 * a14 * t(3, 5)};
      break;
    case ConditionKind::R:
      set(3, a25, a24), set(4, a23, a25), set(5, a24, a23);
      if (h == 3)
        row.rhs_monomials = {a23 * a25 * t(3, 4), -a23 * a23 * t(3, 4), a23 * a23 * t(3, 5), -a23 * a24 * t(3, 5)};
      break;
  }
  return row;
}

/// sum_i coef_i x_i - rhs, expanded into monomials.
inline Residual evaluate_row(const ConditionRow& row, const std::array<double, 6>& x) {
  Residual r;
  for (std::size_t i = 0; i < 6; ++i) r.add_diff(row.coef_plus[i], row.coef_minus[i], x[i]);
  for (double m : row.rhs_monomials) r.sub(m);
  return r;
}

inline std::array<double, 6> deriv_vector(const PfaffianDerivs& d, int h) {
  std::array<double, 6> x{};
  for (std::size_t i = 0; i < 6; ++i) x[i] = d(kDerivPairs[i][0], kDerivPairs[i][1], h);
  return x;
}

struct ConditionValues {
  std::vector<Residual> m;          // m_1 .. m_n
  std::array<Residual, 3> n{};      // n_1 .. n_3
  std::array<Residual, 3> r{};      // r_1 .. r_3
  std::array<Residual, 3> s{};      // s_3 .. s_5
  std::array<Residual, 4> uv{};     // u4 - 2A a34, u5 - 2A a35, v4 - u4 + A a34, v5 - u5 - A (a34 - a35)
  Residual residual40;
};

inline ConditionValues condition_values(const TorsionTensor& t, const PfaffianDerivs& d) {
  const int n = t.arity();
  if (n < 5 || d.arity() != n) throw ContractError("condition values need matching n >= 5 inputs");
  const double a13 = t(1, 3), a14 = t(1, 4), a15 = t(1, 5), a23 = t(2, 3), a24 = t(2, 4), a25 = t(2, 5);
  const double a34 = t(3, 4), a35 = t(3, 5), a45 = t(4, 5);
  ConditionValues v;
  for (int h = 1; h <= n; ++h) v.m.push_back(evaluate_row(condition_row(ConditionKind::M, t, h), deriv_vector(d, h)));
  for (int h = 1; h <= 3; ++h) {
    v.n[static_cast<std::size_t>(h - 1)] = evaluate_row(condition_row(ConditionKind::N, t, h), deriv_vector(d, h));
    v.r[static_cast<std::size_t>(h - 1)] = evaluate_row(condition_row(ConditionKind::R, t, h), deriv_vector(d, h));
  }

  // s_h = (a23 - a25)(a14h - a13h) + (a15 - a13)(a24h - a23h)
  for (int h = 3; h <= 5; ++h) {
    Residual& s = v.s[static_cast<std::size_t>(h - 3)];
    s.add(a23 * d(1, 4, h)).sub(a23 * d(1, 3, h)).sub(a25 * d(1, 4, h)).add(a25 * d(1, 3, h));
    s.add(a15 * d(2, 4, h)).sub(a15 * d(2, 3, h)).sub(a13 * d(2, 4, h)).add(a13 * d(2, 3, h));
  }
  // s3 + C a34, s4 - B a34, s5 - C (a35 - a45)
  v.s[0].add(a15 * a23 * a34).sub(a13 * a25 * a34);
  v.s[1].sub(a14 * a25 * a34).add(a15 * a24 * a34);
  v.s[2].sub(a15 * a23 * a35).add(a13 * a25 * a35).add(a15 * a23 * a45).sub(a13 * a25 * a45);

  // u_k = (a23 - a24) a13k - (a14 - a13) a23k, v_k likewise with a14k, a24k.
  auto u_into = [&](Residual& r, int k, double sign) {
    r.add(sign * a23 * d(1, 3, k)).sub(sign * a24 * d(1, 3, k)).sub(sign * a14 * d(2, 3, k)).add(sign * a13 * d(2, 3, k));
  };
  auto v_into = [&](Residual& r, int k, double sign) {
    r.add(sign * a23 * d(1, 4, k)).sub(sign * a24 * d(1, 4, k)).sub(sign * a14 * d(2, 4, k)).add(sign * a13 * d(2, 4, k));
  };
  auto A_times = [&](Residual& r, double factor, double sign) {
    r.add(sign * a13 * a24 * factor).sub(sign * a14 * a23 * factor);
  };
  u_into(v.uv[0], 4, 1.0);
  A_times(v.uv[0], a34, -2.0);
  u_into(v.uv[1], 5, 1.0);
  A_times(v.uv[1], a35, -2.0);
  v_into(v.uv[2], 4, 1.0);
  u_into(v.uv[2], 4, -1.0);
  A_times(v.uv[2], a34, 1.0);
  v_into(v.uv[3], 5, 1.0);
  u_into(v.uv[3], 5, -1.0);
  A_times(v.uv[3], a34, -1.0);
  A_times(v.uv[3], a35, 1.0);

  // (a15 - a14)(a131 - a132) + (a13 - a15)(a141 - a142) + (a14 - a13)(a151 - a152)
  const std::array<std::array<double, 2>, 3> coef{{{a15, a14}, {a13, a15}, {a14, a13}}};
  for (int i = 0; i < 3; ++i) {
    const int b = 3 + i;
    const auto [plus, minus] = coef[static_cast<std::size_t>(i)];
    v.residual40.add_diff(plus, minus, d(1, b, 1)).add_diff(minus, plus, d(1, b, 2));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Constrained random sampling.

struct TorsionSample {
  TorsionTensor t{5};
  bool ok = false;
};

inline constexpr double kPivotRejection = 1e-3;

/// Random a_pq (p in {1,2}, q in {3,4,5}) and a34, a35, a45 in [-2, 2]. With
/// `constrained`, a25 is solved from A + B + C = 0; samples with
/// |a14 - a13| < 1e-3 are rejected (ok = false).
template <class Rng>
TorsionSample sample_torsion(Rng& rng, bool constrained, int n = 5) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  TorsionSample s{TorsionTensor(n), true};
  for (int p : {1, 2})
    for (int q : {3, 4, 5}) s.t.set(p, q, u(rng));
  s.t.set(3, 4, u(rng));
  s.t.set(3, 5, u(rng));
  s.t.set(4, 5, u(rng));
  s.t.set(1, 2, u(rng));
  for (int a = 1; a <= n; ++a)
    for (int b = std::max(a + 1, 6); b <= n; ++b) s.t.set(a, b, u(rng));
  if (constrained) {
    const double a13 = s.t(1, 3), a14 = s.t(1, 4), a15 = s.t(1, 5), a23 = s.t(2, 3), a24 = s.t(2, 4);
    const double pivot = a14 - a13;
    if (std::abs(pivot) < kPivotRejection) {
      s.ok = false;
      return s;
    }
    s.t.set(2, 5, -(a13 * a24 - a14 * a23 - a15 * a24 + a15 * a23) / pivot);
  }
  return s;
}

template <class Rng>
PfaffianDerivs sample_derivs(Rng& rng, int n, const Gauge& g) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  PfaffianDerivs d(n, g);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = 1; c <= n; ++c) d.set(a, b, c, u(rng));
  return d;
}

struct IdentityReport {
  std::string name;
  std::uint64_t seed = 0;
  int trials = 0;
  int rejected = 0;
  double tol = 0.0;
  std::map<std::string, double> max_relative;  // per checked quantity
  double worst = 0.0;
  bool passed = false;
};

inline const char* to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::M: return "m";
    case ConditionKind::N: return "n";
    case ConditionKind::R: return "r";
  }
  return "?";
}

namespace detail {

// Smallest |a_pi - a_pj| over p in {1, 2}, i < j in {3, 4, 5}. Writing one
// of m, n, r in terms of the other two divides by these spreads (squared),
// so near-coincident torsion entries only show rounding amplification.
inline double min_row_spread(const TorsionTensor& t) {
  double s = std::numeric_limits<double>::infinity();
  for (int p : {1, 2})
    for (int i = 3; i <= 5; ++i)
      for (int j = i + 1; j <= 5; ++j) s = std::min(s, std::abs(t(p, i) - t(p, j)));
  return s;
}

// Imposes two linear conditions on x by solving for the best-conditioned
// pair of unknowns. Returns false if no pair is usable.
inline bool impose_two(const ConditionRow& r1, const ConditionRow& r2, std::array<double, 6>& x) {
  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      const double det = r1.coef(i) * r2.coef(j) - r1.coef(j) * r2.coef(i);
      const double norm = std::hypot(r1.coef(i), r1.coef(j)) * std::hypot(r2.coef(i), r2.coef(j));
      const double quality = norm > 0.0 ? std::abs(det) / norm : 0.0;
      if (quality > best) best = quality, bi = i, bj = j;
    }
  if (best < 1e-6) return false;
  double rest1 = 0.0, rest2 = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    if (k == bi || k == bj) continue;
    rest1 += r1.coef(k) * x[k];
    rest2 += r2.coef(k) * x[k];
  }
  Eigen::Matrix2d m;
  m << r1.coef(bi), r1.coef(bj), r2.coef(bi), r2.coef(bj);
  const Eigen::Vector2d rhs(r1.rhs() - rest1, r2.rhs() - rest2);
  const Eigen::Vector2d sol = m.fullPivLu().solve(rhs);
  x[bi] = sol(0);
  x[bj] = sol(1);
  return true;
}

}  // namespace detail

/// Any two of the m, n, r systems imply the third, for h = 1, 2, 3. Each
/// trial uses seed + trial index; ill-conditioned draws are redrawn and
/// counted in `rejected`.
inline IdentityReport remark_implication_test(int trials, std::uint64_t seed, double tol = 1e-8) {
  if (trials < 1) throw ContractError("trials must be >= 1");
  IdentityReport rep{"remark_mnr", seed, trials, 0, tol, {}, 0.0, false};
  const std::array<std::array<ConditionKind, 3>, 3> pairings{{{ConditionKind::M, ConditionKind::N, ConditionKind::R},
                                                              {ConditionKind::N, ConditionKind::R, ConditionKind::M},
                                                              {ConditionKind::M, ConditionKind::R, ConditionKind::N}}};
  for (const auto& [k1, k2, check] : pairings)
    for (int h = 1; h <= 3; ++h)
      rep.max_relative[std::string(to_string(k1)) + "+" + to_string(k2) + "=>" + to_string(check) + " h=" +
                       std::to_string(h)] = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& [k1, k2, check] : pairings)
      for (int h = 1; h <= 3; ++h) {
        for (int attempt = 0;; ++attempt) {
          if (attempt > 1000) throw NoConvergence("remark test: no usable sample");
          TorsionSample s = sample_torsion(rng, true);
          if (!s.ok || detail::min_row_spread(s.t) < kPivotRejection) {
            ++rep.rejected;
            continue;
          }
          std::array<double, 6> x{};
          for (double& v : x) v = u(rng);
          if (!detail::impose_two(condition_row(k1, s.t, h), condition_row(k2, s.t, h), x)) {
            ++rep.rejected;
            continue;
          }
          const double rel = evaluate_row(condition_row(check, s.t, h), x).relative();
          double& slot = rep.max_relative[std::string(to_string(k1)) + "+" + to_string(k2) + "=>" + to_string(check) +
                                          " h=" + std::to_string(h)];
          slot = std::max(slot, rel);
          rep.worst = std::max(rep.worst, rel);
          break;
        }
      }
  }
  rep.passed = rep.worst <= tol;
  return rep;
}

struct WitnessResult {
  bool found = false;
  int trial = -1;           // first witnessing trial
  int trials_run = 0;
  double s_residual = 0.0;  // max relative residual of the s conditions at the witness
  double uv_residual = 0.0; // max relative residual of the u/v conditions at the witness
};

/// Looks for a sample satisfying the s conditions (to s_tol) that violates
/// some u/v condition by more than uv_threshold.
inline WitnessResult witness_s_not_uv(int trials, std::uint64_t seed, double s_tol = 1e-10,
                                      double uv_threshold = 1e-2) {
  if (trials < 1) throw ContractError("trials must be >= 1");
  WitnessResult w;
  for (int trial = 0; trial < trials; ++trial) {
    w.trials_run = trial + 1;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    TorsionSample s = sample_torsion(rng, true);
    if (!s.ok) continue;
    PfaffianDerivs d = sample_derivs(rng, 5, Gauge::zero(5));
    const TorsionTensor& t = s.t;
    const double c1 = t(2, 3) - t(2, 5);  // multiplies a14h - a13h
    const double c2 = t(1, 5) - t(1, 3);  // multiplies a24h - a23h
    const ABC abc_ = abc(t);
    const std::array<double, 3> rhs{-abc_.C * t(3, 4), abc_.B * t(3, 4), abc_.C * (t(3, 5) - t(4, 5))};
    if (std::max(std::abs(c1), std::abs(c2)) < kPivotRejection) continue;
    for (int h = 3; h <= 5; ++h) {
      const double target = rhs[static_cast<std::size_t>(h - 3)];
      if (std::abs(c1) >= std::abs(c2))
        d.set(1, 4, h, d(1, 3, h) + (target - c2 * (d(2, 4, h) - d(2, 3, h))) / c1);
      else
        d.set(2, 4, h, d(2, 3, h) + (target - c1 * (d(1, 4, h) - d(1, 3, h))) / c2);
    }
    const ConditionValues v = condition_values(t, d);
    double sr = 0.0, uvr = 0.0;
    for (const Residual& r : v.s) sr = std::max(sr, r.relative());
    for (const Residual& r : v.uv) uvr = std::max(uvr, r.relative());
    if (sr <= s_tol && uvr > uv_threshold) {
      w.found = true;
      w.trial = trial;
      w.s_residual = sr;
      w.uv_residual = uvr;
      return w;
    }
  }
  return w;
}

}  // namespace goursat

#endif  // GOURSAT_IDENTITIES_HPP
