#ifndef GOURSAT_EXTERIOR_HPP
#define GOURSAT_EXTERIOR_HPP

// Pfaffian systems in coordinates. Every 1-form is stored by its coordinate
// coefficients c_i(x) (theta = sum_i c_i dx_i) as order-1 jets, with common
// nonzero factors such as 1/F_1 dropped.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/expr.hpp"
#include "goursat/jets.hpp"
#include "goursat/web.hpp"

namespace goursat {

inline constexpr double kDefaultRankTol = 1e-8;
inline constexpr double kDefaultFrobeniusTol = 1e-7;
inline constexpr double kNonIntegrableThreshold = 1e-3;
inline constexpr double kNormFloor = 1e-12;
inline constexpr int kMaxSystemArity = 8;

/// A 1-form sum_i c_i(x) dx_i with coefficients available as order-1 jets.
class CoFormField {
 public:
  using Coefficients = std::function<std::vector<Jet>(const Point&)>;

  CoFormField(int arity, std::string label, Coefficients coefficients)
      : arity_(arity), label_(std::move(label)), coefficients_(std::move(coefficients)) {}

  /// Coefficients given as expressions in x1..xn (no parameters).
  static CoFormField from_exprs(std::vector<Expr> coefficients, std::string label) {
    if (coefficients.empty()) throw ContractError("co-form needs at least one coefficient");
    const int n = static_cast<int>(coefficients.size());
    for (const Expr& e : coefficients)
      if (e.arity() != n || !e.params().empty())
        throw ContractError("co-form coefficients must be parameter-free expressions in x1..xn");
    return CoFormField(n, std::move(label), [cs = std::move(coefficients)](const Point& p) {
      std::vector<Jet> out;
      out.reserve(cs.size());
      for (const Expr& e : cs) out.push_back(eval_jet(e, p.coords(), std::span<const double>{}, 1));
      return out;
    });
  }

  /// Constant coordinate form dx_sigma (1-based).
  static CoFormField coordinate(int arity, int sigma) {
    if (sigma < 1 || sigma > arity) throw ContractError("coordinate form index out of range");
    return CoFormField(arity, "dx" + std::to_string(sigma), [arity, sigma](const Point&) {
      std::vector<Jet> out(static_cast<std::size_t>(arity), Jet(arity, 1));
      out[static_cast<std::size_t>(sigma - 1)] = Jet::constant(1.0, arity, 1);
      return out;
    });
  }

  int arity() const { return arity_; }
  const std::string& label() const { return label_; }

  std::vector<Jet> jets(const Point& p) const {
    std::vector<Jet> c = coefficients_(p);
    if (static_cast<int>(c.size()) != arity_) throw ContractError("co-form returned wrong number of coefficients");
    for (const Jet& j : c) {
      if (j.vars() != arity_ || j.order() < 1) throw ContractError("co-form coefficient jets must be order >= 1");
      for (double v : j.coefficients())
        if (!std::isfinite(v)) throw DomainError("non-finite co-form coefficient in " + label_);
    }
    return c;
  }

  std::vector<double> values(const Point& p) const {
    std::vector<double> out;
    for (const Jet& j : jets(p)) out.push_back(j.value());
    return out;
  }

 private:
  int arity_;
  std::string label_;
  Coefficients coefficients_;
};

/// theta multiplied by a smooth scalar factor f(x).
inline CoFormField rescaled(const CoFormField& theta, const Expr& factor) {
  if (factor.arity() != theta.arity() || !factor.params().empty())
    throw ContractError("scale factor must be a parameter-free expression of the same arity");
  return CoFormField(theta.arity(), theta.label() + "*(" + factor.str() + ")", [theta, factor](const Point& p) {
    const Jet f = eval_jet(factor, p.coords(), std::span<const double>{}, 1);
    std::vector<Jet> c = theta.jets(p);
    for (Jet& j : c) j = j.truncated(1) * f;
    return c;
  });
}

enum class SystemTag { S10, S11, S12, S13, S10_11, THETA_RHO, DELTA2, DELTA3, DELTA4, DELTA4_35, DELTA4P, Custom };

inline const char* to_string(SystemTag t) {
  switch (t) {
    case SystemTag::S10: return "S10";
    case SystemTag::S11: return "S11";
    case SystemTag::S12: return "S12";
    case SystemTag::S13: return "S13";
    case SystemTag::S10_11: return "S10_11";
    case SystemTag::THETA_RHO: return "THETA_RHO";
    case SystemTag::DELTA2: return "DELTA2";
    case SystemTag::DELTA3: return "DELTA3";
    case SystemTag::DELTA4: return "DELTA4";
    case SystemTag::DELTA4_35: return "DELTA4_35";
    case SystemTag::DELTA4P: return "DELTA4P";
    case SystemTag::Custom: return "CUSTOM";
  }
  return "?";
}

inline std::optional<SystemTag> system_tag_from_string(std::string_view s) {
  for (SystemTag t : {SystemTag::S10, SystemTag::S11, SystemTag::S12, SystemTag::S13, SystemTag::S10_11,
                      SystemTag::THETA_RHO, SystemTag::DELTA2, SystemTag::DELTA3, SystemTag::DELTA4,
                      SystemTag::DELTA4_35, SystemTag::DELTA4P})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

struct PfaffianSystem {
  SystemTag tag = SystemTag::Custom;
  int arity = 0;
  std::vector<CoFormField> forms;   // function-coefficient forms
  std::vector<int> coordinate;      // constant forms dx_sigma, 1-based
  int generic_kernel_dim = 0;
  std::optional<int> special_kernel_dim;  // on webs of the matching kind

  int generator_count() const { return static_cast<int>(forms.size() + coordinate.size()); }

  /// Forms first, then dx_sigma in increasing sigma.
  std::vector<CoFormField> generators() const {
    std::vector<CoFormField> out = forms;
    for (int s : coordinate) out.push_back(CoFormField::coordinate(arity, s));
    return out;
  }

  static PfaffianSystem custom(std::vector<CoFormField> forms, std::vector<int> coordinate = {}) {
    if (forms.empty() && coordinate.empty()) throw ContractError("empty Pfaffian system");
    const int n = forms.empty() ? *std::max_element(coordinate.begin(), coordinate.end()) : forms.front().arity();
    for (const CoFormField& f : forms)
      if (f.arity() != n) throw ContractError("all forms must share one arity");
    for (int s : coordinate)
      if (s < 1 || s > n) throw ContractError("coordinate form index out of range");
    PfaffianSystem sys{SystemTag::Custom, n, std::move(forms), std::move(coordinate), 0, std::nullopt};
    if (sys.generator_count() > n) throw ContractError("more generators than coordinates");
    sys.generic_kernel_dim = n - sys.generator_count();
    return sys;
  }
};

namespace detail {

// Last F jet seen by a system's forms; a system evaluates all of its forms
// at one point before moving on.
class JetMemo {
 public:
  explicit JetMemo(WebFunction web) : web_(std::move(web)) {}
  Jet get(const Point& p) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!last_ || last_->first != p) last_.emplace(p, web_.regular_jet(p, 3));
    return last_->second;
  }

 private:
  WebFunction web_;
  std::mutex mutex_;
  std::optional<std::pair<Point, Jet>> last_;
};

// 1-based derivative accessors on an order-3 F jet, returned as order-1 jets.
struct Partials {
  const Jet& f;
  Jet d(int a) const { return f.partial(a - 1).truncated(1); }
  Jet d(int a, int b) const { return f.partial(a - 1).partial(b - 1); }
};

using FormBuilder = std::function<std::vector<std::pair<int, Jet>>(const Partials&)>;

inline CoFormField web_form(std::shared_ptr<JetMemo> memo, int n, std::string label, FormBuilder build) {
  return CoFormField(n, std::move(label), [memo = std::move(memo), n, build = std::move(build)](const Point& p) {
    const Jet f = memo->get(p);
    std::vector<Jet> out(static_cast<std::size_t>(n), Jet(n, 1));
    for (auto& [index, jet] : build(Partials{f})) out[static_cast<std::size_t>(index - 1)] = std::move(jet);
    return out;
  });
}

}  // namespace detail

/// Builds one of the named systems for a web.
inline PfaffianSystem make_system(const WebFunction& web, SystemTag tag) {
  const int n = web.arity();
  const bool delta = tag == SystemTag::DELTA2 || tag == SystemTag::DELTA3 || tag == SystemTag::DELTA4 ||
                     tag == SystemTag::DELTA4_35 || tag == SystemTag::DELTA4P;
  if (tag == SystemTag::Custom) throw ContractError("custom systems are built with PfaffianSystem::custom");
  if (n < (delta ? 5 : 4))
    throw ContractError(std::string(to_string(tag)) + " needs n >= " + (delta ? "5" : "4"));
  if (n > kMaxSystemArity) throw ContractError("Pfaffian systems support n <= 8");
  if (web.max_order() < 3) throw ContractError("Pfaffian systems need order-3 jets");

  auto memo = std::make_shared<detail::JetMemo>(web);
  using detail::Partials;
  PfaffianSystem sys;
  sys.tag = tag;
  sys.arity = n;
  auto add = [&](std::string label, detail::FormBuilder b) {
    sys.forms.push_back(detail::web_form(memo, n, std::move(label), std::move(b)));
  };
  auto sigma_from = [&](int first) {
    for (int s = first; s <= n; ++s) sys.coordinate.push_back(s);
  };
  // theta_p = F_p3 dx3 + F_p4 dx4
  auto s_form = [&](int p) {
    add("F" + std::to_string(p) + "3 dx3 + F" + std::to_string(p) + "4 dx4",
        [p](const Partials& d) { return std::vector<std::pair<int, Jet>>{{3, d.d(p, 3)}, {4, d.d(p, 4)}}; });
  };
  // F_1q dx1 + F_2q dx2
  auto s_dual = [&](int q) {
    add("F1" + std::to_string(q) + " dx1 + F2" + std::to_string(q) + " dx2",
        [q](const Partials& d) { return std::vector<std::pair<int, Jet>>{{1, d.d(1, q)}, {2, d.d(2, q)}}; });
  };
  // (F_pa F_b - F_pb F_a): a_pa - a_pb with the factor F_p F_a F_b cleared.
  auto diff = [](const Partials& d, int p, int a, int b) { return d.d(p, a) * d.d(b) - d.d(p, b) * d.d(a); };

  switch (tag) {
    case SystemTag::S10: s_form(1); sigma_from(5); sys.generic_kernel_dim = 3; break;
    case SystemTag::S11: s_form(2); sigma_from(5); sys.generic_kernel_dim = 3; break;
    case SystemTag::S12: s_dual(3); sigma_from(5); sys.generic_kernel_dim = 3; break;
    case SystemTag::S13: s_dual(4); sigma_from(5); sys.generic_kernel_dim = 3; break;
    case SystemTag::S10_11:
      s_form(1);
      s_form(2);
      sigma_from(5);
      sys.generic_kernel_dim = 2;
      sys.special_kernel_dim = 3;
      break;
    case SystemTag::THETA_RHO:
      s_form(1);
      s_dual(3);
      sigma_from(5);
      sys.generic_kernel_dim = 2;
      break;
    case SystemTag::DELTA2:
      add("F3 dx3 + F4 dx4 + F5 dx5", [](const Partials& d) {
        return std::vector<std::pair<int, Jet>>{{3, d.d(3)}, {4, d.d(4)}, {5, d.d(5)}};
      });
      add("F13 dx3 + F14 dx4 + F15 dx5", [](const Partials& d) {
        return std::vector<std::pair<int, Jet>>{{3, d.d(1, 3)}, {4, d.d(1, 4)}, {5, d.d(1, 5)}};
      });
      add("F23 dx3 + F24 dx4 + F25 dx5", [](const Partials& d) {
        return std::vector<std::pair<int, Jet>>{{3, d.d(2, 3)}, {4, d.d(2, 4)}, {5, d.d(2, 5)}};
      });
      add("F1 dx1 + F2 dx2",
          [](const Partials& d) { return std::vector<std::pair<int, Jet>>{{1, d.d(1)}, {2, d.d(2)}}; });
      sigma_from(6);
      sys.generic_kernel_dim = 1;
      sys.special_kernel_dim = 2;
      break;
    case SystemTag::DELTA3:
      add("F13 dx1 + F23 dx2 + F3^2 dx3", [](const Partials& d) {
        const Jet f3 = d.d(3);
        return std::vector<std::pair<int, Jet>>{{1, d.d(1, 3)}, {2, d.d(2, 3)}, {3, f3 * f3}};
      });
      for (int a : {4, 5})
        add("(a1" + std::to_string(a) + " - a13) w1 + (a2" + std::to_string(a) + " - a23) w2",
            [a, diff](const Partials& d) {
              return std::vector<std::pair<int, Jet>>{{1, diff(d, 1, a, 3)}, {2, diff(d, 2, a, 3)}};
            });
      sigma_from(6);
      sys.generic_kernel_dim = 2;
      sys.special_kernel_dim = 3;
      break;
    case SystemTag::DELTA4:
    case SystemTag::DELTA4_35: {
      const int p = tag == SystemTag::DELTA4 ? 1 : 2;
      add("(a" + std::to_string(p) + "4 - a" + std::to_string(p) + "3) w4 + (a" + std::to_string(p) + "5 - a" +
              std::to_string(p) + "3) w5",
          [p, diff](const Partials& d) {
            return std::vector<std::pair<int, Jet>>{{4, diff(d, p, 4, 3)}, {5, diff(d, p, 5, 3)}};
          });
      sigma_from(6);
      sys.generic_kernel_dim = 4;
      break;
    }
    case SystemTag::DELTA4P:
      add("(a14 - a13) w1 + (a24 - a23) w2", [diff](const Partials& d) {
        return std::vector<std::pair<int, Jet>>{{1, diff(d, 1, 4, 3)}, {2, diff(d, 2, 4, 3)}};
      });
      sigma_from(6);
      sys.generic_kernel_dim = 4;
      break;
    case SystemTag::Custom: break;
  }
  return sys;
}

/// Generator coefficient vectors at p, one row per generator.
inline Eigen::MatrixXd coefficient_matrix(const PfaffianSystem& sys, const Point& p) {
  const std::vector<CoFormField> gens = sys.generators();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(gens.size()), sys.arity);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::vector<double> v = gens[i].values(p);
    for (int j = 0; j < sys.arity; ++j) m(static_cast<Eigen::Index>(i), j) = v[static_cast<std::size_t>(j)];
  }
  return m;
}

struct RankResult {
  int rank = 0;
  int kernel_dim = 0;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd kernel;  // n x kernel_dim, orthonormal columns
};

/// Numerical rank of a row set; rows are normalized first so that a common
/// factor on one generator does not affect the count.
inline RankResult rank_of_rows(Eigen::MatrixXd rows, double tol) {
  const Eigen::Index n = rows.cols();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) /= norm;
  }
  RankResult r;
  if (rows.rows() == 0) {
    r.kernel = Eigen::MatrixXd::Identity(n, n);
    r.kernel_dim = static_cast<int>(n);
    return r;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  r.singular_values = svd.singularValues();
  const double smax = r.singular_values.size() > 0 ? r.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
    if (smax > 0.0 && r.singular_values(i) > tol * smax) ++r.rank;
  r.kernel_dim = static_cast<int>(n) - r.rank;
  r.kernel = svd.matrixV().rightCols(r.kernel_dim);
  return r;
}

inline RankResult rank_at(const PfaffianSystem& sys, const Point& p, double tol = kDefaultRankTol) {
  return rank_of_rows(coefficient_matrix(sys, p), tol);
}

/// Spectral-norm distance between orthogonal projectors; 1 if dimensions differ.
inline double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw ContractError("subspaces live in different spaces");
  if (a.cols() != b.cols()) return 1.0;
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
                             Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() *
                             Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const Eigen::MatrixXd diff = qa * qa.transpose() - qb * qb.transpose();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(diff).singularValues()(0);
}

/// (d theta)_ij = d_i c_j - d_j c_i.
inline Eigen::MatrixXd d_form(const CoFormField& theta, const Point& p) {
  const std::vector<Jet> c = theta.jets(p);
  const int n = theta.arity();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = c[static_cast<std::size_t>(j)].derivative({i}) - c[static_cast<std::size_t>(i)].derivative({j});
      out(i, j) = v;
      out(j, i) = -v;
    }
  return out;
}

enum class Verdict { Integrable, NonIntegrable, Inconclusive, Degenerate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Integrable: return "integrable";
    case Verdict::NonIntegrable: return "non_integrable";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Degenerate: return "degenerate";
  }
  return "?";
}

struct FrobeniusReport {
  SystemTag tag = SystemTag::Custom;
  Point point;
  int rank = 0;
  int kernel_dim = 0;
  std::vector<std::string> labels;
  std::vector<double> residuals;  // one per generator, in generator order
  std::vector<int> dropped;       // 0-based generators left out of the wedge
  double max_residual = 0.0;
  Verdict verdict = Verdict::Degenerate;
};

namespace detail {

inline void combinations(int n, int k, std::vector<int>& cur, int start, const std::function<void()>& visit) {
  if (static_cast<int>(cur.size()) == k) {
    visit();
    return;
  }
  for (int i = start; i <= n - (k - static_cast<int>(cur.size())); ++i) {
    cur.push_back(i);
    combinations(n, k, cur, i + 1, visit);
    cur.pop_back();
  }
}

// Largest |component| of omega ^ theta^1 ^ ... ^ theta^k, where omega is a
// 2-form and theta the k x n coefficient rows.
inline double wedge_max(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& theta) {
  const int n = static_cast<int>(omega.rows());
  const int k = static_cast<int>(theta.rows());
  if (k + 2 > n) return 0.0;
  double best = 0.0;
  std::vector<int> subset;
  Eigen::MatrixXd minor(k, k);
  combinations(n, k + 2, subset, 0, [&] {
    double comp = 0.0;
    for (int pp = 0; pp < k + 2; ++pp)
      for (int qq = pp + 1; qq < k + 2; ++qq) {
        const double o = omega(subset[static_cast<std::size_t>(pp)], subset[static_cast<std::size_t>(qq)]);
        if (o == 0.0) continue;
        int col = 0;
        for (int r = 0; r < k + 2; ++r) {
          if (r == pp || r == qq) continue;
          minor.col(col++) = theta.col(subset[static_cast<std::size_t>(r)]);
        }
        const double det = k == 0 ? 1.0 : minor.determinant();
        const double sign = ((pp + qq - 1) % 2 == 0) ? 1.0 : -1.0;
        comp += sign * o * det;
      }
    best = std::max(best, std::abs(comp));
  });
  return best;
}

}  // namespace detail

/// Frobenius test: every d theta^i ^ theta^1 ^ ... ^ theta^k must vanish.
/// Dependent generators are dropped from the wedge (greedily, in generator
/// order) but still get a residual against the kept ones.
inline FrobeniusReport frobenius_residual(const PfaffianSystem& sys, const Point& p,
                                          double tol = kDefaultFrobeniusTol, double rank_tol = kDefaultRankTol) {
  const std::vector<CoFormField> gens = sys.generators();
  const int n = sys.arity;
  FrobeniusReport rep;
  rep.tag = sys.tag;
  rep.point = p;

  std::vector<std::vector<Jet>> jets;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(gens.size()), n);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    jets.push_back(gens[i].jets(p));
    rep.labels.push_back(gens[i].label());
    for (int j = 0; j < n; ++j) rows(static_cast<Eigen::Index>(i), j) = jets.back()[static_cast<std::size_t>(j)].value();
  }
  const RankResult rk = rank_of_rows(rows, rank_tol);
  rep.rank = rk.rank;
  rep.kernel_dim = rk.kernel_dim;

  bool vanishing = false;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    if (rows.row(i).norm() <= kNormFloor) vanishing = true;

  // Greedy independent subset.
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(gens.size()); ++i) {
    std::vector<int> trial = kept;
    trial.push_back(i);
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(trial.size()), n);
    for (std::size_t r = 0; r < trial.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = rows.row(trial[r]);
    if (rank_of_rows(sub, rank_tol).rank == static_cast<int>(trial.size()))
      kept = std::move(trial);
    else
      rep.dropped.push_back(i);
  }
  Eigen::MatrixXd theta(static_cast<Eigen::Index>(kept.size()), n);
  double norm_product = 1.0;
  for (std::size_t r = 0; r < kept.size(); ++r) {
    theta.row(static_cast<Eigen::Index>(r)) = rows.row(kept[r]);
    norm_product *= std::max(rows.row(kept[r]).norm(), kNormFloor);
  }

  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::vector<Jet>& c = jets[i];
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    double grad_scale = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) grad_scale = std::max(grad_scale, std::abs(c[static_cast<std::size_t>(b)].derivative({a})));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const double v = c[static_cast<std::size_t>(b)].derivative({a}) - c[static_cast<std::size_t>(a)].derivative({b});
        omega(a, b) = v;
        omega(b, a) = -v;
      }
    const double omega_norm = omega.norm() / std::sqrt(2.0);
    double res = 0.0;
    // d theta^i is numerically zero: only cancellation noise is left.
    if (omega_norm > kNormFloor * std::max(1.0, grad_scale))
      res = detail::wedge_max(omega, theta) / (std::max(omega_norm, kNormFloor) * norm_product);
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }

  if (vanishing || kept.empty())
    rep.verdict = Verdict::Degenerate;
  else if (rep.max_residual < tol)
    rep.verdict = Verdict::Integrable;
  else if (rep.max_residual > kNonIntegrableThreshold)
    rep.verdict = Verdict::NonIntegrable;
  else
    rep.verdict = Verdict::Inconclusive;
  return rep;
}

}  // namespace goursat

#endif  // GOURSAT_EXTERIOR_HPP
