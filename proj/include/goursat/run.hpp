#ifndef GOURSAT_RUN_HPP
#define GOURSAT_RUN_HPP

// Batch driver: config -> RunReport -> JSON / human text. Numerical failures
// inside a suite are recorded, never thrown; only config problems and an
// unusable sampling box escape as exceptions.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "goursat/classify.hpp"
#include "goursat/config.hpp"
#include "goursat/exterior.hpp"
#include "goursat/identities.hpp"
#include "goursat/sampling.hpp"
#include "json.hpp"

namespace goursat {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "goursat-kit/1";

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2, kExitNumerical = 3 };

struct FailureRecord {
  std::string suite;
  std::string where;
  std::string what;
};

struct Assertion {
  std::string name;
  std::string expected;
  std::string actual;
  bool passed = false;
};

struct SystemRun {
  SystemTag tag = SystemTag::Custom;
  int generic_kernel_dim = 0;
  std::optional<int> special_kernel_dim;
  std::vector<std::optional<FrobeniusReport>> points;  // nullopt where evaluation failed
  double max_residual = 0.0;
  std::string verdict = "degenerate";  // integrable | non_integrable | mixed | degenerate
};

/// Summary verdict over sample points: all integrable, at least 90% of the
/// non-degenerate ones non-integrable, nothing usable, or mixed.
inline std::string summarize_verdicts(const std::vector<std::optional<FrobeniusReport>>& pts) {
  int usable = 0, integrable = 0, non_integrable = 0;
  for (const auto& r : pts) {
    if (!r || r->verdict == Verdict::Degenerate) continue;
    ++usable;
    if (r->verdict == Verdict::Integrable) ++integrable;
    if (r->verdict == Verdict::NonIntegrable) ++non_integrable;
  }
  if (usable == 0) return "degenerate";
  if (integrable == static_cast<int>(pts.size())) return "integrable";
  if (10 * non_integrable >= 9 * usable) return "non_integrable";
  return "mixed";
}

struct WebIdentityPoint {
  std::array<Residual, 4> lemma1{};
  std::optional<ABC> abc_values;
  double lemma2_quadratic = 0.0, lemma2_cubic = 0.0;  // worst relative over the 12 selections
  std::optional<ConditionValues> conditions;
};

struct PropertyCheck {
  std::string name;
  int trials = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool passed = false;
  std::string note;
};

struct IdentitiesRun {
  std::vector<std::optional<WebIdentityPoint>> points;
  double max_lemma1_relative = 0.0;
  std::optional<IdentityReport> remark;
  std::optional<WitnessResult> witness;
  std::vector<PropertyCheck> properties;
};

struct RunReport {
  RunConfig config;
  std::vector<Point> points;
  int rejected = 0;
  std::optional<ClassificationReport> classification;
  std::optional<std::vector<SystemRun>> frobenius;
  std::optional<IdentitiesRun> identities;
  std::vector<std::pair<std::string, double>> timing;  // seconds per suite, then "total"
  std::vector<Assertion> assertions;
  std::vector<FailureRecord> failures;
  std::vector<std::string> skipped;  // expectations whose suite was not selected

  bool assertions_passed() const {
    for (const Assertion& a : assertions)
      if (!a.passed) return false;
    return true;
  }
  int exit_code() const {
    if (!failures.empty()) return kExitNumerical;
    return assertions_passed() ? kExitOk : kExitAssertion;
  }
  std::string status() const {
    switch (exit_code()) {
      case kExitOk: return "ok";
      case kExitAssertion: return "assertion_failed";
      default: return "numerical_failure";
    }
  }
};

namespace run_detail {

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string b(bool v) { return v ? "true" : "false"; }

inline PropertyCheck lemma2_property(int trials, std::uint64_t seed) {
  PropertyCheck c{"lemma2_constrained", trials, 0.0, 1e-10, false, ""};
  std::mt19937_64 rng(seed);
  double free_worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    TorsionSample s = sample_torsion(rng, true);
    if (!s.ok) continue;
    for (const Lemma2Entry& e : lemma2_residuals(s.t))
      c.worst = std::max({c.worst, e.quadratic.relative(), e.cubic.relative()});
    for (const Lemma2Entry& e : lemma2_residuals(sample_torsion(rng, false).t))
      free_worst = std::max(free_worst, e.quadratic.relative());
  }
  c.passed = c.worst <= c.tol && free_worst > 1e-3;
  std::ostringstream note;
  note << "worst unconstrained violation " << free_worst;
  c.note = note.str();
  return c;
}

inline PropertyCheck residual40_property(int trials, std::uint64_t seed) {
  PropertyCheck c{"residual40_equals_n1_minus_n2", trials, 0.0, 1e-13, false, ""};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    const TorsionTensor t = sample_torsion(rng, false).t;
    const ConditionValues v = condition_values(t, sample_derivs(rng, 5, Gauge::zero(5)));
    const double scale = std::max({1.0, v.n[0].scale, v.n[1].scale});
    c.worst = std::max(c.worst, std::abs(v.residual40.value - (v.n[0].value - v.n[1].value)) / scale);
  }
  c.passed = c.worst <= c.tol;
  return c;
}

}  // namespace run_detail

/// Executes the requested suites. Throws ConfigError for an invalid config or
/// web, SamplingError when the box has too few regular points.
inline RunReport run(const RunConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  cfg.validate();
  RunReport rep;
  rep.config = cfg;
  const WebFunction web = build_web(cfg);

  {
    const auto t0 = clock::now();
    RegularSample s = sample_regular_points(web, cfg.box, cfg.count, cfg.seed, cfg.order);
    rep.points = std::move(s.points);
    rep.rejected = s.rejected;
    rep.timing.emplace_back("sampling", run_detail::elapsed(t0));
  }

  if (cfg.run_classify) {
    const auto t0 = clock::now();
    std::vector<PointClassification> pcs;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      try {
        pcs.push_back(classify_point(web, rep.points[i]));
      } catch (const Error& e) {
        rep.failures.push_back({"classification", "point " + std::to_string(i), e.what()});
      }
    }
    rep.classification = summarize(std::move(pcs), rep.rejected, cfg.classify_tol);
    rep.timing.emplace_back("classification", run_detail::elapsed(t0));
  }

  if (cfg.run_frobenius) {
    const auto t0 = clock::now();
    rep.frobenius.emplace();
    for (SystemTag tag : cfg.frobenius_systems()) {
      const PfaffianSystem sys = make_system(web, tag);
      SystemRun sr{tag, sys.generic_kernel_dim, sys.special_kernel_dim, {}, 0.0, "degenerate"};
      for (std::size_t i = 0; i < rep.points.size(); ++i) {
        try {
          FrobeniusReport fr = frobenius_residual(sys, rep.points[i], cfg.frobenius_tol);
          sr.max_residual = std::max(sr.max_residual, fr.max_residual);
          sr.points.emplace_back(std::move(fr));
        } catch (const Error& e) {
          sr.points.emplace_back(std::nullopt);
          rep.failures.push_back({"frobenius", std::string(to_string(tag)) + " point " + std::to_string(i), e.what()});
        }
      }
      sr.verdict = summarize_verdicts(sr.points);
      if (sr.verdict == "degenerate")
        rep.failures.push_back({"frobenius", to_string(tag), "system degenerate at every sample point"});
      rep.frobenius->push_back(std::move(sr));
    }
    rep.timing.emplace_back("frobenius", run_detail::elapsed(t0));
  }

  if (cfg.run_identities) {
    const auto t0 = clock::now();
    IdentitiesRun ir;
    const Gauge g = cfg.gauge_vector();
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      try {
        const TorsionTensor t = torsion(web, rep.points[i]);
        const PfaffianDerivs d = pfaffian_derivs(web, rep.points[i], g);
        WebIdentityPoint wp;
        wp.lemma1 = lemma1_residuals(t, d);
        for (const Residual& r : wp.lemma1) ir.max_lemma1_relative = std::max(ir.max_lemma1_relative, r.relative());
        if (cfg.arity >= 5) {
          wp.abc_values = abc(t);
          for (const Lemma2Entry& e : lemma2_residuals(t)) {
            wp.lemma2_quadratic = std::max(wp.lemma2_quadratic, e.quadratic.relative());
            wp.lemma2_cubic = std::max(wp.lemma2_cubic, e.cubic.relative());
          }
          wp.conditions = condition_values(t, d);
        }
        ir.points.emplace_back(std::move(wp));
      } catch (const Error& e) {
        ir.points.emplace_back(std::nullopt);
        rep.failures.push_back({"identities", "point " + std::to_string(i), e.what()});
      }
    }
    try {
      ir.remark = remark_implication_test(cfg.trials, cfg.seed);
    } catch (const Error& e) {
      rep.failures.push_back({"identities", "remark_mnr", e.what()});
    }
    ir.witness = witness_s_not_uv(cfg.trials, cfg.seed);
    ir.properties.push_back(run_detail::lemma2_property(cfg.trials, cfg.seed));
    ir.properties.push_back(run_detail::residual40_property(cfg.trials, cfg.seed));
    rep.identities = std::move(ir);
    rep.timing.emplace_back("identities", run_detail::elapsed(t0));
  }

  // Assertions: config expectations first, then the built-in property checks.
  const Expectations& ex = cfg.expect;
  if (ex.first_kind) {
    if (!rep.classification)
      rep.skipped.push_back("expect.first_kind");
    else
      rep.assertions.push_back({"expect.first_kind", run_detail::b(*ex.first_kind),
                                run_detail::b(rep.classification->first_kind),
                                rep.classification->first_kind == *ex.first_kind});
  }
  if (ex.second_kind) {
    if (!rep.classification || !rep.classification->second_kind)
      rep.skipped.push_back("expect.second_kind");
    else
      rep.assertions.push_back({"expect.second_kind", run_detail::b(*ex.second_kind),
                                run_detail::b(*rep.classification->second_kind),
                                *rep.classification->second_kind == *ex.second_kind});
  }
  if (ex.lemma1) {
    if (!rep.identities) {
      rep.skipped.push_back("expect.lemma1");
    } else {
      const bool holds = rep.identities->max_lemma1_relative <= cfg.classify_tol;
      rep.assertions.push_back({"expect.lemma1", run_detail::b(*ex.lemma1), run_detail::b(holds), holds == *ex.lemma1});
    }
  }
  auto verdict_of = [&](SystemTag tag) -> std::optional<std::string> {
    if (!rep.frobenius) return std::nullopt;
    for (const SystemRun& sr : *rep.frobenius)
      if (sr.tag == tag) return sr.verdict;
    return std::nullopt;
  };
  for (const auto& [list, want] : {std::pair{&ex.integrable, "integrable"}, std::pair{&ex.non_integrable, "non_integrable"}})
    for (SystemTag tag : *list) {
      const auto got = verdict_of(tag);
      const std::string name = std::string("expect.") + want + "." + to_string(tag);
      if (!got)
        rep.skipped.push_back(name);
      else
        rep.assertions.push_back({name, want, *got, *got == want});
    }
  if (rep.identities) {
    const IdentitiesRun& ir = *rep.identities;
    if (ir.remark) {
      std::ostringstream s;
      s << ir.remark->worst;
      rep.assertions.push_back({"identities.remark_mnr", "<= 1e-08", s.str(), ir.remark->passed});
    }
    rep.assertions.push_back({"identities.witness_s_not_uv", "found", ir.witness->found ? "found" : "not found",
                              ir.witness->found});
    for (const PropertyCheck& c : ir.properties) {
      std::ostringstream want, got;
      want << "<= " << c.tol;
      got << c.worst;
      rep.assertions.push_back({"identities." + c.name, want.str(), got.str(), c.passed});
    }
  }
  rep.timing.emplace_back("total", run_detail::elapsed(t_start));
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

namespace run_detail {

inline Json residual_json(const Residual& r) {
  return Json{{"value", r.value}, {"scale", r.scale}, {"relative", r.relative()}};
}

inline Json point_json(const Point& p) { return Json(p.vector()); }

inline Json config_json(const RunConfig& c) {
  Json web{{"source", c.web.kind == WebSourceKind::Expr ? "expr" : "family"}};
  if (c.web.kind == WebSourceKind::Expr) {
    web["expr"] = c.web.expr;
  } else {
    web["family"] = to_string(c.web.family);
    web["phi"] = c.web.phi;
    web["psi"] = c.web.psi;
    web["a0"] = c.web.a0;
    web["param"] = c.web.param;
    web["slot"] = c.web.slot;
  }
  Json box = Json::array();
  for (const auto& [lo, hi] : c.box.ranges) box.push_back(Json::array({lo, hi}));
  Json systems = Json::array();
  if (c.run_frobenius)
    for (SystemTag t : c.frobenius_systems()) systems.push_back(to_string(t));
  Json expect = Json::object();
  if (c.expect.first_kind) expect["first_kind"] = *c.expect.first_kind;
  if (c.expect.second_kind) expect["second_kind"] = *c.expect.second_kind;
  if (c.expect.lemma1) expect["lemma1"] = *c.expect.lemma1;
  if (!c.expect.integrable.empty()) {
    expect["integrable"] = Json::array();
    for (SystemTag t : c.expect.integrable) expect["integrable"].push_back(to_string(t));
  }
  if (!c.expect.non_integrable.empty()) {
    expect["non_integrable"] = Json::array();
    for (SystemTag t : c.expect.non_integrable) expect["non_integrable"].push_back(to_string(t));
  }
  return Json{{"arity", c.arity},
              {"web", web},
              {"sampling", {{"box", box}, {"count", c.count}, {"seed", c.seed}}},
              {"tolerances", {{"classify", c.classify_tol}, {"frobenius", c.frobenius_tol}, {"order", c.order}}},
              {"gauge", c.gauge_vector().w},
              {"suites",
               {{"classify", c.run_classify},
                {"frobenius", c.run_frobenius},
                {"identities", c.run_identities},
                {"systems", systems},
                {"trials", c.trials}}},
              {"expect", expect}};
}

inline Json classification_json(const ClassificationReport& r) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const PointClassification& pc = r.points[i];
    Json first = residual_json(pc.first.residual);
    first["degenerate"] = pc.first.degenerate;
    Json p{{"index", i}, {"x", point_json(pc.point)}, {"first", first}, {"first_pde", residual_json(pc.first_pde)}};
    if (pc.second) {
      const SecondKindResiduals& s = *pc.second;
      p["second"] = Json{{"det24", s.det24},   {"sum25", s.sum25}, {"expr26", s.expr26}, {"cross27", s.cross27},
                         {"scale", s.scale},   {"relative", s.relative()}, {"degenerate", s.degenerate}};
      p["second_pde"] = residual_json(*pc.second_pde);
    } else {
      p["second"] = nullptr;
      p["second_pde"] = nullptr;
    }
    pts.push_back(std::move(p));
  }
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"tol", r.tol},
              {"first_kind", r.first_kind},
              {"second_kind", r.second_kind ? Json(*r.second_kind) : Json(nullptr)},
              {"max_first_relative", r.max_first_relative},
              {"max_first_pde_relative", r.max_first_pde_relative},
              {"max_second_relative", opt(r.max_second_relative)},
              {"max_second_pde_relative", opt(r.max_second_pde_relative)},
              {"first_degenerate_points", r.first_degenerate_points},
              {"second_degenerate_points", r.second_degenerate_points},
              {"rejected", r.rejected},
              {"points", pts}};
}

inline Json frobenius_json(const std::vector<SystemRun>& runs) {
  Json out = Json::array();
  for (const SystemRun& sr : runs) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < sr.points.size(); ++i) {
      if (!sr.points[i]) {
        pts.push_back(Json{{"index", i}, {"error", true}});
        continue;
      }
      const FrobeniusReport& f = *sr.points[i];
      Json gens = Json::array();
      for (std::size_t g = 0; g < f.labels.size(); ++g)
        gens.push_back(Json{{"label", f.labels[g]}, {"residual", f.residuals[g]}});
      pts.push_back(Json{{"index", i},
                         {"rank", f.rank},
                         {"kernel_dim", f.kernel_dim},
                         {"max_residual", f.max_residual},
                         {"verdict", to_string(f.verdict)},
                         {"dropped", f.dropped},
                         {"generators", gens}});
    }
    out.push_back(Json{{"system", to_string(sr.tag)},
                       {"generic_kernel_dim", sr.generic_kernel_dim},
                       {"special_kernel_dim", sr.special_kernel_dim ? Json(*sr.special_kernel_dim) : Json(nullptr)},
                       {"verdict", sr.verdict},
                       {"max_residual", sr.max_residual},
                       {"points", pts}});
  }
  return out;
}

inline Json identities_json(const IdentitiesRun& ir) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < ir.points.size(); ++i) {
    if (!ir.points[i]) {
      pts.push_back(Json{{"index", i}, {"error", true}});
      continue;
    }
    const WebIdentityPoint& wp = *ir.points[i];
    Json l1 = Json::array();
    for (const Residual& r : wp.lemma1) l1.push_back(residual_json(r));
    Json p{{"index", i}, {"lemma1", l1}};
    if (wp.abc_values) {
      p["abc"] = Json{{"A", wp.abc_values->A}, {"B", wp.abc_values->B}, {"C", wp.abc_values->C},
                      {"sum", residual_json(wp.abc_values->sum)}};
      p["lemma2"] = Json{{"quadratic_max_relative", wp.lemma2_quadratic}, {"cubic_max_relative", wp.lemma2_cubic}};
      const ConditionValues& v = *wp.conditions;
      auto list = [](const auto& rs) {
        Json a = Json::array();
        for (const Residual& r : rs) a.push_back(residual_json(r));
        return a;
      };
      p["conditions"] = Json{{"m", list(v.m)}, {"n", list(v.n)}, {"r", list(v.r)}, {"s", list(v.s)},
                             {"uv", list(v.uv)}, {"residual40", residual_json(v.residual40)}};
    }
    pts.push_back(std::move(p));
  }
  Json out{{"max_lemma1_relative", ir.max_lemma1_relative}, {"points", pts}};
  if (ir.remark) {
    Json per = Json::object();
    for (const auto& [k, v] : ir.remark->max_relative) per[k] = v;
    out["remark_mnr"] = Json{{"trials", ir.remark->trials}, {"seed", ir.remark->seed},
                             {"rejected", ir.remark->rejected}, {"tol", ir.remark->tol},
                             {"worst", ir.remark->worst},   {"passed", ir.remark->passed},
                             {"max_relative", per}};
  } else {
    out["remark_mnr"] = nullptr;
  }
  const WitnessResult& w = *ir.witness;
  out["witness_s_not_uv"] = Json{{"found", w.found}, {"trial", w.trial}, {"trials_run", w.trials_run},
                                 {"s_residual", w.s_residual}, {"uv_residual", w.uv_residual}};
  Json props = Json::array();
  for (const PropertyCheck& c : ir.properties)
    props.push_back(Json{{"name", c.name}, {"trials", c.trials}, {"worst", c.worst}, {"tol", c.tol},
                         {"passed", c.passed}, {"note", c.note}});
  out["properties"] = props;
  return out;
}

// Replaces NaN/Inf by null and records where they were.
inline void sanitize(Json& j, const std::string& path, std::vector<FailureRecord>& failures) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      failures.push_back({"json", path.empty() ? "/" : path, std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")});
      j = nullptr;
    }
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) sanitize(it.value(), path + "/" + it.key(), failures);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) sanitize(j[i], path + "/" + std::to_string(i), failures);
  }
}

}  // namespace run_detail

/// Machine report. Non-finite numbers are nulled and listed in
/// meta.failures, which also moves the status to numerical_failure.
inline Json to_json(const RunReport& rep) {
  using namespace run_detail;
  Json body{{"classification", rep.classification ? classification_json(*rep.classification) : Json(nullptr)},
            {"frobenius", rep.frobenius ? frobenius_json(*rep.frobenius) : Json(nullptr)},
            {"identities", rep.identities ? identities_json(*rep.identities) : Json(nullptr)}};
  std::vector<FailureRecord> failures = rep.failures;
  Json pts = Json::array();
  for (const Point& p : rep.points) pts.push_back(point_json(p));
  Json cfg = config_json(rep.config);
  sanitize(body, "", failures);
  sanitize(pts, "/meta/points", failures);

  Json asserts = Json::array();
  for (const Assertion& a : rep.assertions)
    asserts.push_back(Json{{"name", a.name}, {"expected", a.expected}, {"actual", a.actual}, {"passed", a.passed}});
  Json fails = Json::array();
  for (const FailureRecord& f : failures) fails.push_back(Json{{"suite", f.suite}, {"where", f.where}, {"what", f.what}});
  Json timing = Json::object();
  for (const auto& [k, v] : rep.timing) timing[k] = v;

  bool passed = true;
  for (const Assertion& a : rep.assertions) passed = passed && a.passed;
  const int code = !failures.empty() ? kExitNumerical : passed ? kExitOk : kExitAssertion;
  const char* status = code == kExitOk ? "ok" : code == kExitAssertion ? "assertion_failed" : "numerical_failure";

  Json meta{{"schema", kSchemaVersion},
            {"tool_version", kToolVersion},
            {"config", cfg},
            {"points", pts},
            {"rejected", rep.rejected},
            {"timing", timing},
            {"assertions", asserts},
            {"skipped", rep.skipped},
            {"failures", fails},
            {"status", status},
            {"exit_code", code}};
  Json out{{"meta", meta}};
  for (auto& [k, v] : body.items()) out[k] = v;
  return out;
}

/// Exit code implied by a serialized report (accounts for nulled numbers).
inline int exit_code_of(const Json& report) { return report.at("meta").at("exit_code").get<int>(); }

/// Human-readable summary for stdout.
inline std::string human_report(const RunReport& rep) {
  std::ostringstream o;
  const RunConfig& c = rep.config;
  o << "goursat-kit " << kToolVersion << "\n";
  o << "web: n=" << c.arity << ", ";
  if (c.web.kind == WebSourceKind::Expr)
    o << "F = " << c.web.expr << "\n";
  else
    o << to_string(c.web.family) << "-kind family, phi = " << c.web.phi << ", psi = " << c.web.psi << "\n";
  o << "sample: " << rep.points.size() << " regular points (" << rep.rejected << " rejected), seed " << c.seed << "\n";
  if (rep.classification) {
    const ClassificationReport& r = *rep.classification;
    o << "\n[classification] tol " << r.tol << "\n";
    o << "  first kind:  " << (r.first_kind ? "yes" : "no") << "  (torsion " << r.max_first_relative << ", pde "
      << r.max_first_pde_relative << ")\n";
    if (r.second_kind)
      o << "  second kind: " << (*r.second_kind ? "yes" : "no") << "  (torsion " << *r.max_second_relative << ", pde "
        << *r.max_second_pde_relative << ")\n";
  }
  if (rep.frobenius) {
    o << "\n[frobenius] tol " << c.frobenius_tol << "\n";
    for (const SystemRun& sr : *rep.frobenius) {
      std::string name = to_string(sr.tag);
      name.resize(std::max<std::size_t>(name.size(), 10), ' ');
      o << "  " << name << " " << sr.verdict << "  max residual " << sr.max_residual << "\n";
    }
  }
  if (rep.identities) {
    const IdentitiesRun& ir = *rep.identities;
    o << "\n[identities]\n";
    o << "  lemma1 max relative at sample points: " << ir.max_lemma1_relative << "\n";
    if (ir.remark) o << "  remark (any two of m, n, r imply the third): worst " << ir.remark->worst << "\n";
    o << "  s conditions without u/v: " << (ir.witness->found ? "witness found" : "no witness") << "\n";
    for (const PropertyCheck& p : ir.properties) o << "  " << p.name << ": worst " << p.worst << "\n";
  }
  if (!rep.assertions.empty()) {
    o << "\n[assertions]\n";
    for (const Assertion& a : rep.assertions)
      o << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << " (expected " << a.expected << ", got " << a.actual
        << ")\n";
  }
  if (!rep.skipped.empty()) {
    o << "\n[skipped]\n";
    for (const std::string& s : rep.skipped) o << "  " << s << " (suite not selected)\n";
  }
  if (!rep.failures.empty()) {
    o << "\n[failures]\n";
    for (const FailureRecord& f : rep.failures) o << "  " << f.suite << " " << f.where << ": " << f.what << "\n";
  }
  o << "\nstatus: " << rep.status() << "\n";
  return o.str();
}

}  // namespace goursat

#endif  // GOURSAT_RUN_HPP
