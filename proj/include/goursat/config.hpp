#ifndef GOURSAT_CONFIG_HPP
#define GOURSAT_CONFIG_HPP

// Run configuration: a line-oriented "key = value" file with [section]
// headers. The full grammar is in docs/FORMATS.md.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "goursat/classify.hpp"
#include "goursat/error.hpp"
#include "goursat/exterior.hpp"
#include "goursat/families.hpp"
#include "goursat/sampling.hpp"

namespace goursat {

enum class WebSourceKind { Expr, Family };

struct WebSource {
  WebSourceKind kind = WebSourceKind::Expr;
  std::string expr;
  FamilyKind family = FamilyKind::First;
  std::string phi, psi;
  double a0 = 0.0;
  std::string param = "a";
  std::string slot = "s";
};

struct Expectations {
  std::optional<bool> first_kind;
  std::optional<bool> second_kind;
  std::optional<bool> lemma1;
  std::vector<SystemTag> integrable;
  std::vector<SystemTag> non_integrable;
  bool empty() const {
    return !first_kind && !second_kind && !lemma1 && integrable.empty() && non_integrable.empty();
  }
};

struct RunConfig {
  int arity = 0;
  WebSource web;
  Box box;
  int count = 20;
  std::uint64_t seed = 1;
  double classify_tol = kDefaultClassifyTol;
  double frobenius_tol = kDefaultFrobeniusTol;
  int order = 3;
  std::vector<double> gauge;  // empty: zero gauge
  bool run_classify = true;
  bool run_frobenius = true;
  bool run_identities = true;
  std::vector<SystemTag> systems;  // empty: every system the arity allows
  int trials = 1000;
  Expectations expect;

  Gauge gauge_vector() const { return gauge.empty() ? Gauge::zero(arity) : Gauge{gauge}; }

  std::vector<SystemTag> frobenius_systems() const {
    if (!systems.empty()) return systems;
    std::vector<SystemTag> all{SystemTag::S10, SystemTag::S11, SystemTag::S12,
                               SystemTag::S13, SystemTag::S10_11, SystemTag::THETA_RHO};
    if (arity >= 5)
      for (SystemTag t : {SystemTag::DELTA2, SystemTag::DELTA3, SystemTag::DELTA4, SystemTag::DELTA4_35,
                          SystemTag::DELTA4P})
        all.push_back(t);
    return all;
  }

  void validate() const;
};

inline bool is_delta(SystemTag t) {
  return t == SystemTag::DELTA2 || t == SystemTag::DELTA3 || t == SystemTag::DELTA4 || t == SystemTag::DELTA4_35 ||
         t == SystemTag::DELTA4P;
}

inline void RunConfig::validate() const {
  if (arity < 4) throw ConfigError("arity must be >= 4");
  if (arity > 16) throw ConfigError("arity must be <= 16");
  bool needs5 = web.kind == WebSourceKind::Family && web.family == FamilyKind::Second;
  if (expect.second_kind) needs5 = true;
  if (run_frobenius)
    for (SystemTag t : frobenius_systems()) needs5 = needs5 || is_delta(t);
  for (SystemTag t : expect.integrable) needs5 = needs5 || is_delta(t);
  for (SystemTag t : expect.non_integrable) needs5 = needs5 || is_delta(t);
  if (needs5 && arity < 5) throw ConfigError("second-kind webs and Delta systems need arity >= 5");
  if (run_frobenius && arity > kMaxSystemArity) throw ConfigError("the frobenius suite supports arity <= 8");
  if (web.kind == WebSourceKind::Expr && web.expr.empty()) throw ConfigError("[web] needs expr or family");
  if (web.kind == WebSourceKind::Family && (web.phi.empty() || web.psi.empty()))
    throw ConfigError("family webs need both phi and psi");
  if (box.dimension() != arity) throw ConfigError("box has " + std::to_string(box.dimension()) +
                                                  " ranges for arity " + std::to_string(arity));
  box.validate();
  if (count < 1) throw ConfigError("count must be >= 1");
  if (!(classify_tol > 0.0) || !std::isfinite(classify_tol)) throw ConfigError("classify tolerance must be > 0");
  if (!(frobenius_tol > 0.0) || !std::isfinite(frobenius_tol)) throw ConfigError("frobenius tolerance must be > 0");
  if (order < 2 || order > 3) throw ConfigError("jet order must be 2 or 3");
  if ((run_frobenius || run_identities) && order < 3)
    throw ConfigError("frobenius and identities suites need jet order 3");
  if (!gauge.empty() && static_cast<int>(gauge.size()) != arity)
    throw ConfigError("gauge needs exactly " + std::to_string(arity) + " components");
  for (double w : gauge)
    if (!std::isfinite(w)) throw ConfigError("gauge components must be finite");
  if (trials < 1) throw ConfigError("trials must be >= 1");
}

namespace config_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace config_detail

inline double parse_real(std::string_view text) {
  const std::string s = config_detail::trim(text);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("not a finite number: '" + s + "'");
  return v;
}

template <class Int>
Int parse_integer(std::string_view text) {
  const std::string s = config_detail::trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

inline bool parse_bool(std::string_view text) {
  const std::string s = config_detail::trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const std::string& item : config_detail::split(text, ',')) out.push_back(parse_real(item));
  return out;
}

inline std::vector<SystemTag> parse_system_list(std::string_view text) {
  std::vector<SystemTag> out;
  for (const std::string& item : config_detail::split(text, ',')) {
    const auto tag = system_tag_from_string(item);
    if (!tag || *tag == SystemTag::Custom) throw ConfigError("unknown Pfaffian system '" + item + "'");
    if (std::find(out.begin(), out.end(), *tag) == out.end()) out.push_back(*tag);
  }
  return out;
}

/// "lo:hi" for every coordinate, or a comma-separated list of n ranges.
inline std::vector<std::pair<double, double>> parse_box(std::string_view text) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : config_detail::split(text, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("box range '" + item + "' is not lo:hi");
    out.emplace_back(parse_real(std::string_view(item).substr(0, colon)),
                     parse_real(std::string_view(item).substr(colon + 1)));
  }
  return out;
}

/// Applies a suite list ("classify", "frobenius", "identities", "all", or a
/// system name, which selects the frobenius suite restricted to it).
inline void apply_suites(RunConfig& cfg, const std::vector<std::string>& names) {
  cfg.run_classify = cfg.run_frobenius = cfg.run_identities = false;
  std::vector<SystemTag> systems;
  for (const std::string& raw : names) {
    const std::string name = config_detail::trim(raw);
    if (name == "all") {
      cfg.run_classify = cfg.run_frobenius = cfg.run_identities = true;
    } else if (name == "classify") {
      cfg.run_classify = true;
    } else if (name == "frobenius") {
      cfg.run_frobenius = true;
    } else if (name == "identities") {
      cfg.run_identities = true;
    } else if (auto tag = system_tag_from_string(name); tag && *tag != SystemTag::Custom) {
      cfg.run_frobenius = true;
      systems.push_back(*tag);
    } else {
      throw ConfigError("unknown suite '" + name + "'");
    }
  }
  if (!systems.empty()) cfg.systems = systems;
}

/// Parses config text. Errors carry "<source>:<line>: ".
inline RunConfig parse_config(std::string_view text, const std::string& source = "config") {
  RunConfig cfg;
  std::optional<std::vector<std::pair<double, double>>> box;
  std::optional<std::string> family;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;

  static const std::map<std::string, std::set<std::string>> kKeys{
      {"web", {"arity", "expr", "family", "phi", "psi", "a0", "param", "slot"}},
      {"sampling", {"box", "count", "seed"}},
      {"tolerances", {"classify", "frobenius", "order"}},
      {"gauge", {"w"}},
      {"suites", {"run", "frobenius", "trials"}},
      {"expect", {"first_kind", "second_kind", "lemma1", "integrable", "non_integrable"}},
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto fail = [&](const std::string& msg) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    const std::string line = config_detail::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = config_detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKeys.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of any section");
    const std::string key = config_detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = config_detail::trim(std::string_view(line).substr(eq + 1));
    if (!kKeys.at(section).count(key)) fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second) fail("duplicate key '" + key + "' in [" + section + "]");
    if (value.empty()) fail("empty value for '" + key + "'");

    try {
      if (section == "web") {
        if (key == "arity") cfg.arity = parse_integer<int>(value);
        else if (key == "expr") cfg.web.expr = value;
        else if (key == "family") family = value;
        else if (key == "phi") cfg.web.phi = value;
        else if (key == "psi") cfg.web.psi = value;
        else if (key == "a0") cfg.web.a0 = parse_real(value);
        else if (key == "param") cfg.web.param = value;
        else cfg.web.slot = value;
      } else if (section == "sampling") {
        if (key == "box") box = parse_box(value);
        else if (key == "count") cfg.count = parse_integer<int>(value);
        else cfg.seed = parse_integer<std::uint64_t>(value);
      } else if (section == "tolerances") {
        if (key == "classify") cfg.classify_tol = parse_real(value);
        else if (key == "frobenius") cfg.frobenius_tol = parse_real(value);
        else cfg.order = parse_integer<int>(value);
      } else if (section == "gauge") {
        cfg.gauge = parse_real_list(value);
      } else if (section == "suites") {
        if (key == "run") apply_suites(cfg, config_detail::split(value, ','));
        else if (key == "frobenius") cfg.systems = parse_system_list(value);
        else cfg.trials = parse_integer<int>(value);
      } else {
        if (key == "first_kind") cfg.expect.first_kind = parse_bool(value);
        else if (key == "second_kind") cfg.expect.second_kind = parse_bool(value);
        else if (key == "lemma1") cfg.expect.lemma1 = parse_bool(value);
        else if (key == "integrable") cfg.expect.integrable = parse_system_list(value);
        else cfg.expect.non_integrable = parse_system_list(value);
      }
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  if (!seen.count("web.arity")) throw ConfigError(source + ": missing [web] arity");
  if (family) {
    if (!cfg.web.expr.empty()) throw ConfigError(source + ": [web] takes either expr or family, not both");
    cfg.web.kind = WebSourceKind::Family;
    if (*family == "first") cfg.web.family = FamilyKind::First;
    else if (*family == "second") cfg.web.family = FamilyKind::Second;
    else throw ConfigError(source + ": family must be 'first' or 'second'");
  } else if (!cfg.web.phi.empty() || !cfg.web.psi.empty()) {
    throw ConfigError(source + ": phi/psi given without family");
  }
  if (!box) box = std::vector<std::pair<double, double>>{{0.5, 1.5}};
  if (box->size() == 1 && cfg.arity > 1) box->resize(static_cast<std::size_t>(std::max(cfg.arity, 1)), box->front());
  cfg.box = Box{*box};
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

/// Builds the web described by a config; bad expressions become ConfigError.
inline WebFunction build_web(const RunConfig& cfg) {
  try {
    if (cfg.web.kind == WebSourceKind::Expr) return WebFunction::from_expr(parse(cfg.web.expr, cfg.arity));
    const FamilySpec spec = FamilySpec::from_text(cfg.web.family, cfg.web.phi, cfg.web.psi, cfg.arity, cfg.web.a0, {},
                                                  cfg.web.param, cfg.web.slot);
    return family_web(spec);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad web expression: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("bad web definition: ") + e.what());
  }
}

}  // namespace goursat

#endif  // GOURSAT_CONFIG_HPP
