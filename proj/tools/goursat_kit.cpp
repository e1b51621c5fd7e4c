// goursat-kit: batch verification front end.
//   goursat-kit run --config FILE [--json OUT] [overrides...]
//   goursat-kit selftest [--list]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "goursat/goursat.hpp"

namespace {

using goursat::Json;

struct RunOptions {
  std::string config;
  std::string json;
  std::string expr;
  std::optional<int> arity;
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> order;
  std::vector<std::string> suites;
  std::string gauge;
  bool quiet = false;
};

bool write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << j.dump(2) << "\n";
  return static_cast<bool>(out);
}

goursat::RunConfig assemble(const RunOptions& o) {
  goursat::RunConfig cfg;
  if (!o.config.empty()) {
    cfg = goursat::load_config(o.config);
  } else {
    if (o.expr.empty() || !o.arity) throw goursat::ConfigError("either --config or both --expr and --arity are required");
    std::string text = "[web]\narity = " + std::to_string(*o.arity) + "\nexpr = " + o.expr + "\n";
    cfg = goursat::parse_config(text, "command line");
  }
  if (!o.config.empty() && (!o.expr.empty() || o.arity)) throw goursat::ConfigError("--expr/--arity conflict with --config");
  if (o.points) cfg.count = *o.points;
  if (o.seed) cfg.seed = *o.seed;
  if (o.tol) cfg.classify_tol = cfg.frobenius_tol = *o.tol;
  if (o.order) cfg.order = *o.order;
  if (!o.suites.empty()) goursat::apply_suites(cfg, o.suites);
  if (!o.gauge.empty()) cfg.gauge = goursat::parse_real_list(o.gauge);
  return cfg;
}

int do_run(const RunOptions& o) {
  goursat::RunConfig cfg;
  try {
    cfg = assemble(o);
    cfg.validate();
  } catch (const goursat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return goursat::kExitConfig;
  }
  try {
    const goursat::RunReport rep = goursat::run(cfg);
    const Json j = goursat::to_json(rep);
    if (!o.quiet) std::cout << goursat::human_report(rep);
    if (!o.json.empty() && !write_json(o.json, j)) return goursat::kExitConfig;
    return goursat::exit_code_of(j);
  } catch (const goursat::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return goursat::kExitConfig;
  } catch (const goursat::Error& e) {
    // sampling or evaluator failure before any suite could run
    std::cerr << "error: " << e.what() << "\n";
    if (!o.json.empty()) {
      Json meta{{"schema", goursat::kSchemaVersion},
                {"tool_version", goursat::kToolVersion},
                {"failures", Json::array({Json{{"suite", "sampling"}, {"where", ""}, {"what", e.what()}}})},
                {"status", "numerical_failure"},
                {"exit_code", goursat::kExitNumerical}};
      write_json(o.json, Json{{"meta", meta}, {"classification", nullptr}, {"frobenius", nullptr}, {"identities", nullptr}});
    }
    return goursat::kExitNumerical;
  }
}

int do_selftest(bool list, const std::vector<std::string>& overrides) {
  std::vector<goursat::SelfCheck> corpus = goursat::selftest_corpus();
  if (list) {
    for (const auto& c : corpus) std::cout << c.name << "\n";
    return 0;
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    bool applied = false;
    try {
      if (eq == std::string::npos) throw goursat::ConfigError("expected NAME=VALUE");
      const double v = goursat::parse_real(ov.substr(eq + 1));
      for (auto& c : corpus)
        if (c.name == ov.substr(0, eq)) c.expected = v, applied = true;
    } catch (const goursat::Error& e) {
      std::cerr << "error: bad --expect '" << ov << "': " << e.what() << "\n";
      return goursat::kExitConfig;
    }
    if (!applied) {
      std::cerr << "error: no check named '" << ov.substr(0, eq) << "'\n";
      return goursat::kExitConfig;
    }
  }
  return goursat::run_selftest(corpus, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goursat web verification toolkit"};
  app.set_version_flag("--version", goursat::kToolVersion);
  app.require_subcommand(1);

  RunOptions ro;
  CLI::App* run = app.add_subcommand("run", "classify a web and run the Frobenius and identity suites");
  run->add_option("--config", ro.config, "config file")->check(CLI::ExistingFile);
  run->add_option("--json", ro.json, "write the machine-readable report here");
  run->add_option("--expr", ro.expr, "web expression F(x1..xn), used without --config");
  run->add_option("--arity", ro.arity, "number of variables for --expr");
  run->add_option("--points", ro.points, "number of regular sample points");
  run->add_option("--seed", ro.seed, "sampling seed");
  run->add_option("--tol", ro.tol, "classification and Frobenius tolerance");
  run->add_option("--order", ro.order, "jet order (2 or 3)");
  run->add_option("--suite", ro.suites, "classify | frobenius | identities | all | a system name (repeatable)");
  run->add_option("--gauge", ro.gauge, "gauge vector \"w1,...,wn\"");
  run->add_flag("--quiet", ro.quiet, "suppress the human-readable report");

  bool list = false;
  std::vector<std::string> overrides;
  CLI::App* self = app.add_subcommand("selftest", "run the bundled example corpus");
  self->add_flag("--list", list, "print check names without running them");
  self->add_option("--expect", overrides, "override an expected value, NAME=VALUE (harness testing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return goursat::kExitConfig;
  }

  if (run->parsed()) return do_run(ro);
  return do_selftest(list, overrides);
}
