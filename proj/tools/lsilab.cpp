#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lsilab/experiments.hpp"
#include "lsilab/property_suite.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_override,
                const std::string& format_override) {
  lsilab::ExperimentConfig cfg = lsilab::load_config(config_path);
  if (!format_override.empty()) cfg.format = format_override;
  if (!out_override.empty()) cfg.out = out_override;

  const std::vector<lsilab::ReportRow> rows = lsilab::run_experiment(cfg);

  std::ostringstream body;
  if (cfg.format == "json")
    lsilab::emit_json(rows, body);
  else
    lsilab::emit_csv(rows, body);

  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(cfg.out);
    out << body.str();
    out.flush();
    if (!out.good())
      throw lsilab::ConfigError("cannot write output file '" + cfg.out + "'");
  }
  return lsilab::all_flags_pass(rows) ? 0 : 1;
}

int list_formulas_command() {
  for (const lsilab::FormulaInfo& f : lsilab::formula_catalog())
    std::printf("%-16s %-5s %-6s [%s]  %s\n", f.id.c_str(),
                lsilab::to_string(f.target), lsilab::to_string(f.direction),
                f.parameters.c_str(), f.expression.c_str());
  return 0;
}

int selfcheck_command(std::uint64_t seed, int instances) {
  bool all_pass = true;
  for (const lsilab::PropertyCheck& check :
       lsilab::run_measure_property_suite(seed, instances)) {
    std::printf("%s  %-34s instances=%d worst=%.3e tolerance=%.0e\n",
                check.pass ? "PASS" : "FAIL", check.name.c_str(),
                check.instances, check.worst, check.tolerance);
    all_pass = all_pass && check.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for log-Sobolev and Poincare constants of "
      "mixture measures: closed-form bounds with spectral and variational "
      "cross-checks"};
  app.require_subcommand(1);

  std::string config_path, out_override, format_override;
  CLI::App* run = app.add_subcommand("run", "execute the sweep described by a config file");
  run->add_option("config", config_path, "path to a flat key/value config file")
      ->required();
  run->add_option("--out", out_override, "output path, overrides the config key");
  run->add_option("--format", format_override, "json or csv, overrides the config key")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* list = app.add_subcommand("list-formulas", "print the formula catalog");

  std::uint64_t seed = 0;
  int instances = 10000;
  CLI::App* selfcheck =
      app.add_subcommand("selfcheck", "run the randomized property suite");
  selfcheck->add_option("--seed", seed, "property suite RNG seed");
  selfcheck->add_option("--instances", instances, "instances per property")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, out_override, format_override);
    if (list->parsed()) return list_formulas_command();
    return selfcheck_command(seed, instances);
  } catch (const std::exception& e) {
    std::cerr << "lsilab: " << e.what() << '\n';
    return 2;
  }
}
