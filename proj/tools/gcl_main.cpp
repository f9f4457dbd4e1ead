// gcl: command-line front end.
//   gcl <command> --config run.json [--output dir] [--plot] [--strict]
//       [--workers k] [--seed s]
#include <algorithm>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gcl/config.hpp"
#include "gcl/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Groupoid classical-limit laboratory"};
  std::string command, config_path, output;
  bool plot = false, strict = false;
  int workers = 0;
  long long seed = -1;

  std::string names;
  for (const auto& n : gcl::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--output", output, "output directory (overrides the config)");
  app.add_flag("--plot", plot, "write an SVG plot where the command has one");
  app.add_flag("--strict", strict, "promote decay warnings to errors");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for sampled checks")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  nlohmann::json patch = nlohmann::json::object();
  if (!output.empty()) patch["output"] = output;
  if (plot) patch["plot"] = true;
  if (strict) patch["strict"] = true;
  if (workers > 0) patch["workers"] = workers;
  if (seed >= 0) patch["seed"] = seed;

  gcl::RunConfig cfg;
  try {
    cfg = gcl::load_config(config_path, patch);
    const auto known = gcl::command_names();
    if (std::find(known.begin(), known.end(), command) == known.end()) {
      throw gcl::ConfigError({"unknown command '" + command + "' (expected " + names + ")"});
    }
  } catch (const gcl::ConfigError& e) {
    for (const auto& v : e.violations()) std::cerr << "config error: " << v << "\n";
    return 2;
  }
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  gcl::set_worker_count(cfg.workers);

  try {
    const gcl::ReportBundle bundle = gcl::run_command(command, cfg);
    gcl::write_bundle(bundle, cfg.output);
    for (const auto& c : bundle.criteria) {
      std::printf("%-28s %s  %.6g (%s)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.value,
                  c.rule.c_str());
    }
    if (bundle.computation_failed) {
      std::cerr << "error: " << bundle.summary["error"].get<std::string>() << "\n";
    }
    std::printf("%s: %s\n", command.c_str(), bundle.passed() ? "pass" : "fail");
    return bundle.exit_code();
  } catch (const gcl::ConfigError& e) {
    for (const auto& v : e.violations()) std::cerr << "config error: " << v << "\n";
    try {
      gcl::ReportBundle b;
      b.command = command;
      b.summary = gcl::config_error_summary(command, e);
      gcl::write_bundle(b, cfg.output);
    } catch (const std::exception&) {
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
