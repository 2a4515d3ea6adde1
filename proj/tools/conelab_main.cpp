#include <conelab/app/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Cone-surface Swift-Hohenberg toolkit"};
  app.require_subcommand(1);

  conelab::app::CommandOptions options;
  std::string command;
  double time = 0.0;

  const auto add_common = [&](CLI::App* sub, const char* config_help) {
    sub->add_option("--config", options.config, config_help)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "Output directory");
    sub->add_option("--override", options.overrides, "Override a field, block.key=value (repeatable)")
        ->allow_extra_args(false);
    sub->callback([&command, sub] { command = sub->get_name(); });
  };

  add_common(app.add_subcommand("analyze", "Poles, weight window, asymptotics template and prediction"),
             "Run configuration (YAML)");
  add_common(app.add_subcommand("simulate", "Run the dynamics and write snapshots, monitor and manifest"),
             "Run configuration (YAML)");
  auto* fit = app.add_subcommand("fit", "Fit the near-tip decay exponent from a snapshot CSV");
  add_common(fit, "Run configuration (YAML)");
  fit->add_option("--snapshots", options.snapshots, "Snapshot CSV (default: <out>/snapshots.csv)");
  auto* time_opt = fit->add_option("--time", time, "Snapshot time to fit (default: last)");
  add_common(app.add_subcommand("mms", "Manufactured-solution refinement ladders"), "Run configuration (YAML)");
  add_common(app.add_subcommand("verify", "Evaluate the acceptance criteria listed in a suite"),
             "Suite file (YAML)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every argument error is an input error.
    return app.exit(e) == 0 ? conelab::app::exit_ok : conelab::app::exit_input_error;
  }
  if (time_opt->count() > 0) options.time = time;
  return conelab::app::run_command(command, options, std::cout, std::cerr);
}
