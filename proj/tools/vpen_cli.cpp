#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "vpen/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vectorial exact penalty experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config, "Experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--seed", seed, "Random seed (overrides subsolver and diagnostics seeds)");
  };
  add_common(app.add_subcommand("run", "Run one penalty method and write trace.csv, summary.json"),
             true);
  add_common(app.add_subcommand("compare", "Run several strategies and tabulate the outcomes"),
             true);
  add_common(app.add_subcommand("diagnose", "Run diagnostic checks and write a report"), true);
  auto* list = app.add_subcommand("list-instances", "List bundled instances");
  list->add_option("--out", out_dir, "Also write each instance as JSON into this directory");
  app.add_subcommand("list-checks", "List diagnostic check names");

  CLI11_PARSE(app, argc, argv);

  const CLI::App* cmd = app.get_subcommands().front();
  const auto given = [&](const char* name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  std::optional<std::filesystem::path> cfg_path;
  std::optional<std::filesystem::path> out_path;
  std::optional<std::uint64_t> seed_opt;
  if (given("--config")) cfg_path = config;
  if (given("--out")) out_path = out_dir;
  if (given("--seed")) seed_opt = seed;
  return vpen::run_verb(cmd->get_name(), cfg_path, out_path, seed_opt, std::cout, std::cerr);
}
