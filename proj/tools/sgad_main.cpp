// sgad: saddle searches from the command line.
//
//   sgad <command> [--config FILE] [--key value ...]
//   sgad replay MANIFEST [--output_dir DIR]
//
// Exit status: 0 converged / verified, 2 not converged, 1 error.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgad/cli/commands.hpp"
#include "sgad/cli/config.hpp"

namespace {

using sgad::cli::Command;
using Pairs = std::vector<std::pair<std::string, std::string>>;

struct CommandFlags {
  Command command;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
};

Pairs flag_pairs(const CommandFlags& f) {
  Pairs out;
  for (const auto& key : sgad::cli::keys_for(f.command)) {
    auto it = f.values.find(key.name);
    if (it != f.values.end()) out.emplace_back(key.name, it->second);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Simplified gentlest ascent dynamics: saddle searches for non-gradient systems"};
  app.require_subcommand(1);

  std::vector<CommandFlags> commands;
  commands.reserve(sgad::cli::all_commands().size());
  for (Command c : sgad::cli::all_commands()) {
    commands.push_back(CommandFlags{c, nullptr, {}, {}});
    CommandFlags& f = commands.back();
    f.app = app.add_subcommand(std::string(sgad::cli::to_string(c)));
    f.app->add_option("-c,--config", f.config_file, "key = value file")->check(CLI::ExistingFile);
    for (const auto& key : sgad::cli::keys_for(c)) {
      f.app->add_option_function<std::string>(
          "--" + key.name, [&f, name = key.name](const std::string& v) { f.values[name] = v; }, key.help);
    }
  }

  std::string manifest;
  std::optional<std::string> replay_dir;
  CLI::App* replay = app.add_subcommand("replay", "rerun a run.manifest");
  replay->add_option("manifest", manifest, "manifest file")->required()->check(CLI::ExistingFile);
  replay->add_option_function<std::string>(
      "--output_dir", [&replay_dir](const std::string& v) { replay_dir = v; }, "override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sgad::cli::kExitError;
  }

  try {
    sgad::cli::RunConfig cfg;
    if (replay->parsed()) {
      Pairs flags;
      if (replay_dir) flags.emplace_back("output_dir", *replay_dir);
      cfg = sgad::cli::load_config(manifest, std::nullopt, flags);
    } else {
      for (const auto& f : commands) {
        if (!f.app->parsed()) continue;
        cfg = f.config_file.empty() ? sgad::cli::resolve_config(f.command, {}, flag_pairs(f))
                                    : sgad::cli::load_config(f.config_file, f.command, flag_pairs(f));
      }
    }
    return sgad::cli::execute(cfg, std::cout);
  } catch (const sgad::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return sgad::cli::kExitError;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
