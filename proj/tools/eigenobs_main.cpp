// Command-line front end. Links the shared C API only.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "eigenobs.h"

namespace {

struct CommandArgs {
  std::string config;
  std::string outdir;
  bool check = false;
};

int map_exit(eigenobs_status status, bool check, int checks_failed) {
  switch (status) {
    case EIGENOBS_OK:
      return (check && checks_failed > 0) ? 1 : 0;
    case EIGENOBS_ERR_CONFIG:
    case EIGENOBS_ERR_ARGUMENT:
    case EIGENOBS_ERR_RANGE:
    case EIGENOBS_ERR_UNSUPPORTED:
      return 2;
    default:
      return 3;
  }
}

int run(const char* command, const CommandArgs& args) {
  eigenobs_run_report report{0, 0};
  const eigenobs_status status = eigenobs_run_command(
      command, args.config.c_str(),
      args.outdir.empty() ? nullptr : args.outdir.c_str(), &report);
  if (status != EIGENOBS_OK) {
    std::fprintf(stderr, "eigenobs %s: %s\n", command, eigenobs_last_error());
    return map_exit(status, args.check, 0);
  }
  if (report.checks_evaluated > 0) {
    std::printf("%s: %d/%d checks passed\n", command,
                report.checks_evaluated - report.checks_failed,
                report.checks_evaluated);
  } else {
    std::printf("%s: done\n", command);
  }
  // the oracle suite always gates the exit code
  const bool gate = args.check || std::string(command) == "validate";
  return map_exit(status, gate, report.checks_failed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenobs: eigenvalue optimization with small obstacles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", eigenobs_version());

  const char* names[] = {"solve", "capacity", "optimize", "sweep", "validate"};
  const char* descs[] = {
      "ground state and boundary-gradient profile of one domain",
      "relative capacity of one bump obstacle",
      "optimal obstacle placement at one volume",
      "full volume sweep with per-record reports",
      "analytic oracle suite (disk and square references)"};
  CommandArgs args[5];
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("-c,--config", args[i].config, "config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", args[i].outdir,
                    "output directory (overrides [output] dir)");
    sub->add_flag("--check", args[i].check,
                  "exit nonzero when a configured check fails");
  }

  CLI11_PARSE(app, argc, argv);
  for (int i = 0; i < 5; ++i)
    if (app.get_subcommand(names[i])->parsed()) return run(names[i], args[i]);
  return 2;
}
