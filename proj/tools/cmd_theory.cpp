// theory subcommand: run the numeric property checks and write a report.
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "cli_common.hpp"
#include "probin/theory.hpp"

namespace probin::cli {

namespace {

struct TheoryOpts {
  CommonOpts common;
  std::string output;
  bool quick = false;
};

void run_theory(const TheoryOpts& o) {
  Manifest manifest("theory", o.common);
  manifest.set("quick", o.quick);
  manifest.set("output", o.output);

  const theory::TheoryReport report = theory::run_theory_suite(o.common.seed, o.quick);
  theory::write_theory_json(o.output, report);
  manifest.add_output(o.output);
  manifest.write(o.output);

  for (const theory::CheckResult& check : report.checks) {
    std::printf("[%s] %s: %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
  }
  if (!report.all_passed) {
    throw std::runtime_error("theory checks failed; see " + o.output);
  }
  std::printf("all %zu checks passed -> %s\n", report.checks.size(), o.output.c_str());
}

}  // namespace

void register_theory(CLI::App& app) {
  auto opts = std::make_shared<TheoryOpts>();
  CLI::App* cmd = app.add_subcommand("theory", "Run numeric checks of the model's analytics");
  cmd->add_option("--output", opts->output, "Check report JSON to write")->required();
  cmd->add_flag("--quick", opts->quick, "Smaller samples and searches for a fast smoke run");
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_theory(*opts);
  });
}

}  // namespace probin::cli
