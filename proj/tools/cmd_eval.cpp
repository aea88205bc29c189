// eval subcommand: score an assignment against ground truth.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/binning.hpp"
#include "probin/evaluation.hpp"

namespace probin::cli {

namespace {

struct EvalOpts {
  CommonOpts common;
  std::string assignments;
  std::string truth;
  std::string report_out;
  std::string tiers_out;
};

void run_eval(const EvalOpts& o) {
  Manifest manifest("eval", o.common);
  manifest.add_input(o.assignments);
  manifest.add_input(o.truth);
  manifest.set("assignments", o.assignments);
  manifest.set("truth", o.truth);
  manifest.set("report_out", o.report_out);

  const binning::AssignmentTable table = binning::read_assignment_tsv(o.assignments);
  const evaluation::TruthTable truth = evaluation::read_truth_tsv(o.truth);
  const std::vector<std::string> labels = align_labels(table.ids, truth, "eval");
  const evaluation::BinningReport report = evaluation::score_bins(table.assignment, labels);

  evaluation::write_report_json(o.report_out, report);
  manifest.add_output(o.report_out);
  if (!o.tiers_out.empty()) {
    evaluation::write_tiers_csv(o.tiers_out, report);
    manifest.add_output(o.tiers_out);
    manifest.set("tiers_out", o.tiers_out);
  }
  manifest.write(o.report_out);
  std::printf("scored %d clusters: %zu high quality (F1 > 0.9), %zu unassigned -> %s\n",
              report.num_clusters, report.high_quality, report.num_unassigned,
              o.report_out.c_str());
}

}  // namespace

void register_eval(CLI::App& app) {
  auto opts = std::make_shared<EvalOpts>();
  CLI::App* cmd = app.add_subcommand("eval", "Score bins against ground-truth labels");
  cmd->add_option("--assignments", opts->assignments, "Assignment TSV from bin")->required();
  cmd->add_option("--truth", opts->truth, "Truth TSV with labels")->required();
  cmd->add_option("--report-out", opts->report_out, "Score report JSON to write")->required();
  cmd->add_option("--tiers-out", opts->tiers_out, "Optional F1-tier CSV to write");
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_eval(*opts);
  });
}

}  // namespace probin::cli
