// sweep subcommand: probabilistic vs deterministic bin quality across
// latent dimensions.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/binning.hpp"
#include "probin/evaluation.hpp"
#include "probin/kmer.hpp"
#include "probin/training.hpp"

namespace probin::cli {

namespace {

struct SweepOpts {
  CommonOpts common;
  std::string profiles;
  std::string truth;
  std::string output;
  std::vector<int> dims{1, 2, 4, 8};
  int positives_per_class = 4;
  std::size_t hidden = 512;
  double alpha = 1.0;
  double variance_floor = 1e-6;
  training::TrainConfig train;
  binning::KmedoidParams params;
};

void run_sweep(SweepOpts& o) {
  o.train.seed = o.common.seed;
  Manifest manifest("sweep", o.common);
  manifest.add_input(o.profiles);
  manifest.add_input(o.truth);
  manifest.set("profiles", o.profiles);
  manifest.set("truth", o.truth);
  manifest.set("dims", o.dims);
  manifest.set("positives_per_class", o.positives_per_class);
  manifest.set("hidden", o.hidden);
  manifest.set("alpha", o.alpha);
  manifest.set("learning_rate", o.train.learning_rate);
  manifest.set("mean_epochs", o.train.mean_epochs);
  manifest.set("var_epochs", o.train.var_epochs);
  manifest.set("negatives_per_positive", o.train.negatives_per_positive);
  manifest.set("threshold", o.params.sim_threshold);
  manifest.set("min_bin_size", o.params.min_bin_size);
  manifest.set("output", o.output);

  kmer::ProfileTable table = kmer::read_profiles_tsv(o.profiles);
  const evaluation::TruthTable truth = evaluation::read_truth_tsv(o.truth);
  evaluation::SweepDataset data;
  data.labels = align_labels(table.ids, truth, "sweep");
  data.ids = std::move(table.ids);
  data.profiles = std::move(table.profiles);
  data.pairs = training::build_labeled_pairs(data.profiles, data.labels, o.positives_per_class,
                                             o.train.negatives_per_positive, o.common.seed);

  model::ModelConfig model_cfg;
  model_cfg.input_dim = data.profiles.front().counts.size();
  model_cfg.hidden_dim = o.hidden;
  model_cfg.alpha = o.alpha;
  model_cfg.variance_floor = o.variance_floor;

  const std::vector<evaluation::SweepRow> rows =
      evaluation::dimension_sweep(data, o.dims, model_cfg, o.train, o.params);
  evaluation::write_sweep_csv(o.output, rows);
  manifest.add_output(o.output);
  manifest.write(o.output);
  std::printf("swept %zu dims x 2 model kinds on %zu items -> %s\n", o.dims.size(),
              data.ids.size(), o.output.c_str());
}

}  // namespace

void register_sweep(CLI::App& app) {
  auto opts = std::make_shared<SweepOpts>();
  CLI::App* cmd = app.add_subcommand(
      "sweep", "Compare probabilistic and deterministic models across latent dimensions");
  cmd->add_option("--profiles", opts->profiles, "Profile TSV")->required();
  cmd->add_option("--truth", opts->truth, "Truth TSV with labels")->required();
  cmd->add_option("--output", opts->output, "Sweep CSV to write")->required();
  cmd->add_option("--dims", opts->dims, "Latent dimensions to sweep")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--positives-per-class", opts->positives_per_class,
                  "Positive partners per item and class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--hidden", opts->hidden, "Hidden layer width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", opts->alpha, "Kernel bandwidth scale of the expected likelihood")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lr", opts->train.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mean-epochs", opts->train.mean_epochs, "Stage-1 epochs (mean head)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--var-epochs", opts->train.var_epochs, "Stage-2 epochs (variance head)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--negatives", opts->train.negatives_per_positive, "Negatives per positive")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--batch-size", opts->train.batch_size, "Pairs per optimizer step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threshold", opts->params.sim_threshold, "Neighbor similarity threshold")
      ->capture_default_str();
  cmd->add_option("--min-bin", opts->params.min_bin_size, "Smallest seedable neighborhood")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_sweep(*opts);
  });
}

}  // namespace probin::cli
