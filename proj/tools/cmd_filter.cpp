// filter subcommand: uncertainty-ranked removal vs random removal, with
// re-clustering at each retention level.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/binning.hpp"
#include "probin/evaluation.hpp"
#include "probin/model.hpp"

namespace probin::cli {

namespace {

struct FilterOpts {
  CommonOpts common;
  std::string embeddings;
  std::string truth;
  std::string output;
  std::vector<std::string> modes{"uncertainty", "random"};
  std::vector<double> ratios{0.0, 0.05, 0.1, 0.2};
  double recall_threshold = 0.9;
  std::string kernel = "exp-mahalanobis";
  double bandwidth = 1.0;
  binning::KmedoidParams params;
};

void run_filter(const FilterOpts& o) {
  Manifest manifest("filter", o.common);
  manifest.add_input(o.embeddings);
  manifest.add_input(o.truth);
  manifest.set("embeddings", o.embeddings);
  manifest.set("truth", o.truth);
  manifest.set("ratios", o.ratios);
  manifest.set("modes", o.modes);
  manifest.set("recall_threshold", o.recall_threshold);
  manifest.set("kernel", o.kernel);
  manifest.set("bandwidth", o.bandwidth);
  manifest.set("threshold", o.params.sim_threshold);
  manifest.set("min_bin_size", o.params.min_bin_size);
  manifest.set("output", o.output);

  const model::EmbeddingSet set = model::read_embeddings_tsv(o.embeddings);
  const evaluation::TruthTable truth = evaluation::read_truth_tsv(o.truth);
  const std::vector<std::string> labels = align_labels(set.ids, truth, "filter");
  binning::SimilarityKernel kernel;
  kernel.kind = binning::parse_kernel(o.kernel);
  kernel.bandwidth = o.bandwidth;

  std::vector<evaluation::FilterPoint> points;
  for (const std::string& mode_name : o.modes) {
    const evaluation::FilterMode mode = evaluation::parse_filter_mode(mode_name);
    const std::vector<evaluation::FilterPoint> mode_points =
        evaluation::filter_experiment(set, labels, o.ratios, mode, o.recall_threshold,
                                      o.common.seed, kernel, o.params);
    points.insert(points.end(), mode_points.begin(), mode_points.end());
  }
  evaluation::write_filter_csv(o.output, points);
  manifest.add_output(o.output);
  manifest.write(o.output);
  std::printf("filter experiment over %zu ratios x %zu modes on %zu items -> %s\n",
              o.ratios.size(), o.modes.size(), set.count, o.output.c_str());
}

}  // namespace

void register_filter(CLI::App& app) {
  auto opts = std::make_shared<FilterOpts>();
  CLI::App* cmd =
      app.add_subcommand("filter", "Re-cluster after removing the most uncertain items");
  cmd->add_option("--embeddings", opts->embeddings, "Embedding TSV")->required();
  cmd->add_option("--truth", opts->truth, "Truth TSV with labels")->required();
  cmd->add_option("--output", opts->output, "Experiment CSV to write")->required();
  cmd->add_option("--modes", opts->modes, "Removal modes: uncertainty and/or random")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--ratios", opts->ratios, "Removal ratios in [0, 1)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--recall-threshold", opts->recall_threshold,
                  "Recall needed to count a cluster as recovered")
      ->capture_default_str();
  cmd->add_option("--kernel", opts->kernel,
                  "Similarity: cosine, exp-l1, exp-l2, or exp-mahalanobis")
      ->check(CLI::IsMember({"cosine", "exp-l1", "exp-l2", "exp-mahalanobis"}))
      ->capture_default_str();
  cmd->add_option("--bandwidth", opts->bandwidth, "Bandwidth of the exp-l1/exp-l2 kernels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threshold", opts->params.sim_threshold, "Neighbor similarity threshold")
      ->capture_default_str();
  cmd->add_option("--min-bin", opts->params.min_bin_size, "Smallest seedable neighborhood")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", opts->params.max_iters, "Cluster extraction cap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_filter(*opts);
  });
}

}  // namespace probin::cli
