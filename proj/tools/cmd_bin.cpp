// bin subcommand: density-seeded K-medoid clustering of embeddings.
#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "probin/binning.hpp"
#include "probin/model.hpp"

namespace probin::cli {

namespace {

struct BinOpts {
  CommonOpts common;
  std::string embeddings;
  std::string output;
  std::string kernel = "exp-mahalanobis";
  double bandwidth = 1.0;
  binning::KmedoidParams params;
};

void run_bin(const BinOpts& o) {
  Manifest manifest("bin", o.common);
  manifest.add_input(o.embeddings);
  manifest.set("embeddings", o.embeddings);
  manifest.set("kernel", o.kernel);
  manifest.set("bandwidth", o.bandwidth);
  manifest.set("threshold", o.params.sim_threshold);
  manifest.set("min_bin_size", o.params.min_bin_size);
  manifest.set("max_iters", o.params.max_iters);
  manifest.set("refine", o.params.refine);
  manifest.set("output", o.output);

  const model::EmbeddingSet set = model::read_embeddings_tsv(o.embeddings);
  binning::SimilarityKernel kernel;
  kernel.kind = binning::parse_kernel(o.kernel);
  kernel.bandwidth = o.bandwidth;
  const binning::ClusterAssignment assignment = binning::kmedoid_bin(set, kernel, o.params);
  binning::write_assignment_tsv(o.output, set.ids, assignment);
  manifest.add_output(o.output);
  manifest.write(o.output);

  std::size_t unassigned = 0;
  for (int c : assignment.labels) {
    if (c < 0) ++unassigned;
  }
  std::printf("binned %zu items into %d clusters (%zu unassigned) -> %s\n", set.count,
              assignment.num_clusters, unassigned, o.output.c_str());
}

}  // namespace

void register_bin(CLI::App& app) {
  auto opts = std::make_shared<BinOpts>();
  CLI::App* cmd = app.add_subcommand("bin", "Cluster embeddings into bins");
  cmd->add_option("--embeddings", opts->embeddings, "Embedding TSV")->required();
  cmd->add_option("--output", opts->output, "Assignment TSV to write")->required();
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
  cmd->add_flag("--refine", opts->params.refine, "Re-assign items to their best medoid");
  add_common_options(*cmd, opts->common);
  cmd->callback([opts, cmd] {
    apply_config_file(*cmd, opts->common.config_file);
    run_bin(*opts);
  });
}

}  // namespace probin::cli
